#pragma once

#include "qpdcv/simulator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qpdcv {

struct CvSetConfig {
    int kind = 1;                // 1..5
    std::vector<double> params;  // optional constant override for kinds 2/3
};

// Full description of one experiment family: circuit sizes, sampling
// budgets, observables, control sets, seed, noise table. JSON file keys
// mirror the field names; unknown keys are rejected.
struct ExperimentConfig {
    int qubits = 4;
    std::vector<int> n_trot_list = {1, 2, 3, 4, 5, 6, 7, 8};
    double h = 1.0;
    double j = 0.15;
    double dt = 0.5;
    int n_instances = 200;
    int n_shots = 256;
    std::vector<MeasBasis> bases = {MeasBasis::y, MeasBasis::z};
    std::vector<std::string> observables = {"weight_1", "weight_2", "weight_3", "weight_4",
                                            "two_nearest"};
    std::vector<CvSetConfig> cv_sets = {{1, {}}, {2, {}}, {3, {}}, {4, {}}, {5, {}}};
    uint64_t master_seed = 1;
    std::string noise_file = "data/noise_params_4q.txt";
    int noiseless_shots = 65536;
    int nopec_shots = 1024;
    bool write_raw = true;

    // relative noise_file paths resolve against the config file's directory
    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text,
                                           const std::string& base_dir = "");

    void validate() const;  // throws std::invalid_argument
    std::string to_json_text() const;  // resolved, deterministic key order
};

}  // namespace qpdcv
