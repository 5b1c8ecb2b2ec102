#pragma once

#include "qpdcv/config.hpp"
#include "qpdcv/estimators.hpp"

#include <map>
#include <string>
#include <vector>

namespace qpdcv {

// ---- results ----

struct MethodOutcome {
    std::string method;  // basic | centered | cv<kind>
    EstimationResult est;
    double daf = 0.0;
    double sorp = 0.0;
    double residual = 0.0;  // studentized against the noiseless reference
};

struct TaskResult {
    std::string circuit_id;
    int n_trot = 0;
    MeasBasis basis = MeasBasis::z;
    std::string observable;
    double t_noiseless = 0.0, s2_noiseless = 0.0;
    double t_nopec = 0.0, s2_nopec = 0.0;
    VarianceDecomposition decomp;
    std::vector<MethodOutcome> methods;
};

struct CircuitSummary {
    std::string circuit_id;
    int n_trot = 0;
    double gamma = 0.0;
    uint64_t m_nominal = 0;   // 4 * N_paulis * n_trot
    uint64_t m_kept = 0;      // positions after the eps == 0 drop
    uint64_t n_sigma_k = 0;
    double log_n_pi_k = 0.0;
};

struct ExperimentResult {
    std::vector<CircuitSummary> circuits;
    std::vector<TaskResult> tasks;
};

// ---- staged pipeline ----
// `run` is sample -> simulate -> estimate over this shared state, so the
// separated CLI stages reproduce in-memory results exactly.

struct CircuitData {
    std::string circuit_id;
    int n_trot = 0;
    Circuit circuit;
    PecQpd qpd;
    std::vector<SampledInstance> instances;
    std::map<MeasBasis, std::vector<InstanceResult>> sim;  // per instance
    std::map<MeasBasis, InstanceResult> noiseless;         // sampled reference
    std::map<MeasBasis, InstanceResult> nopec;             // noisy, no insertions
};

struct Pipeline {
    NoiseModel noise;
    std::vector<Observable> observables;
    std::vector<CircuitData> circuits;
};

struct RunOptions {
    int threads = 0;    // 0 = library default
    bool serial = false;  // force the serial reference kernels
};

Pipeline make_pipeline(const ExperimentConfig& config);
void sample_stage(Pipeline& p, const ExperimentConfig& config);
void simulate_stage(Pipeline& p, const ExperimentConfig& config, const RunOptions& options = {});
ExperimentResult estimate_stage(const Pipeline& p, const ExperimentConfig& config,
                                const RunOptions& options = {});

struct ExperimentOutput {
    Pipeline pipeline;
    ExperimentResult result;
};
ExperimentOutput run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

CircuitSummary summarize_circuit(const CircuitData& c);

}  // namespace qpdcv
