#pragma once

#include "qpdcv/experiment.hpp"

#include <string>

namespace qpdcv {

// On-disk layout under an archive directory:
//   meta.json       provenance: version, seed, config hash, resolved config
//   circuits.tsv    one row per circuit (gamma, position counts)
//   results.tsv     one row per (task, method); columns in README
//   raw/<circuit_id>/instances.tsv   sampled indices + weights
//   raw/<circuit_id>/shots_<basis>.tsv  per-instance shot mean/variance
//   raw/<circuit_id>/refs.tsv        noiseless and no-insertion references
// All floats are printed with 17 significant digits so a reload is
// bit-exact; nothing in an archive depends on wall time or thread count.

inline constexpr const char* kCodeVersion = "qpdcv 0.1.0";

uint64_t fnv1a64_bytes(const std::string& bytes);

void save_meta(const std::string& dir, const ExperimentConfig& config,
               const std::string& config_source_text);
void save_circuits(const std::string& dir, const ExperimentResult& result);
void save_results(const std::string& dir, const ExperimentResult& result);
void save_raw_instances(const std::string& dir, const Pipeline& p);
void save_raw_shots(const std::string& dir, const Pipeline& p, const ExperimentConfig& config);

// full archive as written by the `run` command
void save_archive(const std::string& dir, const ExperimentConfig& config,
                  const std::string& config_source_text, const ExperimentOutput& output);

void load_raw_instances(const std::string& dir, Pipeline& p);
void load_raw_shots(const std::string& dir, Pipeline& p, const ExperimentConfig& config);

// results.tsv reader used by the report stage
struct ResultRow {
    std::string circuit_id;
    int n_trot = 0;
    std::string basis;
    std::string observable;
    std::string method;
    std::size_t n = 0, n_cv = 0;
    double t_hat = 0, sigma_sq = 0, daf = 0, sorp = 0, residual = 0;
    double t_noiseless = 0, s2_noiseless = 0, t_nopec = 0, s2_nopec = 0;
    double svar_wx = 0, intra = 0, inter = 0, ceiling_daf = 0, ceiling_sorp = 0;
};
std::vector<ResultRow> load_results(const std::string& dir);

}  // namespace qpdcv
