#pragma once

#include "qpdcv/archive.hpp"

#include <string>
#include <vector>

namespace qpdcv {

// p in [0, 1]; linear interpolation between order statistics
double percentile(std::vector<double> values, double p);

struct ReportOptions {
    std::string spiral_method;            // empty = first cv method present
    std::vector<double> heatmap_gammas = {1.5, 2.0, 4.0, 8.0};
    int heatmap_grid = 81;                // points per axis over [-1, 1]
};

// Renders report/ inside an archive directory from results.tsv:
//   percentiles.tsv    DAF and SORP quartiles (25/50/75/90) per method,
//                      plus the shot-noise ceiling row
//   residual_cdf.tsv   per-method sorted |studentized residual| with the
//                      empirical CDF and the half-normal reference
//   spiral.tsv         (weight_1, y) vs (weight_1, z) trajectories across
//                      circuit depth for no-insertion, basic and one cv
//                      method (written when both bases are present)
void write_report(const std::string& archive_dir, const ReportOptions& options = {});

// Standalone moment-plane grids of rho_squared_weight_control, one file per
// gamma: rho2_gamma_<g>.tsv with columns ex, ewx, rho2, feasible.
void write_heatmaps(const std::string& out_dir, const ReportOptions& options = {});

}  // namespace qpdcv
