#pragma once

#include "qpdcv/controls.hpp"

#include <span>
#include <string>
#include <vector>

namespace qpdcv {

// Per-instance Monte Carlo data in linear domain. x[i] is the measured value
// (usually a shot average), w[i] the quasiprobability weight, v[a][i] the
// control values. shot_var (optional) holds the per-instance sample variance
// across shots, used only by variance_decomposition.
struct Dataset {
    std::vector<double> x;
    std::vector<double> w;
    std::vector<std::vector<double>> v;
    std::vector<double> shot_var;

    std::size_t n() const { return x.size(); }
    void validate() const;  // throws std::invalid_argument on shape mismatch
};

struct EstimationResult {
    double t_hat = 0.0;
    double sigma_sq = 0.0;  // estimated variance of t_hat, never negative
    std::string method;
    std::size_t n = 0;
    std::size_t n_cv = 0;
};

// ---- sample statistics (denominator N-1 throughout) ----

double smean(std::span<const double> a);
double svar(std::span<const double> a);                            // N >= 2
double scov(std::span<const double> a, std::span<const double> b); // N >= 2

// leave-one-out values in O(1) from precomputed full-sample statistics
double smean_sans_one(double smean_a, std::size_t n, double a_i);
// a_ci, b_ci are the centered entries a_i - mean(a), b_i - mean(b); N >= 3
double scov_sans_one(double scov_ab, std::size_t n, double a_ci, double b_ci);

// O(N) convenience forms
double smean_sans_one(std::span<const double> a, std::size_t i);
double scov_sans_one(std::span<const double> a, std::span<const double> b, std::size_t i);

// ---- estimators ----

// plain weighted mean: T = SMean[WX], var = SVar[WX]/N. N >= 2.
EstimationResult estimate_basic(const Dataset& d);

// mean-centered variant: the known weight mean mu_w multiplies the sample
// mean of X, and only the weight fluctuation is estimated from data. Same
// expectation, often far less variance when W has heavy sign noise. N >= 2.
EstimationResult estimate_centered(const Dataset& d, double mu_w);

// control-variate variant: W is replaced by its residual against the span of
// the controls (exact moments from `stats`), and every sample moment the
// correction needs is taken leave-one-out so the estimator stays exactly
// unbiased. N >= 4, requires d.v rows matching stats.n_cv().
EstimationResult estimate_cv(const Dataset& d, const ControlSetStats& stats);

// ---- variance decomposition and reporting metrics ----

// Split of SVar[WX] into within-instance shot noise (intra) and everything
// else (inter). intra is SMean[w_i^2 * shot_var_i / n_shots_effective];
// with shot noise irreducible by any weight-side method, svar_wx / intra
// caps the achievable amplification. A vanishing intra estimate (below
// 1e-15 * svar_wx) makes the cap unbounded.
struct VarianceDecomposition {
    double svar_wx = 0.0;
    double intra = 0.0;
    double inter = 0.0;
    double ceiling_daf = 0.0;  // +inf when ceiling_unbounded
    double ceiling_sorp = 0.0;
    bool ceiling_unbounded = false;
};
VarianceDecomposition variance_decomposition(std::span<const double> w,
                                             std::span<const double> x,
                                             std::span<const double> shot_var,
                                             double n_shots_effective);

double daf(double sigma_sq_basic, double sigma_sq_method);
double sorp(double sigma_sq_basic, double sigma_sq_method);  // percent
double studentized_residual(double t, double sigma_sq, double t_ref, double sigma_sq_ref);

}  // namespace qpdcv
