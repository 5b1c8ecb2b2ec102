#pragma once

#include "qpdcv/qpd_model.hpp"
#include "qpdcv/rng.hpp"
#include "qpdcv/signed_log.hpp"
#include "qpdcv/sym_matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qpdcv {

// Control variable in product form: V(k) = prod_m v_m(k_m). Tables are
// index-aligned with the model's post-drop tables. Signed-log copies of the
// factors are kept so evaluation never leaves the log domain.
struct FactorizableControl {
    std::string name;
    std::vector<std::vector<double>> v;
    std::vector<std::vector<SignedLog>> v_log;
    bool normalized = false;  // per-position unit second moment under p

    static FactorizableControl from_tables(std::string name,
                                           std::vector<std::vector<double>> tables);
};

SignedLog evaluate_control(const FactorizableControl& c, std::span<const uint32_t> k);

// Exact moments of a control set under the model's sampling distribution:
//   mu[a]  = E[V_a]          c[a] = Cov[W, V_a]
//   k(a,b) = Cov[V_a, V_b]   k_pinv = pseudoinverse of k
// Everything is a product of per-position sums, accumulated in the log
// domain; cost O(N_sigma_K * n_cv^2).
struct ControlSetStats {
    SignedLog mu_w;
    std::vector<double> mu;
    std::vector<double> c;
    SymMatrix k;
    SymMatrix k_pinv;
    std::size_t n_cv() const { return mu.size(); }
};

// threads: 0 = library default, 1 = serial, otherwise OpenMP team size.
// Result is bit-identical for every thread count (per-position partials are
// stored and reduced in position order).
ControlSetStats precompute_stats(const QpdModel& model,
                                 std::span<const FactorizableControl> controls,
                                 int threads = 0);

// Position classification used by the per-qubit sign-product set: which
// single qubit or adjacent pair a position's noise term acts on.
struct SupportGrouping {
    int n_qubits = 0;
    // per position: qubit id q in [0, Q) for single support, or Q + q for
    // the pair (q, q+1)
    std::vector<int> group_of_position;
};

// The five built-in control families:
//   1  sign of the weight, one control
//   2  two-point tables (theta+1, theta-1), normalized, default thetas
//      {-1.5, -0.75, 0, 0.75, 1.5}
//   3  two-point tables (1, phi-1), normalized, default phis {-3, -1.5, 0, 1.5, 3}
//   4  per-qubit and per-pair sign products plus the full sign product
//      (needs grouping), 2Q controls
//   5  iid standard-normal tables, normalized, drawn from `stream`
// `params` overrides the set-2/3 constant lists.
std::vector<FactorizableControl> build_cv_set(int kind, const QpdModel& model,
                                              const SupportGrouping* grouping = nullptr,
                                              RandomStream* stream = nullptr,
                                              std::span<const double> params = {});

// lambda* = K^+ cov_uv, the variance-minimizing coefficients.
std::vector<double> optimal_coefficients(const ControlSetStats& stats,
                                         std::span<const double> cov_uv);

// Squared correlation between W and WX for the two-valued weight model
// W in {+-gamma} with E[W] = 1 and X in [-1, 1]:
//   rho^2 = (gamma^2 ex - ewx)^2 / ((gamma^2 - 1)(gamma^2 - ewx^2))
// feasible reports whether |E[X | W = -gamma]| <= 1, i.e. whether any joint
// distribution with these moments exists.
struct RhoSquared {
    double value = 0.0;
    bool feasible = true;
};
RhoSquared rho_squared_weight_control(double ex, double ewx, double gamma);

// Orthogonalized copy of a control set: V' = R^T V for the eigenbasis R of
// K, so K' is diagonal (the eigenvalues). Estimators are invariant under
// this change of basis; it exists for conditioning studies.
struct DiagonalizedControls {
    ControlSetStats stats;
    std::vector<double> eigenvalues;
    std::vector<double> rotation;  // column-major eigenvectors of K
    // maps per-instance control values into the rotated basis
    std::vector<std::vector<double>> rotate_rows(
        const std::vector<std::vector<double>>& v_rows) const;
};
DiagonalizedControls diagonalize_controls(const ControlSetStats& stats);

}  // namespace qpdcv
