#pragma once

#include "qpdcv/rng.hpp"
#include "qpdcv/signed_log.hpp"

#include <cstdint>
#include <vector>

namespace qpdcv {

// One tensor position of a quasiprobability decomposition: coefficients q
// (nonzero by construction) and the sampling distribution p over the same
// index set. w(k) = q(k)/p(k) is precomputed in signed-log form.
struct QpdTerm {
    std::vector<double> q;                 // all nonzero
    std::vector<double> p;                 // strictly positive, sums to 1
    std::vector<SignedLog> w;              // q/p
    std::vector<uint32_t> original_index;  // label before zero-coefficient drop
    double gamma = 0.0;                    // sum |q|
    double q_sum = 0.0;                    // sum q
};

// One Monte Carlo draw: an index per position plus the accumulated weight
// prod_m w_m(k_m). Indices refer to the post-drop tables.
struct SampledInstance {
    std::vector<uint32_t> k;
    SignedLog weight;
};

// Product-form quasiprobability decomposition with an independent sampling
// distribution per position. Entries with q == 0 are dropped at construction
// (they cannot contribute to the represented value); original_index keeps the
// caller's labels stable. A position whose coefficients are all zero is
// rejected: it would make the whole decomposition identically zero.
class QpdModel {
  public:
    // p(k) = |q(k)| / gamma_m: every sampled weight has magnitude gamma_m.
    static QpdModel proportional(const std::vector<std::vector<double>>& q_tables);

    // Caller-chosen sampling tables. Each p row must be strictly positive and
    // sum to 1 within 1e-12. Where q is dropped its p mass is dropped too and
    // the row is renormalized (unbiasedness is unaffected: dropped q == 0).
    static QpdModel with_sampling_tables(const std::vector<std::vector<double>>& q_tables,
                                         const std::vector<std::vector<double>>& p_tables);

    std::size_t n_positions() const { return terms_.size(); }
    const QpdTerm& term(std::size_t m) const { return terms_[m]; }

    SignedLog mu_w() const;       // prod_m sum_k q_m(k)
    double gamma() const;         // prod_m gamma_m
    SignedLog log_n_pi_k() const; // prod_m K_m, signed-log (can exceed double range)
    uint64_t n_sigma_k() const;   // sum_m K_m

    // One draw per position by inverse CDF on p; advances the stream by
    // exactly one uniform per position.
    SampledInstance sample(RandomStream& stream) const;

  private:
    std::vector<QpdTerm> terms_;
};

}  // namespace qpdcv
