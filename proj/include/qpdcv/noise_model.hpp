#pragma once

#include "qpdcv/controls.hpp"
#include "qpdcv/qpd_model.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qpdcv {

// One stochastic Pauli term of the layer noise channel:
//   rho -> (1 - eps) rho + eps P rho P
// Support is one qubit or one adjacent pair (nearest-neighbour device model).
struct PauliTerm {
    std::string pauli;   // letters over IXYZ, length = qubit count
    double epsilon = 0;  // in [0, 0.5)
    int layer_type = 0;  // 1 or 2
    int q_lo = 0, q_hi = 0;  // support (q_hi == q_lo for single-qubit terms)
    int p_lo = 0, p_hi = 0;  // Pauli labels there (1=X, 2=Y, 3=Z)

    bool is_pair() const { return q_hi != q_lo; }
};

// Per-layer-type Pauli noise attached to the two-qubit layers of the
// circuit. The channel of a layer applies immediately before its gates.
struct NoiseModel {
    int n_qubits = 0;
    std::array<std::vector<PauliTerm>, 2> terms;  // index 0 = layer type 1

    const std::vector<PauliTerm>& layer_terms(int layer_type) const {
        return terms[layer_type - 1];
    }
    std::size_t n_paulis() const { return terms[0].size(); }
};

// Text format: one record per term, `pauli_string rate_type1 rate_type2`,
// '#' comment lines allowed. A rate v maps to eps = (1 - exp(-2 v)) / 2.
// Validated: consistent string length Q, exactly 3Q + 9(Q-1) records, no
// duplicates, support a single qubit or an adjacent pair, v >= 0 (so
// eps < 0.5 always holds).
NoiseModel load_noise_params(const std::string& path);

// Quasiprobability decomposition that cancels the noise model over a
// Trotterized circuit: one position per eps>0 term per noisy layer, with
//   q = ( (1-eps)/(1-2 eps), -eps/(1-2 eps) )
// sampled proportionally, so p = (1-eps, eps) and |w| = 1/(1-2 eps).
// Index 0 means "leave the layer alone", index 1 means "insert the Pauli".
struct QpdPositionInfo {
    int step = 0;        // Trotter step, 0-based
    int occurrence = 0;  // noisy layer within the step, 0..3
    int layer_type = 0;  // 1 or 2
    int term_index = 0;  // into NoiseModel::layer_terms(layer_type)
};

struct PecQpd {
    QpdModel model;
    std::vector<QpdPositionInfo> position_map;           // per model position
    std::vector<std::pair<uint32_t, uint32_t>> layer_ranges;  // per (step*4 + occurrence)
    uint64_t m_nominal = 0;  // 4 * N_paulis * n_trot, before eps==0 drop
};

PecQpd build_qpd(const NoiseModel& noise, int n_trot);

// Support classification of every QPD position, for the per-qubit
// sign-product control family: group q for single-qubit terms on q,
// group Q + q for terms on the pair (q, q+1).
SupportGrouping support_grouping(const PecQpd& qpd, const NoiseModel& noise);

}  // namespace qpdcv
