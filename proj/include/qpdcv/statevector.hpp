#pragma once

#include "qpdcv/rng.hpp"

#include <complex>
#include <span>
#include <vector>

namespace qpdcv {

// Dense state of n qubits. Qubit q is bit q of the amplitude index (qubit 0
// least significant). Gates act in place; norm stays 1 up to rounding.
class Statevector {
  public:
    explicit Statevector(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    std::span<const std::complex<double>> amplitudes() const { return amp_; }

    void apply_rx(int q, double theta);
    void apply_rz(int q, double theta);
    void apply_hadamard(int q);
    void apply_sdg(int q);
    void apply_cnot(int control, int target);
    void apply_pauli(int q, int pauli);  // 1 = X, 2 = Y, 3 = Z

    double norm_sq() const;

    // one uniform draw; inverse CDF over |amp|^2 in index order
    uint64_t sample_index(RandomStream& stream) const;

  private:
    int n_qubits_;
    std::vector<std::complex<double>> amp_;
};

}  // namespace qpdcv
