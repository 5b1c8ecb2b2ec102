#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qpdcv {

// Dense real symmetric matrix. Symmetry is structural: set() writes both
// triangle entries and construction from raw rows checks a == a^T exactly.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    // row-major full storage; throws std::invalid_argument unless exactly symmetric
    static SymMatrix from_rows(std::size_t n, std::span<const double> rows);

    std::size_t dim() const { return n_; }
    double operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
    void set(std::size_t r, std::size_t c, double v) {
        a_[r * n_ + c] = v;
        a_[c * n_ + r] = v;
    }
    std::span<const double> data() const { return a_; }

  private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

struct SymEigen {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // column-major, vectors[j*n + i] = <i|v_j>
};

SymEigen sym_eigen(const SymMatrix& m);

// Moore-Penrose inverse through the eigendecomposition. Eigenvalues with
// |lambda| <= rel_tol * max|lambda| are treated as exact zeros, so rank
// deficiency degrades gracefully instead of amplifying noise.
SymMatrix sym_pseudoinverse(const SymMatrix& m, double rel_tol = 1e-12);

}  // namespace qpdcv
