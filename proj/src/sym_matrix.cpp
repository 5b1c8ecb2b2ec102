#include "qpdcv/sym_matrix.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace qpdcv {

SymMatrix SymMatrix::from_rows(std::size_t n, std::span<const double> rows) {
    if (rows.size() != n * n) throw std::invalid_argument("sym matrix: bad row data size");
    SymMatrix m(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            if (rows[r * n + c] != rows[c * n + r])
                throw std::invalid_argument("sym matrix: input not symmetric");
            m.a_[r * n + c] = rows[r * n + c];
        }
    return m;
}

SymEigen sym_eigen(const SymMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.dim());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) a(r, c) = m(r, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw std::runtime_error("sym eigen: did not converge");

    SymEigen out;
    out.values.resize(m.dim());
    out.vectors.resize(m.dim() * m.dim());
    for (Eigen::Index j = 0; j < n; ++j) {
        out.values[j] = solver.eigenvalues()(j);
        for (Eigen::Index i = 0; i < n; ++i) out.vectors[j * n + i] = solver.eigenvectors()(i, j);
    }
    return out;
}

SymMatrix sym_pseudoinverse(const SymMatrix& m, double rel_tol) {
    const std::size_t n = m.dim();
    SymEigen eig = sym_eigen(m);
    double max_abs = 0.0;
    for (double v : eig.values) max_abs = std::max(max_abs, std::abs(v));
    const double cutoff = rel_tol * max_abs;

    SymMatrix out(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(eig.values[j]) <= cutoff) continue;
        const double inv = 1.0 / eig.values[j];
        for (std::size_t r = 0; r < n; ++r) {
            const double vr = eig.vectors[j * n + r] * inv;
            for (std::size_t c = 0; c <= r; ++c)
                out.set(r, c, out(r, c) + vr * eig.vectors[j * n + c]);
        }
    }
    return out;
}

}  // namespace qpdcv
