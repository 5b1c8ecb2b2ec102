#include "qpdcv/statevector.hpp"

#include <cmath>
#include <stdexcept>

namespace qpdcv {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 24) throw std::invalid_argument("statevector: bad qubit count");
    amp_.assign(std::size_t(1) << n_qubits, {0.0, 0.0});
    amp_[0] = 1.0;
}

// generic single-qubit gate [[a, b], [c, d]]
#define FOR_QUBIT_PAIRS(q, ...)                                         \
    do {                                                                 \
        const std::size_t bit = std::size_t(1) << (q);                   \
        for (std::size_t base = 0; base < amp_.size(); ++base) {         \
            if (base & bit) continue;                                    \
            const std::size_t i0 = base, i1 = base | bit;                \
            (void)i0;                                                    \
            __VA_ARGS__                                                      \
        }                                                                \
    } while (0)

void Statevector::apply_rx(int q, double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    FOR_QUBIT_PAIRS(q, {
        const auto a0 = amp_[i0], a1 = amp_[i1];
        amp_[i0] = c * a0 - kI * s * a1;
        amp_[i1] = -kI * s * a0 + c * a1;
    });
}

void Statevector::apply_rz(int q, double theta) {
    const std::complex<double> e0 = std::exp(-kI * (theta / 2.0));
    const std::complex<double> e1 = std::exp(kI * (theta / 2.0));
    FOR_QUBIT_PAIRS(q, {
        amp_[i0] *= e0;
        amp_[i1] *= e1;
    });
}

void Statevector::apply_hadamard(int q) {
    const double r = 1.0 / std::sqrt(2.0);
    FOR_QUBIT_PAIRS(q, {
        const auto a0 = amp_[i0], a1 = amp_[i1];
        amp_[i0] = r * (a0 + a1);
        amp_[i1] = r * (a0 - a1);
    });
}

void Statevector::apply_sdg(int q) {
    FOR_QUBIT_PAIRS(q, { amp_[i1] *= -kI; });
}

void Statevector::apply_cnot(int control, int target) {
    const std::size_t cbit = std::size_t(1) << control;
    const std::size_t tbit = std::size_t(1) << target;
    for (std::size_t i = 0; i < amp_.size(); ++i)
        if ((i & cbit) && !(i & tbit)) std::swap(amp_[i], amp_[i | tbit]);
}

void Statevector::apply_pauli(int q, int pauli) {
    switch (pauli) {
        case 1:
            FOR_QUBIT_PAIRS(q, { std::swap(amp_[i0], amp_[i1]); });
            break;
        case 2:
            FOR_QUBIT_PAIRS(q, {
                const auto a0 = amp_[i0], a1 = amp_[i1];
                amp_[i0] = -kI * a1;
                amp_[i1] = kI * a0;
            });
            break;
        case 3:
            FOR_QUBIT_PAIRS(q, { amp_[i1] = -amp_[i1]; });
            break;
        default:
            throw std::invalid_argument("apply_pauli: pauli must be 1, 2 or 3");
    }
}

#undef FOR_QUBIT_PAIRS

double Statevector::norm_sq() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return s;
}

uint64_t Statevector::sample_index(RandomStream& stream) const {
    const double u = stream.next_uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < amp_.size(); ++i) {
        cum += std::norm(amp_[i]);
        if (u < cum) return i;
    }
    return amp_.size() - 1;  // also absorbs rounding slack at u ~ 1
}

}  // namespace qpdcv
