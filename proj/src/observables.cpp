#include "qpdcv/observables.hpp"

#include "qpdcv/polynomials.hpp"

#include <stdexcept>

namespace qpdcv {

namespace {

void spins_of(uint64_t bits, int n_qubits, std::vector<double>& m) {
    m.resize(n_qubits);
    for (int q = 0; q < n_qubits; ++q) m[q] = (bits >> q) & 1 ? -1.0 : 1.0;
}

double two_nearest_value(const std::vector<double>& m) {
    double s = 0.0;
    for (std::size_t q = 0; q + 1 < m.size(); ++q) s += m[q] * m[q + 1];
    return s / double(m.size() - 1);
}

}  // namespace

Observable Observable::weight(int kappa) {
    Observable o;
    o.kind = Kind::weight_kappa;
    o.kappa = kappa;
    o.name = "weight_" + std::to_string(kappa);
    return o;
}

Observable Observable::two_nearest() {
    Observable o;
    o.kind = Kind::two_nearest;
    o.name = "two_nearest";
    return o;
}

Observable Observable::parse(const std::string& name, int n_qubits) {
    if (name == "two_nearest") {
        if (n_qubits < 2) throw std::invalid_argument("observable: two_nearest needs >= 2 qubits");
        return two_nearest();
    }
    const std::string prefix = "weight_";
    if (name.rfind(prefix, 0) == 0) {
        const int kappa = std::stoi(name.substr(prefix.size()));
        if (kappa < 1 || kappa > n_qubits)
            throw std::invalid_argument("observable: kappa out of range in " + name);
        return weight(kappa);
    }
    throw std::invalid_argument("observable: unknown name " + name);
}

double observable_value(const Observable& o, uint64_t bits, int n_qubits) {
    std::vector<double> m;
    spins_of(bits, n_qubits, m);
    if (o.kind == Observable::Kind::two_nearest) return two_nearest_value(m);
    const auto e = elementary_symmetric(m);
    return e[o.kappa] / binomial(unsigned(n_qubits), unsigned(o.kappa));
}

void observable_values(const std::vector<Observable>& list, uint64_t bits, int n_qubits,
                       std::vector<double>& out) {
    out.resize(list.size());
    thread_local std::vector<double> m;
    spins_of(bits, n_qubits, m);

    bool need_esp = false;
    for (const auto& o : list) need_esp |= o.kind == Observable::Kind::weight_kappa;
    std::vector<double> e;
    if (need_esp) e = elementary_symmetric(m);

    for (std::size_t i = 0; i < list.size(); ++i) {
        const Observable& o = list[i];
        out[i] = o.kind == Observable::Kind::two_nearest
                     ? two_nearest_value(m)
                     : e[o.kappa] / binomial(unsigned(n_qubits), unsigned(o.kappa));
    }
}

}  // namespace qpdcv
