#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qpdcv {

// Symmetrized spin observables on measured bitstrings. Outcomes are
// m_q = +1 for bit 0 and -1 for bit 1.
//   weight_kappa: e_kappa(m_1..m_Q) / binomial(Q, kappa)
//                 (average of all products of kappa distinct spins)
//   two_nearest:  mean of m_q m_{q+1} over the chain
struct Observable {
    enum class Kind { weight_kappa, two_nearest };
    Kind kind = Kind::weight_kappa;
    int kappa = 1;
    std::string name;

    static Observable weight(int kappa);
    static Observable two_nearest();
    static Observable parse(const std::string& name, int n_qubits);
};

double observable_value(const Observable& o, uint64_t bits, int n_qubits);

// per-shot evaluation of a whole observable list; shares one elementary
// symmetric polynomial pass across all weight_kappa entries
void observable_values(const std::vector<Observable>& list, uint64_t bits, int n_qubits,
                       std::vector<double>& out);

}  // namespace qpdcv
