#include "qpdcv/noise_model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qpdcv {

namespace {

PauliTerm parse_term(const std::string& pauli, double rate, int layer_type, int line_no) {
    auto fail = [&](const std::string& why) {
        throw std::runtime_error("noise params line " + std::to_string(line_no) + ": " + why);
    };
    PauliTerm t;
    t.pauli = pauli;
    t.layer_type = layer_type;
    int lo = -1, hi = -1, weight = 0;
    for (std::size_t i = 0; i < pauli.size(); ++i) {
        char c = pauli[i];
        if (c == 'I') continue;
        if (c != 'X' && c != 'Y' && c != 'Z') fail(std::string("unknown letter '") + c + "'");
        ++weight;
        if (lo < 0) lo = int(i);
        hi = int(i);
    }
    if (weight < 1 || weight > 2) fail("support must be one qubit or one adjacent pair");
    if (weight == 2 && hi != lo + 1) fail("two-qubit support must be an adjacent pair");
    t.q_lo = lo;
    t.q_hi = hi;
    auto code = [](char c) { return c == 'X' ? 1 : c == 'Y' ? 2 : 3; };
    t.p_lo = code(pauli[lo]);
    t.p_hi = weight == 2 ? code(pauli[hi]) : 0;

    if (!std::isfinite(rate) || rate < 0.0) fail("rate must be finite and >= 0");
    t.epsilon = (1.0 - std::exp(-2.0 * rate)) / 2.0;  // always in [0, 0.5)
    return t;
}

}  // namespace

NoiseModel load_noise_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("noise params: cannot open " + path);

    NoiseModel nm;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        std::string pauli;
        double r1, r2;
        if (!(row >> pauli >> r1 >> r2))
            throw std::runtime_error("noise params line " + std::to_string(line_no) +
                                     ": expected `pauli rate1 rate2`");
        std::string extra;
        if (row >> extra)
            throw std::runtime_error("noise params line " + std::to_string(line_no) +
                                     ": trailing fields");
        if (nm.n_qubits == 0)
            nm.n_qubits = int(pauli.size());
        else if (int(pauli.size()) != nm.n_qubits)
            throw std::runtime_error("noise params line " + std::to_string(line_no) +
                                     ": inconsistent string length");
        if (!seen.insert(pauli).second)
            throw std::runtime_error("noise params line " + std::to_string(line_no) +
                                     ": duplicate term " + pauli);
        nm.terms[0].push_back(parse_term(pauli, r1, 1, line_no));
        nm.terms[1].push_back(parse_term(pauli, r2, 2, line_no));
    }

    const int q = nm.n_qubits;
    if (q < 2) throw std::runtime_error("noise params: need at least 2 qubits");
    const std::size_t expected = std::size_t(3 * q + 9 * (q - 1));
    if (nm.n_paulis() != expected)
        throw std::runtime_error("noise params: expected " + std::to_string(expected) +
                                 " terms for " + std::to_string(q) + " qubits, got " +
                                 std::to_string(nm.n_paulis()));
    return nm;
}

PecQpd build_qpd(const NoiseModel& noise, int n_trot) {
    if (n_trot < 1) throw std::invalid_argument("build_qpd: n_trot must be >= 1");
    static const int kOccurrenceType[4] = {1, 1, 2, 2};  // layer types within one step

    PecQpd out;
    out.m_nominal = uint64_t(4) * noise.n_paulis() * uint64_t(n_trot);
    std::vector<std::vector<double>> q_tables;
    out.layer_ranges.reserve(std::size_t(n_trot) * 4);

    for (int step = 0; step < n_trot; ++step) {
        for (int occ = 0; occ < 4; ++occ) {
            const int type = kOccurrenceType[occ];
            const uint32_t begin = uint32_t(q_tables.size());
            const auto& terms = noise.layer_terms(type);
            for (std::size_t ti = 0; ti < terms.size(); ++ti) {
                const double eps = terms[ti].epsilon;
                if (eps == 0.0) continue;  // can never fire; no position
                const double denom = 1.0 - 2.0 * eps;
                q_tables.push_back({(1.0 - eps) / denom, -eps / denom});
                out.position_map.push_back({step, occ, type, int(ti)});
            }
            out.layer_ranges.emplace_back(begin, uint32_t(q_tables.size()));
        }
    }
    out.model = QpdModel::proportional(q_tables);
    return out;
}

SupportGrouping support_grouping(const PecQpd& qpd, const NoiseModel& noise) {
    SupportGrouping g;
    g.n_qubits = noise.n_qubits;
    g.group_of_position.reserve(qpd.position_map.size());
    for (const QpdPositionInfo& info : qpd.position_map) {
        const PauliTerm& t = noise.layer_terms(info.layer_type)[info.term_index];
        g.group_of_position.push_back(t.is_pair() ? noise.n_qubits + t.q_lo : t.q_lo);
    }
    return g;
}

}  // namespace qpdcv
