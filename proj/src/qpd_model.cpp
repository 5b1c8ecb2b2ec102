#include "qpdcv/qpd_model.hpp"

#include <cmath>
#include <stdexcept>

namespace qpdcv {

namespace {

void validate_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("qpd model: non-finite ") + what);
}

QpdTerm make_term(const std::vector<double>& q_row, const std::vector<double>* p_row) {
    if (q_row.empty()) throw std::invalid_argument("qpd model: empty coefficient row");
    if (p_row) {
        if (p_row->size() != q_row.size())
            throw std::invalid_argument("qpd model: p row size mismatch");
        double sum = 0.0;
        for (double p : *p_row) {
            validate_finite(p, "sampling probability");
            if (p <= 0.0) throw std::invalid_argument("qpd model: sampling probability <= 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("qpd model: sampling row does not sum to 1");
    }

    QpdTerm t;
    for (uint32_t k = 0; k < q_row.size(); ++k) {
        validate_finite(q_row[k], "coefficient");
        if (q_row[k] == 0.0) continue;  // dropped; cannot contribute
        t.q.push_back(q_row[k]);
        t.original_index.push_back(k);
        t.gamma += std::abs(q_row[k]);
        t.q_sum += q_row[k];
        if (p_row) t.p.push_back((*p_row)[k]);
    }
    if (t.q.empty())
        throw std::invalid_argument("qpd model: position with all-zero coefficients");

    if (p_row) {
        double kept = 0.0;
        for (double p : t.p) kept += p;
        for (double& p : t.p) p /= kept;
    } else {
        for (double qk : t.q) t.p.push_back(std::abs(qk) / t.gamma);
    }

    for (std::size_t k = 0; k < t.q.size(); ++k)
        t.w.push_back(SignedLog::from_real(t.q[k]) * SignedLog{+1, -std::log(t.p[k])});
    return t;
}

}  // namespace

QpdModel QpdModel::proportional(const std::vector<std::vector<double>>& q_tables) {
    QpdModel m;
    m.terms_.reserve(q_tables.size());
    for (const auto& row : q_tables) m.terms_.push_back(make_term(row, nullptr));
    return m;
}

QpdModel QpdModel::with_sampling_tables(const std::vector<std::vector<double>>& q_tables,
                                        const std::vector<std::vector<double>>& p_tables) {
    if (q_tables.size() != p_tables.size())
        throw std::invalid_argument("qpd model: q/p table count mismatch");
    QpdModel m;
    m.terms_.reserve(q_tables.size());
    for (std::size_t i = 0; i < q_tables.size(); ++i)
        m.terms_.push_back(make_term(q_tables[i], &p_tables[i]));
    return m;
}

SignedLog QpdModel::mu_w() const {
    SignedLog r{+1, 0.0};
    for (const QpdTerm& t : terms_) r *= SignedLog::from_real(t.q_sum);
    return r;
}

double QpdModel::gamma() const {
    double log_g = 0.0;
    for (const QpdTerm& t : terms_) log_g += std::log(t.gamma);
    return std::exp(log_g);
}

SignedLog QpdModel::log_n_pi_k() const {
    SignedLog r{+1, 0.0};
    for (const QpdTerm& t : terms_) r *= SignedLog::from_real(double(t.q.size()));
    return r;
}

uint64_t QpdModel::n_sigma_k() const {
    uint64_t n = 0;
    for (const QpdTerm& t : terms_) n += t.q.size();
    return n;
}

SampledInstance QpdModel::sample(RandomStream& stream) const {
    SampledInstance inst;
    inst.k.reserve(terms_.size());
    inst.weight = {+1, 0.0};
    for (const QpdTerm& t : terms_) {
        const double u = stream.next_uniform();
        double cum = 0.0;
        uint32_t k = uint32_t(t.p.size()) - 1;  // guards the u ~ 1 edge
        for (uint32_t i = 0; i < t.p.size(); ++i) {
            cum += t.p[i];
            if (u < cum) {
                k = i;
                break;
            }
        }
        inst.k.push_back(k);
        inst.weight *= t.w[k];
    }
    return inst;
}

}  // namespace qpdcv
