#include "qpdcv/controls.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

namespace qpdcv {

namespace {

// log-domain per-position normalization to unit second moment under p
void append_normalized_tables(FactorizableControl& c, const QpdModel& model,
                              const std::vector<std::vector<double>>& raw) {
    c.v.resize(model.n_positions());
    c.v_log.resize(model.n_positions());
    for (std::size_t m = 0; m < model.n_positions(); ++m) {
        const QpdTerm& t = model.term(m);
        const auto& vt = raw[m];
        double sq = 0.0;
        for (std::size_t k = 0; k < vt.size(); ++k) sq += t.p[k] * vt[k] * vt[k];
        if (sq <= 0.0) throw std::invalid_argument("cv set: zero second moment at a position");
        const double log_nf = 0.5 * std::log(sq);
        c.v[m].resize(vt.size());
        c.v_log[m].resize(vt.size());
        for (std::size_t k = 0; k < vt.size(); ++k) {
            SignedLog e = SignedLog::from_real(vt[k]) * SignedLog{+1, -log_nf};
            c.v_log[m][k] = e;
            c.v[m][k] = vt[k] / std::exp(log_nf);
        }
    }
    c.normalized = true;
}

FactorizableControl sign_product_control(std::string name, const QpdModel& model,
                                         const std::vector<int>* groups, int active_group) {
    FactorizableControl c;
    c.name = std::move(name);
    c.v.resize(model.n_positions());
    c.v_log.resize(model.n_positions());
    for (std::size_t m = 0; m < model.n_positions(); ++m) {
        const QpdTerm& t = model.term(m);
        const bool active = !groups || (*groups)[m] == active_group;
        c.v[m].resize(t.q.size());
        c.v_log[m].resize(t.q.size());
        for (std::size_t k = 0; k < t.q.size(); ++k) {
            const double s = active ? (t.q[k] > 0.0 ? 1.0 : -1.0) : 1.0;
            c.v[m][k] = s;
            c.v_log[m][k] = {s > 0.0 ? +1 : -1, 0.0};
        }
    }
    c.normalized = false;  // already unit second moment: entries are +-1
    return c;
}

void require_two_point(const QpdModel& model) {
    for (std::size_t m = 0; m < model.n_positions(); ++m)
        if (model.term(m).q.size() != 2)
            throw std::invalid_argument("cv set: needs two entries per position");
}

}  // namespace

FactorizableControl FactorizableControl::from_tables(std::string name,
                                                     std::vector<std::vector<double>> tables) {
    FactorizableControl c;
    c.name = std::move(name);
    c.v = std::move(tables);
    c.v_log.resize(c.v.size());
    for (std::size_t m = 0; m < c.v.size(); ++m) {
        c.v_log[m].resize(c.v[m].size());
        for (std::size_t k = 0; k < c.v[m].size(); ++k)
            c.v_log[m][k] = SignedLog::from_real(c.v[m][k]);
    }
    return c;
}

SignedLog evaluate_control(const FactorizableControl& c, std::span<const uint32_t> k) {
    if (k.size() != c.v_log.size())
        throw std::invalid_argument("evaluate_control: index count mismatch");
    SignedLog r{+1, 0.0};
    for (std::size_t m = 0; m < k.size(); ++m) r *= c.v_log[m][k[m]];
    return r;
}

ControlSetStats precompute_stats(const QpdModel& model,
                                 std::span<const FactorizableControl> controls,
                                 int threads) {
    const std::size_t big_m = model.n_positions();
    const std::size_t a_n = controls.size();
    for (const auto& c : controls)
        if (c.v.size() != big_m)
            throw std::invalid_argument("precompute_stats: control/model position mismatch");

    // per-position factors, filled independently then reduced in fixed order
    const std::size_t n_pair = a_n * (a_n + 1) / 2;
    std::vector<double> f_pv(big_m * a_n);    // sum_k p v_a
    std::vector<double> f_qv(big_m * a_n);    // sum_k q v_a
    std::vector<double> f_pvv(big_m * n_pair);  // sum_k p v_a v_b, a <= b

    auto body = [&](std::size_t m) {
        const QpdTerm& t = model.term(m);
        for (std::size_t a = 0; a < a_n; ++a) {
            const auto& va = controls[a].v[m];
            double pv = 0.0, qv = 0.0;
            for (std::size_t k = 0; k < t.q.size(); ++k) {
                pv += t.p[k] * va[k];
                qv += t.q[k] * va[k];
            }
            f_pv[m * a_n + a] = pv;
            f_qv[m * a_n + a] = qv;
            std::size_t pair = a * (a + 1) / 2;
            for (std::size_t b = 0; b <= a; ++b) {
                const auto& vb = controls[b].v[m];
                double pvv = 0.0;
                for (std::size_t k = 0; k < t.q.size(); ++k) pvv += t.p[k] * va[k] * vb[k];
                f_pvv[m * n_pair + pair + b] = pvv;
            }
        }
    };
    if (threads == 1) {
        for (std::size_t m = 0; m < big_m; ++m) body(m);
    } else {
        const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
        for (long long m = 0; m < (long long)big_m; ++m) body((std::size_t)m);
    }

    std::vector<SignedLog> prod_pv(a_n, SignedLog{+1, 0.0});
    std::vector<SignedLog> prod_qv(a_n, SignedLog{+1, 0.0});
    std::vector<SignedLog> prod_pvv(n_pair, SignedLog{+1, 0.0});
    for (std::size_t m = 0; m < big_m; ++m) {
        for (std::size_t a = 0; a < a_n; ++a) {
            prod_pv[a] *= SignedLog::from_real(f_pv[m * a_n + a]);
            prod_qv[a] *= SignedLog::from_real(f_qv[m * a_n + a]);
        }
        for (std::size_t pb = 0; pb < n_pair; ++pb)
            prod_pvv[pb] *= SignedLog::from_real(f_pvv[m * n_pair + pb]);
    }

    ControlSetStats s;
    s.mu_w = model.mu_w();
    const double mu_w_real = s.mu_w.to_real();
    s.mu.resize(a_n);
    s.c.resize(a_n);
    s.k = SymMatrix(a_n);
    for (std::size_t a = 0; a < a_n; ++a) {
        s.mu[a] = prod_pv[a].to_real();
        s.c[a] = prod_qv[a].to_real() - mu_w_real * s.mu[a];
    }
    for (std::size_t a = 0; a < a_n; ++a) {
        std::size_t pair = a * (a + 1) / 2;
        for (std::size_t b = 0; b <= a; ++b)
            s.k.set(a, b, prod_pvv[pair + b].to_real() - s.mu[a] * s.mu[b]);
    }

    if (a_n > 0) {
        SymEigen eig = sym_eigen(s.k);
        double max_abs = 0.0;
        for (double v : eig.values) max_abs = std::max(max_abs, std::abs(v));
        if (eig.values.front() < -1e-9 * max_abs)
            throw std::runtime_error("precompute_stats: control covariance not PSD");
    }
    s.k_pinv = sym_pseudoinverse(s.k);
    return s;
}

std::vector<FactorizableControl> build_cv_set(int kind, const QpdModel& model,
                                              const SupportGrouping* grouping,
                                              RandomStream* stream,
                                              std::span<const double> params) {
    std::vector<FactorizableControl> set;
    switch (kind) {
        case 1: {
            set.push_back(sign_product_control("sgn_w", model, nullptr, 0));
            break;
        }
        case 2:
        case 3: {
            require_two_point(model);
            static const double kTheta[] = {-1.5, -0.75, 0.0, 0.75, 1.5};
            static const double kPhi[] = {-3.0, -1.5, 0.0, 1.5, 3.0};
            std::span<const double> cs = params.empty()
                                             ? std::span<const double>(kind == 2 ? kTheta : kPhi, 5)
                                             : params;
            for (std::size_t a = 0; a < cs.size(); ++a) {
                FactorizableControl c;
                c.name = (kind == 2 ? "theta_" : "phi_") + std::to_string(a + 1);
                std::vector<std::vector<double>> raw(model.n_positions());
                for (auto& row : raw)
                    row = kind == 2
                              ? std::vector<double>{cs[a] + 1.0, cs[a] - 1.0}
                              : std::vector<double>{1.0, cs[a] - 1.0};
                append_normalized_tables(c, model, raw);
                set.push_back(std::move(c));
            }
            break;
        }
        case 4: {
            if (!grouping) throw std::invalid_argument("cv set 4: grouping required");
            if (grouping->group_of_position.size() != model.n_positions())
                throw std::invalid_argument("cv set 4: grouping size mismatch");
            const int q_n = grouping->n_qubits;
            for (int g = 0; g < 2 * q_n - 1; ++g) {
                std::string name = g < q_n ? "sgn_q" + std::to_string(g + 1)
                                           : "sgn_pair" + std::to_string(g - q_n + 1);
                set.push_back(sign_product_control(std::move(name), model,
                                                   &grouping->group_of_position, g));
            }
            set.push_back(sign_product_control("sgn_w", model, nullptr, 0));
            break;
        }
        case 5: {
            if (!stream) throw std::invalid_argument("cv set 5: stream required");
            for (int a = 0; a < 5; ++a) {
                FactorizableControl c;
                c.name = "rand_" + std::to_string(a + 1);
                std::vector<std::vector<double>> raw(model.n_positions());
                for (std::size_t m = 0; m < model.n_positions(); ++m) {
                    raw[m].resize(model.term(m).q.size());
                    for (double& e : raw[m]) e = stream->next_gaussian();
                }
                append_normalized_tables(c, model, raw);
                set.push_back(std::move(c));
            }
            break;
        }
        default:
            throw std::invalid_argument("build_cv_set: unknown kind " + std::to_string(kind));
    }
    return set;
}

std::vector<double> optimal_coefficients(const ControlSetStats& stats,
                                         std::span<const double> cov_uv) {
    const std::size_t n = stats.n_cv();
    if (cov_uv.size() != n) throw std::invalid_argument("optimal_coefficients: size mismatch");
    std::vector<double> lambda(n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) lambda[a] += stats.k_pinv(a, b) * cov_uv[b];
    return lambda;
}

RhoSquared rho_squared_weight_control(double ex, double ewx, double gamma) {
    if (!(gamma > 1.0))
        throw std::invalid_argument("rho_squared: gamma must exceed 1");
    const double g2 = gamma * gamma;
    RhoSquared r;
    const double num = g2 * ex - ewx;
    r.value = num * num / ((g2 - 1.0) * (g2 - ewx * ewx));
    // moment feasibility: the conditional mean on the negative-weight branch
    // must lie in [-1, 1]
    r.feasible = std::abs(gamma * ex - ewx) <= (gamma - 1.0);
    return r;
}

std::vector<std::vector<double>> DiagonalizedControls::rotate_rows(
    const std::vector<std::vector<double>>& v_rows) const {
    const std::size_t n = stats.n_cv();
    if (v_rows.size() != n) throw std::invalid_argument("rotate_rows: row count mismatch");
    const std::size_t len = v_rows.empty() ? 0 : v_rows[0].size();
    std::vector<std::vector<double>> out(n, std::vector<double>(len, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const double r_ba = rotation[a * n + b];  // column a = eigvec a
            if (r_ba == 0.0) continue;
            for (std::size_t i = 0; i < len; ++i) out[a][i] += r_ba * v_rows[b][i];
        }
    return out;
}

DiagonalizedControls diagonalize_controls(const ControlSetStats& stats) {
    const std::size_t n = stats.n_cv();
    SymEigen eig = sym_eigen(stats.k);

    DiagonalizedControls d;
    d.eigenvalues = eig.values;
    d.rotation = eig.vectors;
    d.stats.mu_w = stats.mu_w;
    d.stats.mu.assign(n, 0.0);
    d.stats.c.assign(n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            d.stats.mu[a] += eig.vectors[a * n + b] * stats.mu[b];
            d.stats.c[a] += eig.vectors[a * n + b] * stats.c[b];
        }
    d.stats.k = SymMatrix(n);
    d.stats.k_pinv = SymMatrix(n);
    double max_abs = 0.0;
    for (double v : eig.values) max_abs = std::max(max_abs, std::abs(v));
    for (std::size_t a = 0; a < n; ++a) {
        d.stats.k.set(a, a, eig.values[a]);
        if (std::abs(eig.values[a]) > 1e-12 * max_abs)
            d.stats.k_pinv.set(a, a, 1.0 / eig.values[a]);
    }
    return d;
}

}  // namespace qpdcv
