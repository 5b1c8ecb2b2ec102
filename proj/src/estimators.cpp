#include "qpdcv/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qpdcv {

void Dataset::validate() const {
    if (w.size() != x.size()) throw std::invalid_argument("dataset: w/x size mismatch");
    for (const auto& row : v)
        if (row.size() != x.size()) throw std::invalid_argument("dataset: control row size mismatch");
    if (!shot_var.empty() && shot_var.size() != x.size())
        throw std::invalid_argument("dataset: shot_var size mismatch");
}

double smean(std::span<const double> a) {
    if (a.empty()) throw std::invalid_argument("smean: empty");
    double s = 0.0;
    for (double v : a) s += v;
    return s / double(a.size());
}

double svar(std::span<const double> a) {
    if (a.size() < 2) throw std::invalid_argument("svar: needs N >= 2");
    const double m = smean(a);
    double s = 0.0;
    for (double v : a) s += (v - m) * (v - m);
    return s / double(a.size() - 1);
}

double scov(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("scov: size mismatch");
    if (a.size() < 2) throw std::invalid_argument("scov: needs N >= 2");
    const double ma = smean(a), mb = smean(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / double(a.size() - 1);
}

double smean_sans_one(double smean_a, std::size_t n, double a_i) {
    if (n < 2) throw std::invalid_argument("smean_sans_one: needs N >= 2");
    const double nn = double(n);
    return nn / (nn - 1.0) * smean_a - a_i / (nn - 1.0);
}

double scov_sans_one(double scov_ab, std::size_t n, double a_ci, double b_ci) {
    if (n < 3) throw std::invalid_argument("scov_sans_one: needs N >= 3");
    const double nn = double(n);
    return (nn - 1.0) / (nn - 2.0) * scov_ab - nn / ((nn - 2.0) * (nn - 1.0)) * a_ci * b_ci;
}

double smean_sans_one(std::span<const double> a, std::size_t i) {
    return smean_sans_one(smean(a), a.size(), a[i]);
}

double scov_sans_one(std::span<const double> a, std::span<const double> b, std::size_t i) {
    return scov_sans_one(scov(a, b), a.size(), a[i] - smean(a), b[i] - smean(b));
}

EstimationResult estimate_basic(const Dataset& d) {
    d.validate();
    const std::size_t n = d.n();
    if (n < 2) throw std::invalid_argument("estimate_basic: needs N >= 2");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = d.w[i] * d.x[i];
    EstimationResult r;
    r.method = "basic";
    r.n = n;
    r.t_hat = smean(y);
    r.sigma_sq = svar(y) / double(n);
    return r;
}

EstimationResult estimate_centered(const Dataset& d, double mu_w) {
    d.validate();
    const std::size_t n = d.n();
    if (n < 2) throw std::invalid_argument("estimate_centered: needs N >= 2");
    const double nn = double(n);
    const double xbar = smean(d.x);

    // Z-form: the X sample mean is factored out before weighting, so the
    // weight fluctuation multiplies only the X residuals.
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = (nn * d.w[i] - mu_w) / (nn - 1.0) * (d.x[i] - xbar);

    EstimationResult r;
    r.method = "centered";
    r.n = n;
    r.t_hat = smean(z) + mu_w * xbar;
    const double c_xw = scov(d.x, d.w);
    r.sigma_sq = svar(z) / nn + c_xw * c_xw / ((nn - 1.0) * (nn - 1.0));
    return r;
}

EstimationResult estimate_cv(const Dataset& d, const ControlSetStats& stats) {
    d.validate();
    const std::size_t n = d.n();
    const std::size_t a_n = stats.n_cv();
    if (n < 4) throw std::invalid_argument("estimate_cv: needs N >= 4");
    if (a_n == 0 || d.v.size() != a_n)
        throw std::invalid_argument("estimate_cv: control rows do not match stats");

    const double nn = double(n);
    const double xbar = smean(d.x);

    // G_a = W (V_a - mu_a) and its sample moments
    std::vector<std::vector<double>> g(a_n, std::vector<double>(n));
    std::vector<double> gbar(a_n), cov_xg(a_n);
    for (std::size_t a = 0; a < a_n; ++a) {
        for (std::size_t i = 0; i < n; ++i) g[a][i] = d.w[i] * (d.v[a][i] - stats.mu[a]);
        gbar[a] = smean(g[a]);
        cov_xg[a] = scov(d.x, g[a]);
    }

    const std::vector<double> lambda = optimal_coefficients(stats, stats.c);

    std::vector<double> z(n), y(n), w_res(n);
    std::vector<std::vector<double>> l(a_n, std::vector<double>(n));
    std::vector<double> s_loo(a_n), kp_s(a_n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r_i = d.x[i] - xbar;

        double shift = 0.0;
        for (std::size_t b = 0; b < a_n; ++b) shift += lambda[b] * (d.v[b][i] - stats.mu[b]);
        w_res[i] = d.w[i] - shift;

        // leave-one-out covariance of (X, G_a), closed form
        for (std::size_t a = 0; a < a_n; ++a)
            s_loo[a] = scov_sans_one(cov_xg[a], n, r_i, g[a][i] - gbar[a]);
        for (std::size_t a = 0; a < a_n; ++a) {
            double acc = 0.0;
            for (std::size_t b = 0; b < a_n; ++b) acc += stats.k_pinv(a, b) * s_loo[b];
            kp_s[a] = acc;
        }
        double corr = 0.0;
        for (std::size_t b = 0; b < a_n; ++b) corr += kp_s[b] * (d.v[b][i] - stats.mu[b]);

        z[i] = (nn * d.w[i] - w_res[i]) / (nn - 1.0) * r_i - corr;
        y[i] = z[i] + w_res[i] * xbar;
        for (std::size_t a = 0; a < a_n; ++a)
            l[a][i] = r_i / (nn - 1.0) * ((nn - 2.0) * stats.c[a] + nn * (g[a][i] - gbar[a]));
    }

    EstimationResult r;
    r.method = "cv";
    r.n = n;
    r.n_cv = a_n;
    r.t_hat = smean(z) + smean(w_res) * xbar;

    double corr_var = 0.0;
    for (std::size_t a = 0; a < a_n; ++a)
        for (std::size_t b = 0; b < a_n; ++b) {
            const double kp = stats.k_pinv(a, b);
            if (kp != 0.0) corr_var += kp * scov(l[a], l[b]);
        }
    r.sigma_sq = svar(y) / nn + corr_var / ((nn - 2.0) * (nn - 3.0));
    if (r.sigma_sq < 0.0) r.sigma_sq = 0.0;  // guards FP residue; both pieces are PSD forms
    return r;
}

VarianceDecomposition variance_decomposition(std::span<const double> w,
                                             std::span<const double> x,
                                             std::span<const double> shot_var,
                                             double n_shots_effective) {
    if (w.size() != x.size() || w.size() != shot_var.size())
        throw std::invalid_argument("variance_decomposition: size mismatch");
    if (w.size() < 2) throw std::invalid_argument("variance_decomposition: needs N >= 2");
    if (!(n_shots_effective > 0))
        throw std::invalid_argument("variance_decomposition: needs n_shots > 0");

    std::vector<double> wx(w.size()), intra_terms(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        wx[i] = w[i] * x[i];
        intra_terms[i] = w[i] * w[i] * shot_var[i] / n_shots_effective;
    }

    VarianceDecomposition out;
    out.svar_wx = svar(wx);
    out.intra = smean(intra_terms);
    out.inter = std::max(0.0, out.svar_wx - out.intra);
    out.ceiling_unbounded = out.intra < 1e-15 * out.svar_wx;
    if (out.ceiling_unbounded) {
        out.ceiling_daf = std::numeric_limits<double>::infinity();
        out.ceiling_sorp = 100.0;
    } else {
        out.ceiling_daf = out.svar_wx / out.intra;
        out.ceiling_sorp = (1.0 - out.intra / out.svar_wx) * 100.0;
    }
    return out;
}

double daf(double sigma_sq_basic, double sigma_sq_method) {
    return sigma_sq_basic / sigma_sq_method;
}

double sorp(double sigma_sq_basic, double sigma_sq_method) {
    return (1.0 - sigma_sq_method / sigma_sq_basic) * 100.0;
}

double studentized_residual(double t, double sigma_sq, double t_ref, double sigma_sq_ref) {
    return (t - t_ref) / std::sqrt(sigma_sq + sigma_sq_ref);
}

}  // namespace qpdcv
