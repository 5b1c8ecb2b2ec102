#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace qpdcv;

namespace {

// fixed two-position model with mixed-sign coefficients for exhaustive work
QpdModel tiny_model() { return QpdModel::proportional({{0.7, -0.3}, {0.6, -0.2}}); }

double exact_target(const QpdModel& m) {
    double t = 0;
    for (const auto& o : tu::enumerate_outcomes(m)) {
        double qp = 1.0;
        for (std::size_t pos = 0; pos < m.n_positions(); ++pos) qp *= m.term(pos).q[o.k[pos]];
        t += qp * tu::x_of(o.k);
    }
    return t;
}

ControlSetStats transformed_stats(const ControlSetStats& s, const std::vector<double>& mat,
                                  const std::vector<double>& alpha) {
    const std::size_t n = s.n_cv();
    ControlSetStats out;
    out.mu_w = s.mu_w;
    out.mu.assign(n, 0.0);
    out.c.assign(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        out.mu[a] = alpha[a];
        for (std::size_t b = 0; b < n; ++b) {
            out.mu[a] += mat[a * n + b] * s.mu[b];
            out.c[a] += mat[a * n + b] * s.c[b];
        }
    }
    out.k = SymMatrix(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            double acc = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    acc += mat[a * n + i] * s.k(i, j) * mat[b * n + j];
            out.k.set(a, b, acc);
        }
    out.k_pinv = sym_pseudoinverse(out.k);
    return out;
}

}  // namespace

TEST_CASE("sample statistics, by hand") {
    const std::vector<double> a{1, 2, 3}, b{1, 2, 3}, c{0.5, 0.7};
    CHECK(smean(c) == doctest::Approx(0.6));
    CHECK(svar(std::vector<double>{1, 1, 1}) == doctest::Approx(0.0));
    CHECK(scov(a, b) == doctest::Approx(1.0));
    CHECK_THROWS_AS(svar(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(scov(a, c), std::invalid_argument);
}

TEST_CASE("leave-one-out closed forms equal literal removal") {
    RandomStream rng(2);
    std::vector<double> a(20), b(20);
    for (auto& e : a) e = rng.next_uniform() * 4 - 2;
    for (auto& e : b) e = rng.next_uniform() * 4 - 2;
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(smean_sans_one(a, i) == doctest::Approx(tu::mean_removed(a, i)).epsilon(1e-12));
        CHECK(scov_sans_one(a, b, i) == doctest::Approx(tu::cov_removed(a, b, i)).epsilon(1e-12));
    }
    CHECK(smean_sans_one(std::vector<double>{1, 2, 3}, 1) == doctest::Approx(2.0));

    const std::vector<double> fixed(6, 1.25);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(scov_sans_one(fixed, fixed, i) == doctest::Approx(0.0));

    CHECK_THROWS_AS(smean_sans_one(std::vector<double>{1.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(scov_sans_one(std::vector<double>{1, 2}, std::vector<double>{3, 4}, 0),
                    std::invalid_argument);
}

TEST_CASE("basic estimator, by hand and with degenerate input") {
    Dataset d;
    d.w = {1, 1};
    d.x = {0.5, 0.7};
    const EstimationResult r = estimate_basic(d);
    CHECK(r.t_hat == doctest::Approx(0.6));
    CHECK(r.sigma_sq == doctest::Approx(0.01));

    Dataset c;
    c.w = {2, -1, 0.5, 1.5};
    c.x = {0.3, 0.3, 0.3, 0.3};
    CHECK(estimate_basic(c).t_hat == doctest::Approx(0.3 * smean(c.w)));

    Dataset bad;
    bad.w = {1};
    bad.x = {1};
    CHECK_THROWS_AS(estimate_basic(bad), std::invalid_argument);
    bad.x = {1, 2};
    CHECK_THROWS_AS(estimate_basic(bad), std::invalid_argument);
}

TEST_CASE("centered estimator: constant weight, hand example, transcription oracle") {
    Dataset d;
    d.w = {1.5, 1.5, 1.5};
    d.x = {0.1, 0.5, 0.3};
    const EstimationResult r = estimate_centered(d, 1.5);
    CHECK(r.t_hat == doctest::Approx(1.5 * 0.3));
    CHECK(r.sigma_sq == doctest::Approx(1.5 * 1.5 * svar(d.x) / 3.0));

    Dataset e;
    e.w = {2, -2, 2};
    e.x = {0.1, 0.3, 0.2};
    const EstimationResult re = estimate_centered(e, 1.0);
    const tu::NaiveCv oracle = tu::naive_centered(e, 1.0);
    CHECK(re.t_hat == doctest::Approx(oracle.t_hat).epsilon(1e-12));
    CHECK(re.sigma_sq == doctest::Approx(oracle.sigma_sq).epsilon(1e-12));

    RandomStream rng(4);
    const QpdModel m = tiny_model();
    for (int trial = 0; trial < 30; ++trial) {
        Dataset ds = tu::sample_dataset(m, {}, 12, rng, 0.1);
        const double mu_w = m.mu_w().to_real();
        const EstimationResult got = estimate_centered(ds, mu_w);
        const tu::NaiveCv want = tu::naive_centered(ds, mu_w);
        CHECK(got.t_hat == doctest::Approx(want.t_hat).epsilon(1e-12));
        CHECK(got.sigma_sq == doctest::Approx(want.sigma_sq).epsilon(1e-12));
    }
}

TEST_CASE("cv estimator equals the removal-based transcription") {
    RandomStream rng(6);
    const QpdModel m = tu::random_model(rng, 3, 2);
    const auto set1 = build_cv_set(1, m);
    const auto set3 = build_cv_set(3, m);
    for (const auto* set : {&set1, &set3}) {
        const ControlSetStats stats = precompute_stats(m, *set);
        for (int n : {5, 10, 50}) {
            for (int trial = 0; trial < 10; ++trial) {
                Dataset d = tu::sample_dataset(m, *set, n, rng, 0.1);
                const EstimationResult got = estimate_cv(d, stats);
                const tu::NaiveCv want = tu::naive_cv(d, stats);
                CHECK(got.t_hat == doctest::Approx(want.t_hat).epsilon(1e-11));
                CHECK(got.sigma_sq ==
                      doctest::Approx(std::max(want.sigma_sq, 0.0)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("cv estimator preconditions") {
    const QpdModel m = tiny_model();
    const auto set = build_cv_set(1, m);
    const ControlSetStats stats = precompute_stats(m, set);
    RandomStream rng(8);
    Dataset d = tu::sample_dataset(m, set, 3, rng);
    CHECK_THROWS_AS(estimate_cv(d, stats), std::invalid_argument);  // N < 4
    d = tu::sample_dataset(m, set, 6, rng);
    d.v.clear();
    CHECK_THROWS_AS(estimate_cv(d, stats), std::invalid_argument);  // missing rows
}

TEST_CASE("degenerate controls collapse the cv estimator to the basic one") {
    RandomStream rng(10);
    const QpdModel m = tiny_model();
    Dataset d = tu::sample_dataset(m, {}, 16, rng, 0.05);
    d.v = {std::vector<double>(16, 0.4)};  // V identically equal to its mean

    ControlSetStats stats;
    stats.mu_w = m.mu_w();
    stats.mu = {0.4};
    stats.c = {0.0};
    stats.k = SymMatrix(1);
    stats.k_pinv = sym_pseudoinverse(stats.k);

    const EstimationResult cv = estimate_cv(d, stats);
    const EstimationResult basic = estimate_basic(d);
    CHECK(cv.t_hat == doctest::Approx(basic.t_hat).epsilon(1e-12));
    CHECK(cv.sigma_sq == doctest::Approx(basic.sigma_sq).epsilon(1e-12));
}

TEST_CASE("control equal to the weight pins the residual weight at its mean") {
    RandomStream rng(12);
    const QpdModel m = tu::random_model(rng, 3, 2);
    const auto outs = tu::enumerate_outcomes(m);
    const double mu_w = m.mu_w().to_real();

    // stats for the control V = W itself: C = K = Var[W]
    const double ew2 = tu::expect(outs, [](const tu::Outcome& o) { return o.weight * o.weight; });
    const double var_w = ew2 - mu_w * mu_w;
    ControlSetStats stats;
    stats.mu_w = m.mu_w();
    stats.mu = {mu_w};
    stats.c = {var_w};
    stats.k = SymMatrix(1);
    stats.k.set(0, 0, var_w);
    stats.k_pinv = sym_pseudoinverse(stats.k);

    const auto lambda = optimal_coefficients(stats, stats.c);
    CHECK(lambda[0] == doctest::Approx(1.0).epsilon(1e-12));
    // hence w - lambda (v - mu) = mu_w identically; the estimator is then
    // exactly shift invariant
    Dataset d = tu::sample_dataset(m, {}, 12, rng, 0.1);
    d.v = {d.w};
    const EstimationResult r0 = estimate_cv(d, stats);
    Dataset shifted = d;
    for (double& x : shifted.x) x += 2.5;
    const EstimationResult r1 = estimate_cv(shifted, stats);
    CHECK(r1.t_hat - r0.t_hat == doctest::Approx(2.5 * mu_w).epsilon(1e-9));
    CHECK(r1.sigma_sq == doctest::Approx(r0.sigma_sq).epsilon(1e-9));
}

TEST_CASE("all three estimators are exactly unbiased, by dataset enumeration") {
    const QpdModel m = tiny_model();
    const auto outs = tu::enumerate_outcomes(m);
    REQUIRE(outs.size() == 4);
    const double target = exact_target(m);
    const double mu_w = m.mu_w().to_real();
    const auto xfun = [](const tu::Outcome& o) { return tu::x_of(o.k); };

    double e_basic = 0;
    tu::for_each_dataset(outs, 2, [&](std::span<const std::size_t> idx, double prob) {
        e_basic += prob * estimate_basic(tu::make_dataset(outs, idx, xfun, {})).t_hat;
    });
    CHECK(std::abs(e_basic - target) < 1e-10);

    double e_centered = 0;
    tu::for_each_dataset(outs, 3, [&](std::span<const std::size_t> idx, double prob) {
        e_centered += prob * estimate_centered(tu::make_dataset(outs, idx, xfun, {}), mu_w).t_hat;
    });
    CHECK(std::abs(e_centered - target) < 1e-10);

    const auto set = build_cv_set(1, m);
    const ControlSetStats stats = precompute_stats(m, set);
    double e_cv = 0;
    tu::for_each_dataset(outs, 4, [&](std::span<const std::size_t> idx, double prob) {
        e_cv += prob * estimate_cv(tu::make_dataset(outs, idx, xfun, set), stats).t_hat;
    });
    CHECK(std::abs(e_cv - target) < 1e-10);
}

TEST_CASE("permutation and scale invariance of every estimator") {
    RandomStream rng(14);
    const QpdModel m = tu::random_model(rng, 3, 2);
    const auto set = build_cv_set(3, m);
    const ControlSetStats stats = precompute_stats(m, set);
    const double mu_w = m.mu_w().to_real();

    for (int trial = 0; trial < 25; ++trial) {
        Dataset d = tu::sample_dataset(m, set, 14, rng, 0.1);
        const EstimationResult b0 = estimate_basic(d);
        const EstimationResult c0 = estimate_centered(d, mu_w);
        const EstimationResult v0 = estimate_cv(d, stats);

        std::vector<std::size_t> perm(d.n());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Dataset p;
        p.v.resize(d.v.size());
        for (std::size_t i : perm) {
            p.x.push_back(d.x[i]);
            p.w.push_back(d.w[i]);
            for (std::size_t a = 0; a < d.v.size(); ++a) p.v[a].push_back(d.v[a][i]);
        }
        CHECK(estimate_basic(p).t_hat == doctest::Approx(b0.t_hat).epsilon(1e-12));
        CHECK(estimate_basic(p).sigma_sq == doctest::Approx(b0.sigma_sq).epsilon(1e-12));
        CHECK(estimate_centered(p, mu_w).t_hat == doctest::Approx(c0.t_hat).epsilon(1e-12));
        CHECK(estimate_centered(p, mu_w).sigma_sq == doctest::Approx(c0.sigma_sq).epsilon(1e-12));
        CHECK(estimate_cv(p, stats).t_hat == doctest::Approx(v0.t_hat).epsilon(1e-12));
        CHECK(estimate_cv(p, stats).sigma_sq == doctest::Approx(v0.sigma_sq).epsilon(1e-12));

        const double a = -2.5;
        Dataset s = d;
        for (double& x : s.x) x *= a;
        CHECK(estimate_basic(s).t_hat == doctest::Approx(a * b0.t_hat).epsilon(1e-12));
        CHECK(estimate_basic(s).sigma_sq == doctest::Approx(a * a * b0.sigma_sq).epsilon(1e-12));
        CHECK(estimate_centered(s, mu_w).t_hat == doctest::Approx(a * c0.t_hat).epsilon(1e-12));
        CHECK(estimate_centered(s, mu_w).sigma_sq ==
              doctest::Approx(a * a * c0.sigma_sq).epsilon(1e-12));
        CHECK(estimate_cv(s, stats).t_hat == doctest::Approx(a * v0.t_hat).epsilon(1e-12));
        CHECK(estimate_cv(s, stats).sigma_sq ==
              doctest::Approx(a * a * v0.sigma_sq).epsilon(1e-12));
    }
}

TEST_CASE("shift invariance: centered always, cv when the weight sign is in the set") {
    RandomStream rng(16);
    const QpdModel m = tu::random_model(rng, 3, 2);
    const double mu_w = m.mu_w().to_real();
    const auto set = build_cv_set(1, m);  // contains sgn W: span condition holds
    const ControlSetStats stats = precompute_stats(m, set);

    for (int trial = 0; trial < 20; ++trial) {
        Dataset d = tu::sample_dataset(m, set, 12, rng, 0.1);
        const double delta = rng.next_uniform() * 4 - 2;
        Dataset s = d;
        for (double& x : s.x) x += delta;

        const EstimationResult c0 = estimate_centered(d, mu_w), c1 = estimate_centered(s, mu_w);
        CHECK(c1.t_hat - c0.t_hat == doctest::Approx(delta * mu_w).epsilon(1e-9));
        CHECK(c1.sigma_sq == doctest::Approx(c0.sigma_sq).epsilon(1e-9));

        const EstimationResult v0 = estimate_cv(d, stats), v1 = estimate_cv(s, stats);
        CHECK(v1.t_hat - v0.t_hat == doctest::Approx(delta * mu_w).epsilon(1e-9));
        CHECK(v1.sigma_sq == doctest::Approx(v0.sigma_sq).epsilon(1e-9));
    }
}

TEST_CASE("cv estimates are invariant under invertible control transforms") {
    RandomStream rng(18);
    const QpdModel m = tu::random_model(rng, 3, 2);
    const auto set = build_cv_set(3, m);
    std::vector<FactorizableControl> two(set.begin(), set.begin() + 2);
    const ControlSetStats stats = precompute_stats(m, two);

    int tested = 0;
    while (tested < 20) {
        std::vector<double> mat(4);
        for (double& e : mat) e = rng.next_uniform() * 4 - 2;
        if (std::abs(mat[0] * mat[3] - mat[1] * mat[2]) < 0.2) continue;
        ++tested;
        const std::vector<double> alpha{rng.next_uniform() - 0.5, rng.next_uniform() - 0.5};

        Dataset d = tu::sample_dataset(m, two, 24, rng, 0.1);
        Dataset t = d;
        for (std::size_t i = 0; i < d.n(); ++i) {
            t.v[0][i] = mat[0] * d.v[0][i] + mat[1] * d.v[1][i] + alpha[0];
            t.v[1][i] = mat[2] * d.v[0][i] + mat[3] * d.v[1][i] + alpha[1];
        }
        const ControlSetStats tstats = transformed_stats(stats, mat, alpha);
        const EstimationResult r0 = estimate_cv(d, stats);
        const EstimationResult r1 = estimate_cv(t, tstats);
        CHECK(r1.t_hat == doctest::Approx(r0.t_hat).epsilon(1e-9));
        CHECK(r1.sigma_sq == doctest::Approx(r0.sigma_sq).epsilon(1e-9));
    }
}

TEST_CASE("pairwise-difference form of the coefficient-noise covariance") {
    // The per-datapoint statistics L and F differ by an i-independent
    // additive term, so their sample covariance matrices must match.
    RandomStream rng(20);
    const QpdModel m = tu::random_model(rng, 3, 2);
    const auto set = build_cv_set(3, m);
    std::vector<FactorizableControl> two(set.begin(), set.begin() + 2);
    const ControlSetStats stats = precompute_stats(m, two);

    for (int n : {5, 10, 50}) {
        for (int trial = 0; trial < 10; ++trial) {
            Dataset d = tu::sample_dataset(m, two, n, rng, 0.1);
            const double nn = double(n);
            const double xbar = tu::nmean(d.x);

            for (std::size_t a = 0; a < 2; ++a) {
                std::vector<double> g(n), l(n), f(n);
                for (int i = 0; i < n; ++i) g[i] = d.w[i] * (d.v[a][i] - stats.mu[a]);
                const double gbar = tu::nmean(g);
                for (int i = 0; i < n; ++i) {
                    l[i] = (d.x[i] - xbar) / (nn - 1.0) *
                           ((nn - 2.0) * stats.c[a] + nn * (g[i] - gbar));
                    double sum = 0;
                    for (int j = 0; j < n; ++j) {
                        if (j == i) continue;
                        sum += (d.x[i] - d.x[j]) * (g[i] - g[j]) +
                               (d.x[i] + d.x[j]) * stats.c[a];
                    }
                    f[i] = sum / (nn - 1.0);
                }
                const double cov_ll = tu::ncov(l, l), cov_ff = tu::ncov(f, f);
                CHECK(cov_ll == doctest::Approx(cov_ff).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("variance split: deterministic instances give a pure inter split") {
    const std::vector<double> w{1, -1, 2, 0.5}, x{0.2, 0.4, -0.1, 0.3};
    const std::vector<double> zero(4, 0.0);
    const VarianceDecomposition vd = variance_decomposition(w, x, zero, 100.0);
    CHECK(vd.intra == 0.0);
    CHECK(vd.ceiling_unbounded);
    CHECK(std::isinf(vd.ceiling_daf));
    CHECK(vd.ceiling_sorp == 100.0);
    CHECK(vd.inter == doctest::Approx(vd.svar_wx));
}

TEST_CASE("variance split recovers a known two-level synthetic decomposition") {
    RandomStream rng(22);
    const double sd_between = 0.3, sd_within = 0.5;
    const int n_inst = 80, n_shots = 30, repeats = 200;
    double sum_inter = 0, sum_intra = 0;
    for (int r = 0; r < repeats; ++r) {
        std::vector<double> w(n_inst, 1.0), xbar(n_inst), sv(n_inst);
        for (int i = 0; i < n_inst; ++i) {
            const double mu_i = sd_between * rng.next_gaussian();
            std::vector<double> shots(n_shots);
            for (double& s : shots) s = mu_i + sd_within * rng.next_gaussian();
            xbar[i] = tu::nmean(shots);
            sv[i] = tu::nvar(shots);
        }
        const VarianceDecomposition vd = variance_decomposition(w, xbar, sv, double(n_shots));
        sum_inter += vd.inter;
        sum_intra += vd.intra;
    }
    const double want_intra = sd_within * sd_within / n_shots;
    const double want_inter = sd_between * sd_between;
    CHECK(std::abs(sum_intra / repeats - want_intra) < 0.1 * want_intra);
    CHECK(std::abs(sum_inter / repeats - want_inter) < 0.1 * want_inter);
}

TEST_CASE("a perfect conditional-mean control leaves only within-instance variance") {
    // Exhaustive joint: index tuple k, then X = x(k) +- d(k) with equal odds.
    const QpdModel m = tiny_model();
    const auto outs = tu::enumerate_outcomes(m);
    const auto d_of = [](const tu::Outcome& o) { return 0.1 + 0.2 * tu::x_of(o.k) * tu::x_of(o.k); };

    double eu = 0, eu2 = 0, ev = 0, ev2 = 0, euv = 0, target = 0;
    for (const auto& o : outs) {
        const double v = o.weight * tu::x_of(o.k);  // W E[X|k]
        for (double sgn : {+1.0, -1.0}) {
            const double x = tu::x_of(o.k) + sgn * d_of(o);
            const double u = o.weight * x;
            const double p = o.prob * 0.5;
            eu += p * u;
            eu2 += p * u * u;
            ev += p * v;
            ev2 += p * v * v;
            euv += p * u * v;
        }
        target += o.prob * o.weight * o.weight * d_of(o) * d_of(o);  // E[W^2 Var[X|k]]
    }
    const double var_u = eu2 - eu * eu, var_v = ev2 - ev * ev, cov_uv = euv - eu * ev;
    const double residual = var_u - cov_uv * cov_uv / var_v;
    CHECK(residual == doctest::Approx(target).epsilon(1e-9));
}

TEST_CASE("reporting metric arithmetic") {
    CHECK(daf(0.4, 0.4) == doctest::Approx(1.0));
    CHECK(sorp(0.4, 0.4) == doctest::Approx(0.0));
    CHECK(daf(0.4, 0.1) == doctest::Approx(4.0));
    CHECK(sorp(0.4, 0.1) == doctest::Approx(75.0));
    CHECK(studentized_residual(0.5, 0.02, 0.5, 0.02) == doctest::Approx(0.0));
    CHECK(studentized_residual(0.8, 0.03, 0.5, 0.01) == doctest::Approx(0.3 / 0.2));
}
