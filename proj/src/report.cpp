#include "qpdcv/report.hpp"

#include "qpdcv/controls.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace qpdcv {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw std::runtime_error("report: cannot write " + p.string());
    return f;
}

}  // namespace

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile: empty input");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percentile: p outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = p * double(values.size() - 1);
    const std::size_t lo = std::size_t(h);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - double(lo)) * (values[lo + 1] - values[lo]);
}

void write_report(const std::string& archive_dir, const ReportOptions& options) {
    const std::vector<ResultRow> rows = load_results(archive_dir);
    if (rows.empty()) throw std::runtime_error("report: no result rows");
    const fs::path out = fs::path(archive_dir) / "report";

    // method order as first encountered keeps reports stable
    std::vector<std::string> methods;
    for (const auto& r : rows)
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);

    {
        auto f = open_out(out / "percentiles.tsv");
        f << "method\tmetric\tp25\tp50\tp75\tp90\n";
        static const double kP[] = {0.25, 0.5, 0.75, 0.9};
        for (const std::string& m : methods) {
            std::vector<double> dafs, sorps;
            for (const auto& r : rows)
                if (r.method == m) {
                    dafs.push_back(r.daf);
                    sorps.push_back(r.sorp);
                }
            f << m << "\tdaf";
            for (double p : kP) f << '\t' << fmt(percentile(dafs, p));
            f << '\n' << m << "\tsorp";
            for (double p : kP) f << '\t' << fmt(percentile(sorps, p));
            f << '\n';
        }
        std::vector<double> cd, cs;
        for (const auto& r : rows)
            if (r.method == "basic") {
                cd.push_back(r.ceiling_daf);
                cs.push_back(r.ceiling_sorp);
            }
        f << "ceiling\tdaf";
        for (double p : kP) f << '\t' << fmt(percentile(cd, p));
        f << '\n' << "ceiling\tsorp";
        for (double p : kP) f << '\t' << fmt(percentile(cs, p));
        f << '\n';
    }

    {
        auto f = open_out(out / "residual_cdf.tsv");
        f << "method\tabs_residual\tempirical_cdf\thalf_normal_cdf\n";
        for (const std::string& m : methods) {
            std::vector<double> res;
            for (const auto& r : rows)
                if (r.method == m) res.push_back(std::abs(r.residual));
            std::sort(res.begin(), res.end());
            for (std::size_t i = 0; i < res.size(); ++i)
                f << m << '\t' << fmt(res[i]) << '\t'
                  << fmt(double(i + 1) / double(res.size())) << '\t'
                  << fmt(std::erf(res[i] / std::sqrt(2.0))) << '\n';
        }
    }

    {
        std::string cv = options.spiral_method;
        if (cv.empty())
            for (const std::string& m : methods)
                if (m.rfind("cv", 0) == 0) {
                    cv = m;
                    break;
                }
        // tasks keyed by circuit for the weight_1 observable in both bases
        std::set<std::string> bases;
        for (const auto& r : rows) bases.insert(r.basis);
        if (bases.count("y") && bases.count("z") && !cv.empty()) {
            auto f = open_out(out / "spiral.tsv");
            f << "circuit_id\tn_trot\tmethod\tt_y\tsigma_sq_y\tt_z\tsigma_sq_z\n";
            std::map<int, std::map<std::string, std::map<std::string, const ResultRow*>>> by_t;
            for (const auto& r : rows)
                if (r.observable == "weight_1" && (r.method == "basic" || r.method == cv))
                    by_t[r.n_trot][r.method][r.basis] = &r;
            for (const auto& [n_trot, per_method] : by_t) {
                const ResultRow* any = per_method.begin()->second.begin()->second;
                // the no-insertion reference rides on every row; emit once
                const ResultRow* ry = per_method.begin()->second.count("y")
                                          ? per_method.begin()->second.at("y")
                                          : nullptr;
                const ResultRow* rz = per_method.begin()->second.count("z")
                                          ? per_method.begin()->second.at("z")
                                          : nullptr;
                if (ry && rz)
                    f << any->circuit_id << '\t' << n_trot << "\tnopec\t" << fmt(ry->t_nopec)
                      << '\t' << fmt(ry->s2_nopec) << '\t' << fmt(rz->t_nopec) << '\t'
                      << fmt(rz->s2_nopec) << '\n';
                for (const auto& [method, per_basis] : per_method) {
                    if (!per_basis.count("y") || !per_basis.count("z")) continue;
                    const ResultRow* y = per_basis.at("y");
                    const ResultRow* z = per_basis.at("z");
                    f << y->circuit_id << '\t' << n_trot << '\t' << method << '\t'
                      << fmt(y->t_hat) << '\t' << fmt(y->sigma_sq) << '\t' << fmt(z->t_hat)
                      << '\t' << fmt(z->sigma_sq) << '\n';
                }
            }
        }
    }
}

void write_heatmaps(const std::string& out_dir, const ReportOptions& options) {
    const int n = options.heatmap_grid;
    if (n < 2) throw std::invalid_argument("heatmap: grid must be >= 2");
    for (double g : options.heatmap_gammas) {
        char name[64];
        std::snprintf(name, sizeof name, "rho2_gamma_%g.tsv", g);
        auto f = open_out(fs::path(out_dir) / "report" / name);
        f << "ex\tewx\trho2\tfeasible\n";
        for (int i = 0; i < n; ++i) {
            const double ex = -1.0 + 2.0 * double(i) / double(n - 1);
            for (int k = 0; k < n; ++k) {
                const double ewx = -1.0 + 2.0 * double(k) / double(n - 1);
                const RhoSquared r = rho_squared_weight_control(ex, ewx, g);
                f << fmt(ex) << '\t' << fmt(ewx) << '\t' << fmt(r.value) << '\t'
                  << (r.feasible ? 1 : 0) << '\n';
            }
        }
    }
}

}  // namespace qpdcv
