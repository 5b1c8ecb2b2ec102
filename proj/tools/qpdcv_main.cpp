// command line front end: stage runners, reports, moment-plane grids
#include "qpdcv/archive.hpp"
#include "qpdcv/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool serial = false;
};

qpdcv::ExperimentConfig load_config(CommonArgs& a) {
    auto cfg = qpdcv::ExperimentConfig::from_json_file(a.config_path);
    if (a.seed_set) cfg.master_seed = a.seed;
    return cfg;
}

std::string config_source(const CommonArgs& a) {
    std::ifstream in(a.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_config, bool needs_out) {
    if (needs_config)
        cmd->add_option("--config", a.config_path, "experiment config (JSON)")->required();
    auto* out = cmd->add_option("--out", a.out_dir, "archive directory");
    if (needs_out) out->required();
    cmd->add_option("--seed", a.seed, "override the config master seed")
        ->each([&a](const std::string&) { a.seed_set = true; });
    cmd->add_option("--threads", a.threads, "worker threads (0 = library default)");
    cmd->add_flag("--serial", a.serial, "use the serial reference kernels");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasiprobability Monte Carlo with control variates"};
    app.require_subcommand(1);
    CommonArgs a;

    auto* c_gamma = app.add_subcommand("gamma", "print per-circuit sampling-cost summary");
    add_common(c_gamma, a, true, false);
    auto* c_sample = app.add_subcommand("sample", "draw instances and persist them");
    add_common(c_sample, a, true, true);
    auto* c_simulate = app.add_subcommand("simulate", "run trajectories for persisted instances");
    add_common(c_simulate, a, true, true);
    auto* c_estimate = app.add_subcommand("estimate", "estimate from persisted shot data");
    add_common(c_estimate, a, true, true);
    auto* c_run = app.add_subcommand("run", "full pipeline into an archive");
    add_common(c_run, a, true, true);

    auto* c_report = app.add_subcommand("report", "render report tables from an archive");
    std::string spiral_method;
    c_report->add_option("--out", a.out_dir, "archive directory")->required();
    c_report->add_option("--spiral-method", spiral_method,
                         "cv method for the depth trajectory (default: first present)");

    auto* c_heatmap = app.add_subcommand("heatmap", "moment-plane correlation grids");
    std::vector<double> gammas;
    int grid = 81;
    c_heatmap->add_option("--out", a.out_dir, "output directory")->required();
    c_heatmap->add_option("--gammas", gammas, "weight magnitudes to tabulate");
    c_heatmap->add_option("--grid", grid, "points per axis");

    CLI11_PARSE(app, argc, argv);

    try {
        const qpdcv::RunOptions options{a.threads, a.serial};
        if (c_gamma->parsed()) {
            auto cfg = load_config(a);
            auto p = qpdcv::make_pipeline(cfg);
            std::printf("circuit_id\tn_trot\tgamma\tm_nominal\tm_kept\tn_sigma_k\n");
            for (const auto& c : p.circuits) {
                const auto s = qpdcv::summarize_circuit(c);
                std::printf("%s\t%d\t%.6f\t%llu\t%llu\t%llu\n", s.circuit_id.c_str(), s.n_trot,
                            s.gamma, (unsigned long long)s.m_nominal,
                            (unsigned long long)s.m_kept, (unsigned long long)s.n_sigma_k);
            }
        } else if (c_sample->parsed()) {
            auto cfg = load_config(a);
            auto p = qpdcv::make_pipeline(cfg);
            qpdcv::sample_stage(p, cfg);
            qpdcv::save_raw_instances(a.out_dir, p);
        } else if (c_simulate->parsed()) {
            auto cfg = load_config(a);
            auto p = qpdcv::make_pipeline(cfg);
            qpdcv::load_raw_instances(a.out_dir, p);
            qpdcv::simulate_stage(p, cfg, options);
            qpdcv::save_raw_shots(a.out_dir, p, cfg);
        } else if (c_estimate->parsed()) {
            auto cfg = load_config(a);
            auto p = qpdcv::make_pipeline(cfg);
            qpdcv::load_raw_instances(a.out_dir, p);
            qpdcv::load_raw_shots(a.out_dir, p, cfg);
            const auto result = qpdcv::estimate_stage(p, cfg, options);
            qpdcv::save_meta(a.out_dir, cfg, config_source(a));
            qpdcv::save_circuits(a.out_dir, result);
            qpdcv::save_results(a.out_dir, result);
        } else if (c_run->parsed()) {
            auto cfg = load_config(a);
            const auto output = qpdcv::run_experiment(cfg, options);
            qpdcv::save_archive(a.out_dir, cfg, config_source(a), output);
        } else if (c_report->parsed()) {
            qpdcv::ReportOptions ro;
            ro.spiral_method = spiral_method;
            qpdcv::write_report(a.out_dir, ro);
        } else if (c_heatmap->parsed()) {
            qpdcv::ReportOptions ro;
            if (!gammas.empty()) ro.heatmap_gammas = gammas;
            ro.heatmap_grid = grid;
            qpdcv::write_heatmaps(a.out_dir, ro);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
