// Compares the serial reference trajectory kernel with the OpenMP one on the
// same sampled instances. The two must agree bit for bit; per-instance and
// per-shot streams are derived, not shared, so the schedule cannot leak in.
#include "qpdcv/experiment.hpp"
#include "qpdcv/simulator.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <string>

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel trajectory kernel benchmark"};
    std::string noise_file = "data/noise_params_4q.txt";
    int n_qubits = 4, n_trot = 4, n_instances = 512, n_shots = 64, threads = 0, repeats = 3;
    app.add_option("--noise-file", noise_file);
    app.add_option("--qubits", n_qubits);
    app.add_option("--trot", n_trot);
    app.add_option("--instances", n_instances);
    app.add_option("--shots", n_shots);
    app.add_option("--threads", threads, "0 = all available");
    app.add_option("--repeats", repeats);
    CLI11_PARSE(app, argc, argv);

    try {
        qpdcv::ExperimentConfig cfg;
        cfg.qubits = n_qubits;
        cfg.n_trot_list = {n_trot};
        cfg.n_instances = n_instances;
        cfg.n_shots = n_shots;
        cfg.noise_file = noise_file;

        auto p = qpdcv::make_pipeline(cfg);
        qpdcv::sample_stage(p, cfg);
        auto& c = p.circuits.front();
        const auto base = qpdcv::derive_stream(cfg.master_seed, "circuit", n_qubits, n_trot,
                                               "traj", "bench");

        std::vector<qpdcv::InstanceResult> serial_out(c.instances.size());
        std::vector<qpdcv::InstanceResult> parallel_out(c.instances.size());
        double t_serial = 1e300, t_parallel = 1e300;  // best of `repeats`
        for (int r = 0; r < repeats; ++r) {
            auto t0 = Clock::now();
            qpdcv::simulate_instances_serial(c.circuit, p.noise, c.qpd, c.instances,
                                             qpdcv::MeasBasis::z, n_shots, p.observables, base,
                                             serial_out);
            t_serial = std::min(t_serial, seconds_since(t0));

            t0 = Clock::now();
            qpdcv::simulate_instances_parallel(c.circuit, p.noise, c.qpd, c.instances,
                                               qpdcv::MeasBasis::z, n_shots, p.observables, base,
                                               parallel_out, threads);
            t_parallel = std::min(t_parallel, seconds_since(t0));
        }

        bool identical = serial_out.size() == parallel_out.size();
        for (size_t i = 0; identical && i < serial_out.size(); ++i)
            identical = serial_out[i].mean == parallel_out[i].mean &&
                        serial_out[i].shot_var == parallel_out[i].shot_var;

        const double shots_total = double(n_instances) * n_shots;
        std::printf("workload: %d qubits, %d steps, %d instances x %d shots\n", n_qubits, n_trot,
                    n_instances, n_shots);
        std::printf("serial:   %.3fs  (%.0f shots/s)\n", t_serial, shots_total / t_serial);
        std::printf("parallel: %.3fs  (%.0f shots/s)  speedup %.2fx\n", t_parallel,
                    shots_total / t_parallel, t_serial / t_parallel);
        std::printf("outputs bitwise identical: %s\n", identical ? "yes" : "NO");
        return identical ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
