#include "qpdcv/experiment.hpp"

#include <cmath>
#include <stdexcept>

namespace qpdcv {

namespace {

RandomStream circuit_stream(const ExperimentConfig& config, const CircuitData& c) {
    return derive_stream(config.master_seed, "circuit", uint64_t(config.qubits),
                         uint64_t(c.n_trot));
}

}  // namespace

Pipeline make_pipeline(const ExperimentConfig& config) {
    config.validate();
    Pipeline p;
    p.noise = load_noise_params(config.noise_file);
    if (p.noise.n_qubits != config.qubits)
        throw std::runtime_error("experiment: noise table is for " +
                                 std::to_string(p.noise.n_qubits) + " qubits, config wants " +
                                 std::to_string(config.qubits));
    for (const auto& name : config.observables)
        p.observables.push_back(Observable::parse(name, config.qubits));

    for (int n_trot : config.n_trot_list) {
        CircuitData c;
        c.circuit_id = "q" + std::to_string(config.qubits) + "_t" + std::to_string(n_trot);
        c.n_trot = n_trot;
        c.circuit = Circuit::build({config.qubits, n_trot, config.h, config.j, config.dt});
        c.qpd = build_qpd(p.noise, n_trot);
        p.circuits.push_back(std::move(c));
    }
    return p;
}

void sample_stage(Pipeline& p, const ExperimentConfig& config) {
    for (CircuitData& c : p.circuits) {
        const RandomStream base = circuit_stream(config, c).child("pec");
        c.instances.clear();
        c.instances.reserve(config.n_instances);
        for (int i = 0; i < config.n_instances; ++i) {
            RandomStream s = base.child(uint64_t(i));
            c.instances.push_back(c.qpd.model.sample(s));
        }
    }
}

void simulate_stage(Pipeline& p, const ExperimentConfig& config, const RunOptions& options) {
    for (CircuitData& c : p.circuits) {
        if (c.instances.size() != std::size_t(config.n_instances))
            throw std::runtime_error("simulate_stage: instances missing for " + c.circuit_id);
        const RandomStream circ = circuit_stream(config, c);
        for (MeasBasis basis : config.bases) {
            const RandomStream traj = circ.child("traj").child(basis_name(basis));
            auto& out = c.sim[basis];
            out.assign(c.instances.size(), {});
            if (options.serial)
                simulate_instances_serial(c.circuit, p.noise, c.qpd, c.instances, basis,
                                          config.n_shots, p.observables, traj, out);
            else
                simulate_instances_parallel(c.circuit, p.noise, c.qpd, c.instances, basis,
                                            config.n_shots, p.observables, traj, out,
                                            options.threads);

            const Statevector ideal = noiseless_state(c.circuit, basis);
            c.noiseless[basis] = sample_state(ideal, config.noiseless_shots, p.observables,
                                              circ.child("ideal").child(basis_name(basis)));
            c.nopec[basis] =
                run_instance(c.circuit, p.noise, nullptr, {}, basis, config.nopec_shots,
                             p.observables, circ.child("nopec").child(basis_name(basis)));
        }
    }
}

CircuitSummary summarize_circuit(const CircuitData& c) {
    CircuitSummary s;
    s.circuit_id = c.circuit_id;
    s.n_trot = c.n_trot;
    s.gamma = c.qpd.model.gamma();
    s.m_nominal = c.qpd.m_nominal;
    s.m_kept = c.qpd.model.n_positions();
    s.n_sigma_k = c.qpd.model.n_sigma_k();
    s.log_n_pi_k = c.qpd.model.log_n_pi_k().log_mag;
    return s;
}

ExperimentResult estimate_stage(const Pipeline& p, const ExperimentConfig& config,
                                const RunOptions& options) {
    ExperimentResult result;
    for (const CircuitData& c : p.circuits) {
        result.circuits.push_back(summarize_circuit(c));

        // control sets and their exact moments, shared across bases/observables
        std::vector<int> kinds;
        std::vector<std::vector<FactorizableControl>> sets;
        std::vector<ControlSetStats> stats;
        SupportGrouping grouping = support_grouping(c.qpd, p.noise);
        for (const CvSetConfig& sc : config.cv_sets) {
            RandomStream cv5 =
                derive_stream(config.master_seed, "cvset5", uint64_t(config.qubits),
                              uint64_t(c.n_trot));
            std::span<const double> params(sc.params);
            sets.push_back(build_cv_set(sc.kind, c.qpd.model,
                                        sc.kind == 4 ? &grouping : nullptr,
                                        sc.kind == 5 ? &cv5 : nullptr, params));
            stats.push_back(
                precompute_stats(c.qpd.model, sets.back(), options.serial ? 1 : options.threads));
            kinds.push_back(sc.kind);
        }

        const std::size_t n = c.instances.size();
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = c.instances[i].weight.to_real();
        std::vector<std::vector<std::vector<double>>> v_rows(sets.size());
        for (std::size_t s = 0; s < sets.size(); ++s) {
            v_rows[s].assign(sets[s].size(), std::vector<double>(n));
            for (std::size_t a = 0; a < sets[s].size(); ++a)
                for (std::size_t i = 0; i < n; ++i)
                    v_rows[s][a][i] = evaluate_control(sets[s][a], c.instances[i].k).to_real();
        }
        const double mu_w = c.qpd.model.mu_w().to_real();

        for (MeasBasis basis : config.bases) {
            const auto& sim = c.sim.at(basis);
            const auto& ideal = c.noiseless.at(basis);
            const auto& nopec = c.nopec.at(basis);
            for (std::size_t o = 0; o < p.observables.size(); ++o) {
                TaskResult task;
                task.circuit_id = c.circuit_id;
                task.n_trot = c.n_trot;
                task.basis = basis;
                task.observable = p.observables[o].name;
                task.t_noiseless = ideal.mean[o];
                task.s2_noiseless = ideal.shot_var[o] / double(config.noiseless_shots);
                task.t_nopec = nopec.mean[o];
                task.s2_nopec = nopec.shot_var[o] / double(config.nopec_shots);

                Dataset d;
                d.w = w;
                d.x.resize(n);
                d.shot_var.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    d.x[i] = sim[i].mean[o];
                    d.shot_var[i] = sim[i].shot_var[o];
                }
                task.decomp =
                    variance_decomposition(d.w, d.x, d.shot_var, double(config.n_shots));

                auto add = [&](EstimationResult est, const std::string& method) {
                    MethodOutcome mo;
                    mo.method = method;
                    mo.est = std::move(est);
                    task.methods.push_back(std::move(mo));
                };
                add(estimate_basic(d), "basic");
                add(estimate_centered(d, mu_w), "centered");
                for (std::size_t s = 0; s < sets.size(); ++s) {
                    d.v = v_rows[s];
                    add(estimate_cv(d, stats[s]), "cv" + std::to_string(kinds[s]));
                    d.v.clear();
                }

                const double s2_basic = task.methods.front().est.sigma_sq;
                for (MethodOutcome& mo : task.methods) {
                    mo.daf = daf(s2_basic, mo.est.sigma_sq);
                    mo.sorp = sorp(s2_basic, mo.est.sigma_sq);
                    mo.residual = studentized_residual(mo.est.t_hat, mo.est.sigma_sq,
                                                       task.t_noiseless, task.s2_noiseless);
                }
                result.tasks.push_back(std::move(task));
            }
        }
    }
    return result;
}

ExperimentOutput run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    ExperimentOutput out{make_pipeline(config), {}};
    sample_stage(out.pipeline, config);
    simulate_stage(out.pipeline, config, options);
    out.result = estimate_stage(out.pipeline, config, options);
    return out;
}

}  // namespace qpdcv
