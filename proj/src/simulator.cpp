#include "qpdcv/simulator.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpdcv {

const char* basis_name(MeasBasis b) { return b == MeasBasis::y ? "y" : "z"; }

MeasBasis parse_basis(const std::string& name) {
    if (name == "y" || name == "Y") return MeasBasis::y;
    if (name == "z" || name == "Z") return MeasBasis::z;
    throw std::invalid_argument("basis: expected y or z, got " + name);
}

namespace {

void apply_layer(Statevector& psi, const Layer& layer) {
    switch (layer.kind) {
        case Layer::Kind::rx_wall:
            for (int q = 0; q < psi.n_qubits(); ++q) psi.apply_rx(q, layer.angle);
            break;
        case Layer::Kind::rz_targets:
            for (int q : layer.targets) psi.apply_rz(q, layer.angle);
            break;
        case Layer::Kind::cnot_wall:
            for (auto [c, t] : layer.pairs) psi.apply_cnot(c, t);
            break;
    }
}

void apply_folded(Statevector& psi, std::span<const int> acc) {
    for (int q = 0; q < int(acc.size()); ++q)
        if (acc[q] != 0) psi.apply_pauli(q, acc[q]);
}

}  // namespace

uint64_t simulate_shot(const Circuit& circuit, const NoiseModel& noise, const PecQpd* qpd,
                       std::span<const uint32_t> inserted, MeasBasis basis,
                       RandomStream& shot_stream) {
    if (!inserted.empty() && !qpd)
        throw std::invalid_argument("simulate_shot: insertions without a decomposition");
    Statevector psi(noise.n_qubits);
    std::vector<int> acc(noise.n_qubits);

    for (const Layer& layer : circuit.layers) {
        if (layer.noise_layer_type != 0) {
            std::fill(acc.begin(), acc.end(), 0);
            if (!inserted.empty()) {
                const auto [begin, end] = qpd->layer_ranges[layer.step * 4 + layer.occurrence];
                for (uint32_t pos = begin; pos < end; ++pos) {
                    if (inserted[pos] != 1) continue;
                    const QpdPositionInfo& info = qpd->position_map[pos];
                    const PauliTerm& t = noise.layer_terms(info.layer_type)[info.term_index];
                    acc[t.q_lo] ^= t.p_lo;
                    if (t.is_pair()) acc[t.q_hi] ^= t.p_hi;
                }
            }
            for (const PauliTerm& t : noise.layer_terms(layer.noise_layer_type)) {
                if (t.epsilon == 0.0) continue;  // never fires, draws nothing
                if (!shot_stream.next_bernoulli(t.epsilon)) continue;
                acc[t.q_lo] ^= t.p_lo;
                if (t.is_pair()) acc[t.q_hi] ^= t.p_hi;
            }
            apply_folded(psi, acc);
        }
        apply_layer(psi, layer);
    }

    if (basis == MeasBasis::y) {
        for (int q = 0; q < psi.n_qubits(); ++q) {
            psi.apply_sdg(q);
            psi.apply_hadamard(q);
        }
    }
    return psi.sample_index(shot_stream);
}

InstanceResult run_instance(const Circuit& circuit, const NoiseModel& noise, const PecQpd* qpd,
                            std::span<const uint32_t> inserted, MeasBasis basis, int n_shots,
                            const std::vector<Observable>& observables,
                            const RandomStream& instance_stream) {
    if (n_shots < 2) throw std::invalid_argument("run_instance: needs n_shots >= 2");
    const std::size_t n_obs = observables.size();
    InstanceResult r;
    r.mean.assign(n_obs, 0.0);
    r.shot_var.assign(n_obs, 0.0);

    std::vector<double> vals(n_obs), m2(n_obs, 0.0);
    for (int s = 0; s < n_shots; ++s) {
        RandomStream stream = instance_stream.child(uint64_t(s));
        const uint64_t bits = simulate_shot(circuit, noise, qpd, inserted, basis, stream);
        observable_values(observables, bits, noise.n_qubits, vals);
        for (std::size_t o = 0; o < n_obs; ++o) {
            const double delta = vals[o] - r.mean[o];
            r.mean[o] += delta / double(s + 1);
            m2[o] += delta * (vals[o] - r.mean[o]);
        }
    }
    for (std::size_t o = 0; o < n_obs; ++o) r.shot_var[o] = m2[o] / double(n_shots - 1);
    return r;
}

void simulate_instances_serial(const Circuit& circuit, const NoiseModel& noise,
                               const PecQpd& qpd, std::span<const SampledInstance> instances,
                               MeasBasis basis, int n_shots,
                               const std::vector<Observable>& observables,
                               const RandomStream& base_stream, std::span<InstanceResult> out) {
    if (out.size() != instances.size())
        throw std::invalid_argument("simulate_instances: output size mismatch");
    for (std::size_t i = 0; i < instances.size(); ++i)
        out[i] = run_instance(circuit, noise, &qpd, instances[i].k, basis, n_shots, observables,
                              base_stream.child(uint64_t(i)));
}

void simulate_instances_parallel(const Circuit& circuit, const NoiseModel& noise,
                                 const PecQpd& qpd, std::span<const SampledInstance> instances,
                                 MeasBasis basis, int n_shots,
                                 const std::vector<Observable>& observables,
                                 const RandomStream& base_stream, std::span<InstanceResult> out,
                                 int threads) {
    if (out.size() != instances.size())
        throw std::invalid_argument("simulate_instances: output size mismatch");
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (long long i = 0; i < (long long)instances.size(); ++i)
        out[i] = run_instance(circuit, noise, &qpd, instances[i].k, basis, n_shots, observables,
                              base_stream.child(uint64_t(i)));
}

Statevector noiseless_state(const Circuit& circuit, MeasBasis basis) {
    Statevector psi(circuit.spec.n_qubits);
    for (const Layer& layer : circuit.layers) apply_layer(psi, layer);
    if (basis == MeasBasis::y) {
        for (int q = 0; q < psi.n_qubits(); ++q) {
            psi.apply_sdg(q);
            psi.apply_hadamard(q);
        }
    }
    return psi;
}

InstanceResult sample_state(const Statevector& state, int n_shots,
                            const std::vector<Observable>& observables, RandomStream stream) {
    if (n_shots < 2) throw std::invalid_argument("sample_state: needs n_shots >= 2");
    const std::size_t n_obs = observables.size();
    InstanceResult r;
    r.mean.assign(n_obs, 0.0);
    r.shot_var.assign(n_obs, 0.0);
    std::vector<double> vals(n_obs), m2(n_obs, 0.0);
    for (int s = 0; s < n_shots; ++s) {
        const uint64_t bits = state.sample_index(stream);
        observable_values(observables, bits, state.n_qubits(), vals);
        for (std::size_t o = 0; o < n_obs; ++o) {
            const double delta = vals[o] - r.mean[o];
            r.mean[o] += delta / double(s + 1);
            m2[o] += delta * (vals[o] - r.mean[o]);
        }
    }
    for (std::size_t o = 0; o < n_obs; ++o) r.shot_var[o] = m2[o] / double(n_shots - 1);
    return r;
}

}  // namespace qpdcv
