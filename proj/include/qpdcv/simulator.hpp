#pragma once

#include "qpdcv/circuit.hpp"
#include "qpdcv/noise_model.hpp"
#include "qpdcv/observables.hpp"
#include "qpdcv/rng.hpp"
#include "qpdcv/statevector.hpp"

#include <span>
#include <vector>

namespace qpdcv {

enum class MeasBasis { y, z };

const char* basis_name(MeasBasis b);
MeasBasis parse_basis(const std::string& name);

// Shot averages and sample variances (N-1) per observable, one instance.
struct InstanceResult {
    std::vector<double> mean;
    std::vector<double> shot_var;
};

// One stochastic trajectory. Before each noisy layer the inserted Paulis of
// that layer (inserted[pos] == 1) and the trajectory Paulis (one Bernoulli
// per eps>0 term, in table order) are folded into one Pauli per qubit (XOR
// on the {I,X,Y,Z} labels; phases are global) and applied. A y-basis
// measurement is the per-qubit phase-undo-then-Hadamard rotation before the
// final z sample. `inserted` may be empty (no insertions); `qpd` may then be
// null. Draw count per shot is fixed by (circuit, noise) alone.
uint64_t simulate_shot(const Circuit& circuit, const NoiseModel& noise, const PecQpd* qpd,
                       std::span<const uint32_t> inserted, MeasBasis basis,
                       RandomStream& shot_stream);

// n_shots trajectories with per-shot derived streams instance_stream.child(s);
// Welford accumulation in shot order.
InstanceResult run_instance(const Circuit& circuit, const NoiseModel& noise, const PecQpd* qpd,
                            std::span<const uint32_t> inserted, MeasBasis basis, int n_shots,
                            const std::vector<Observable>& observables,
                            const RandomStream& instance_stream);

// ---- instance batch kernels ----
// Both fill out[i] from base_stream.child(i); the parallel kernel is
// bit-identical to the serial reference because instances are independent
// and every stream is derived, never shared.

void simulate_instances_serial(const Circuit& circuit, const NoiseModel& noise,
                               const PecQpd& qpd, std::span<const SampledInstance> instances,
                               MeasBasis basis, int n_shots,
                               const std::vector<Observable>& observables,
                               const RandomStream& base_stream, std::span<InstanceResult> out);

void simulate_instances_parallel(const Circuit& circuit, const NoiseModel& noise,
                                 const PecQpd& qpd, std::span<const SampledInstance> instances,
                                 MeasBasis basis, int n_shots,
                                 const std::vector<Observable>& observables,
                                 const RandomStream& base_stream, std::span<InstanceResult> out,
                                 int threads);

// ---- references ----

// Final state with no noise and no insertions, measurement rotation applied.
Statevector noiseless_state(const Circuit& circuit, MeasBasis basis);

// Sampled estimate from a fixed prepared state: n_shots index draws from one
// sequential stream.
InstanceResult sample_state(const Statevector& state, int n_shots,
                            const std::vector<Observable>& observables, RandomStream stream);

}  // namespace qpdcv
