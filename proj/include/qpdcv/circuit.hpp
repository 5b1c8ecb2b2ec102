#pragma once

#include <utility>
#include <vector>

namespace qpdcv {

// Transverse-field Ising chain, first-order Trotter step:
//   exp(-i dt H),  H = -J sum_q Z_q Z_{q+1} - h sum_q X_q
// One step is an R_X(2 h dt) wall followed by Z Z couplers, each coupler
// compiled as CNOT - R_Z(-2 J dt) on the target - CNOT (control = lower
// qubit). Couplers run in two walls: even pairs (q0,q1),(q2,q3),... then odd
// pairs (q1,q2),(q3,q4),... Each wall's CNOT layers are the noisy layers:
// four per step, types (1, 1, 2, 2), the channel firing just before its
// layer's gates.
struct IsingCircuitSpec {
    int n_qubits = 0;
    int n_trot = 0;
    double h = 0.0;
    double j = 0.0;
    double dt = 0.0;
};

struct Layer {
    enum class Kind { rx_wall, rz_targets, cnot_wall };
    Kind kind = Kind::rx_wall;
    double angle = 0.0;                          // rx_wall / rz_targets
    std::vector<std::pair<int, int>> pairs;      // cnot_wall: (control, target)
    std::vector<int> targets;                    // rz_targets
    int noise_layer_type = 0;                    // 0 quiet, 1 or 2 noisy
    int step = -1;
    int occurrence = -1;                         // 0..3 among the step's noisy layers
};

struct Circuit {
    IsingCircuitSpec spec;
    double theta_x = 0.0;  // 2 h dt
    double theta_z = 0.0;  // -2 J dt
    std::vector<Layer> layers;

    static Circuit build(const IsingCircuitSpec& spec);
};

}  // namespace qpdcv
