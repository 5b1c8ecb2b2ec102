#include "qpdcv/circuit.hpp"

#include <stdexcept>

namespace qpdcv {

Circuit Circuit::build(const IsingCircuitSpec& spec) {
    if (spec.n_qubits < 2) throw std::invalid_argument("circuit: needs at least 2 qubits");
    if (spec.n_trot < 1) throw std::invalid_argument("circuit: n_trot must be >= 1");

    Circuit c;
    c.spec = spec;
    c.theta_x = 2.0 * spec.h * spec.dt;
    c.theta_z = -2.0 * spec.j * spec.dt;

    std::vector<std::pair<int, int>> even, odd;
    for (int q = 0; q + 1 < spec.n_qubits; q += 2) even.emplace_back(q, q + 1);
    for (int q = 1; q + 1 < spec.n_qubits; q += 2) odd.emplace_back(q, q + 1);

    for (int step = 0; step < spec.n_trot; ++step) {
        Layer rx;
        rx.kind = Layer::Kind::rx_wall;
        rx.angle = c.theta_x;
        rx.step = step;
        c.layers.push_back(rx);

        int occurrence = 0;
        for (int wall = 0; wall < 2; ++wall) {
            const auto& pairs = wall == 0 ? even : odd;
            const int type = wall + 1;

            Layer open;
            open.kind = Layer::Kind::cnot_wall;
            open.pairs = pairs;
            open.noise_layer_type = type;
            open.step = step;
            open.occurrence = occurrence++;
            c.layers.push_back(open);

            Layer rz;
            rz.kind = Layer::Kind::rz_targets;
            rz.angle = c.theta_z;
            for (auto [ctrl, tgt] : pairs) rz.targets.push_back(tgt);
            rz.step = step;
            c.layers.push_back(rz);

            Layer close = open;
            close.occurrence = occurrence++;
            c.layers.push_back(close);
        }
    }
    return c;
}

}  // namespace qpdcv
