#pragma once

#include "btc/dicke.hpp"
#include "btc/params.hpp"

#include <numbers>

namespace btc::test {

inline SystemParams make(int n, double omega, double nbeta, double gamma = 1.0, double omega_bath = 1.0) {
    SystemParams p;
    p.n_spins = n;
    p.omega_rabi = omega;
    p.n_beta = nbeta;
    p.gamma = gamma;
    p.omega_bath = omega_bath;
    return p;
}

// Coherent state pointing along −x: the ground state of the drive.
inline Operator ground_h(int n) { return coherent_state(n, std::numbers::pi / 2.0, std::numbers::pi); }

}  // namespace btc::test
