// rk4.hpp — classical fixed-step fourth-order Runge–Kutta stepper shared by all integrators.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace btc {

/// One RK4 step of ẏ = f(y) for any State supporting +, scalar * (Eigen matrices, vectors).
template <class State, class Rhs>
State rk4_step(const State& y, double dt, Rhs&& f) {
    const State k1 = f(y);
    const State k2 = f(State(y + (0.5 * dt) * k1));
    const State k3 = f(State(y + (0.5 * dt) * k2));
    const State k4 = f(State(y + dt * k3));
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Number of fixed steps of size dt needed to reach t_max (rounded to the nearest integer).
inline std::int64_t step_count(double t_max, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be non-negative");
    return static_cast<std::int64_t>(std::llround(t_max / dt));
}

}  // namespace btc
