// dicke.hpp — collective spin operators and states on the maximal-spin (Dicke) sector.
//
// The sector j = N/2 has dimension N+1. Basis index k = 0..N carries the label
// m = N/2 − k (descending V_z eigenvalue). Operators follow the normalisation
// V_α = Σ_k σ_α^(k)/√2, so V_z = √2·J_z and V_± = V_x ± iV_y = √2·J_± with
// non-negative (Condon–Shortley) ladder elements.

#pragma once

#include "btc/core.hpp"
#include "btc/params.hpp"

namespace btc {

enum class Axis { x, y, z, plus, minus };

/// Dimension of the maximal-spin sector, N + 1.
inline Eigen::Index sector_dim(int n_spins) { return n_spins + 1; }

Operator collective_op(int n_spins, Axis axis);
inline Operator collective_op(const SystemParams& p, Axis axis) { return collective_op(p.n_spins, axis); }

/// H = (Ω/√2) V_x.
Operator hamiltonian(const SystemParams& p);

/// Spin-coherent state |θ,φ⟩⟨θ,φ| with ⟨V_α⟩/N = (sinθ cosφ, sinθ sinφ, cosθ)/√2.
/// (π, 0) is the V_z "ground state"; (π/2, π) is the ground state of H for Ω > 0.
Operator coherent_state(int n_spins, double theta, double phi);
inline Operator coherent_state(const SystemParams& p, double theta, double phi) {
    return coherent_state(p.n_spins, theta, phi);
}

/// N(N/2 + 1), the value of V_x² + V_y² + V_z² on the sector.
double casimir_value(int n_spins);

/// max-norm of V_x² + V_y² + V_z² − N(N/2+1)·1.
double casimir_check(const SystemParams& p);

/// (⟨V_x⟩, ⟨V_y⟩, ⟨V_z⟩)/N.
Vec3 magnetization(const Operator& rho);

}  // namespace btc
