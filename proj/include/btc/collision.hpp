// collision.hpp — repeated-interaction model with truncated harmonic-oscillator ancillas.
//
// Each collision couples the spins to a fresh thermal oscillator for exactly δt under
//   H_tot = H ⊗ 1 + 1 ⊗ ω a†a + √(Γ/(Nδt)) (V_− ⊗ a† + V_+ ⊗ a)
// and the ancilla is then discarded. Joint ordering is system ⊗ ancilla throughout:
// |m⟩⊗|n⟩ has index k·(n_max+1) + n. As δt → 0 the reduced dynamics approaches the
// Lindblad generator in liouville.hpp with O(δt) error.

#pragma once

#include "btc/core.hpp"
#include "btc/liouville.hpp"
#include "btc/params.hpp"

#include <vector>

namespace btc {

/// Smallest truncation whose thermal tail Σ_{n>n_max} p_n is below 1e-8 (at least 2).
int default_n_max(double n_beta);

class OscillatorAncilla {
public:
    /// Truncated thermal state p_n ∝ (n_β/(n_β+1))^n, n ≤ n_max. n_max ≤ 0 selects default_n_max.
    /// Throws std::invalid_argument when the discarded thermal tail exceeds 1e-8.
    OscillatorAncilla(double n_beta, double omega_bath, int n_max = 0);

    int n_max() const { return n_max_; }
    Eigen::Index dim() const { return n_max_ + 1; }
    double n_beta() const { return n_beta_; }
    double omega_bath() const { return omega_; }
    const Operator& state() const { return state_; }
    const Operator& annihilation() const { return a_; }
    const Operator& number() const { return number_; }

    /// Σ_{n>n_max} p_n of the untruncated thermal distribution.
    double tail_weight() const;

private:
    double n_beta_, omega_;
    int n_max_;
    Operator state_, a_, number_;
};

struct CollisionConfig {
    double delta_t = 1e-3;   // δt in 1/Γ
    int n_collisions = 1000;
    double leakage_tol = 1e-6;  // max post-collision population of the top ancilla level
    int max_joint_dim = 4096;

    double coupling(const SystemParams& p) const;
};

Operator joint_hamiltonian(const SystemParams& p, const CollisionConfig& cfg, const OscillatorAncilla& anc);

/// Interaction part √(Γ/(Nδt))(V_− ⊗ a† + V_+ ⊗ a).
Operator interaction_hamiltonian(const SystemParams& p, const CollisionConfig& cfg, const OscillatorAncilla& anc);

/// Thrown when the top ancilla level is populated beyond leakage_tol after a collision.
class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct CollisionStep {
    Operator rho_next;
    Operator joint_post;
    double heat = 0.0;       // −ω Δ⟨a†a⟩, positive into the system
    double work = 0.0;       // switching work −Tr[H_int Δρ_SE]
    double delta_u = 0.0;    // Δ⟨H⟩ of the system
    double delta_e = 0.0;    // ω Δ⟨a†a⟩ of the ancilla
    double top_population = 0.0;
};

/// Holds the joint unitary for one (params, δt, truncation) so repeated collisions reuse it.
class CollisionModel {
public:
    CollisionModel(const SystemParams& p, const CollisionConfig& cfg, const OscillatorAncilla& anc);

    const SystemParams& params() const { return params_; }
    const CollisionConfig& config() const { return cfg_; }
    const OscillatorAncilla& ancilla() const { return anc_; }
    const Operator& unitary() const { return u_; }

    /// One collision with a fresh ancilla. Throws TruncationError on leakage.
    CollisionStep collide(const Operator& rho) const;

private:
    SystemParams params_;
    CollisionConfig cfg_;
    OscillatorAncilla anc_;
    Operator h_sys_, h_int_, u_;
};

CollisionStep collide_once(const Operator& rho, const SystemParams& p, const CollisionConfig& cfg,
                           const OscillatorAncilla& anc);

struct CollisionTrajectory {
    std::vector<double> times;
    std::vector<Operator> states;
    std::vector<double> heat_cumulative;
    int n_max_used = 0;
};

/// cfg.n_collisions collisions from rho0 (t_max = n_collisions·δt). On TruncationError the run
/// restarts with doubled n_max until the joint dimension cap is reached.
CollisionTrajectory collision_trajectory(const Operator& rho0, const SystemParams& p, const CollisionConfig& cfg,
                                         int n_max = 0);

struct CollisionComparisonRow {
    int k;
    double t;
    double trace_distance;
    double heat_cumulative;
    double heat_lindblad_cumulative;
};

/// Collision trajectory alongside the exact Lindblad propagator exp(tL) and ∫Q̇dt (Simpson rule
/// on each collision interval).
std::vector<CollisionComparisonRow> compare_with_lindblad(const Operator& rho0, const SystemParams& p,
                                                          const CollisionConfig& cfg, int n_max = 0);

struct ConvergencePoint {
    double delta_t;
    double trace_distance;
    double heat_collision;
    double heat_lindblad;
    double heat_relative_error;
};

struct ConvergenceStudy {
    std::vector<ConvergencePoint> points;  // in the order of the supplied δt values
    std::vector<double> distance_ratios;   // d(δt_k)/d(δt_{k+1})
    std::vector<double> heat_error_ratios;
};

ConvergenceStudy collision_convergence(const Operator& rho0, const SystemParams& p, double t_final,
                                       const std::vector<double>& delta_ts, int n_max = 0);

}  // namespace btc
