// liouville.hpp — finite-N Lindblad generator, density-matrix propagation and steady state.
//
//   L[ρ] = −i[H,ρ] + Γ(n_β+1)/N (V_−ρV_+ − ½{ρ,V_+V_−}) + Γn_β/N (V_+ρV_− − ½{ρ,V_−V_+})

#pragma once

#include "btc/core.hpp"
#include "btc/params.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <vector>

namespace btc {

class LindbladGenerator {
public:
    explicit LindbladGenerator(const SystemParams& params);

    const SystemParams& params() const { return params_; }
    Eigen::Index dim() const { return dim_; }
    const Operator& hamiltonian() const { return h_; }
    const Operator& jump_down() const { return v_minus_; }
    const Operator& jump_up() const { return v_plus_; }
    double rate_down() const { return rate_down_; }
    double rate_up() const { return rate_up_; }

    /// L[ρ]. Throws std::invalid_argument on dimension mismatch.
    Operator apply(const Operator& rho) const;

    /// Heisenberg-picture generator L*[X], satisfying Tr(X L[ρ]) = Tr(L*[X] ρ).
    Operator apply_adjoint(const Operator& x) const;

    /// (N+1)²×(N+1)² matrix of L acting on column-major vec(ρ), assembled column by column.
    Eigen::MatrixXcd superoperator() const;

    /// Step size for which RK4 is comfortably inside its stability region.
    double stable_dt() const;

private:
    using Sparse = Eigen::SparseMatrix<cplx>;

    SystemParams params_;
    Eigen::Index dim_;
    Operator h_, v_plus_, v_minus_;
    Sparse h_sp_, vp_sp_, vm_sp_;
    Eigen::VectorXd anti_;  // diagonal of γ↓V_+V_− + γ↑V_−V_+
    double rate_down_, rate_up_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Operator> states;
    std::vector<Vec3> magnetization;  // (⟨V_x⟩, ⟨V_y⟩, ⟨V_z⟩)/N per stored state
};

struct EvolveOptions {
    double dt = 1e-3;
    int store_every = 1;             // keep every k-th step (the initial state is always kept)
    bool check_positivity = true;    // eigenvalue check on stored states
    double renormalize_tol = 1e-8;   // trace drift above this aborts
    double positivity_tol = 1e-6;    // min eigenvalue below −tol aborts
};

/// Fixed-step RK4 integration of ρ̇ = L[ρ]; calls observer(t, ρ) on every stored sample.
/// Throws IntegratorError on trace or positivity drift.
void evolve_observe(const LindbladGenerator& gen, const Operator& rho0, double t_max, const EvolveOptions& opts,
                    const std::function<void(double, const Operator&)>& observer);

Trajectory evolve(const LindbladGenerator& gen, const Operator& rho0, double t_max, const EvolveOptions& opts = {});
inline Trajectory evolve(const LindbladGenerator& gen, const Operator& rho0, double t_max, double dt) {
    EvolveOptions o;
    o.dt = dt;
    return evolve(gen, rho0, t_max, o);
}

struct SteadyStateOptions {
    int max_spins_nullspace = 60;     // above this, fall back to long-time evolution
    Eigen::Index svd_max_dim = 1024;  // superoperator dimension up to which a full SVD is used
    double null_rel_threshold = 1e-12;
    double residual_tol = 1e-10;      // ‖L[π]‖_max contract for the null-space path
    double evolution_tol = 1e-8;      // ‖L[ρ]‖_max stopping criterion of the fallback
    double evolution_t_max = 1e5;
    double evolution_dt = 0.0;        // 0 → gen.stable_dt()
};

enum class SteadyStateMethod { svd, bordered_lu, evolution };

struct SteadyState {
    Operator rho;
    SteadyStateMethod method;
    double residual;  // ‖L[π]‖_max
};

/// π with L[π] = 0, unit trace, Hermitian. Throws NumericalError on a degenerate null space.
SteadyState solve_steady_state(const LindbladGenerator& gen, const SteadyStateOptions& opts = {});
inline Operator steady_state(const LindbladGenerator& gen, const SteadyStateOptions& opts = {}) {
    return solve_steady_state(gen, opts).rho;
}

/// Null-space route only (SVD or bordered LU depending on size).
SteadyState steady_state_nullspace(const LindbladGenerator& gen, const SteadyStateOptions& opts = {});

/// Long-time evolution route only, starting from the maximally mixed state.
SteadyState steady_state_by_evolution(const LindbladGenerator& gen, const SteadyStateOptions& opts = {});

}  // namespace btc
