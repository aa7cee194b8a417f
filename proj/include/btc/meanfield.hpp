// meanfield.hpp — thermodynamic-limit magnetisation dynamics.
//
//   ṁ_x = √2Γ m_z m_x
//   ṁ_y = m_z (√2Γ m_y − Ω)
//   ṁ_z = Ω m_y − √2Γ (m_x² + m_y²)
//
// Conserved along the flow: |m|² (fixed to 1/2 for the states used here) and
// c = m_x / (m_y − Ω/(√2Γ)). The flow does not depend on n_β.

#pragma once

#include "btc/core.hpp"
#include "btc/params.hpp"

#include <functional>
#include <vector>

namespace btc {

using MeanFieldState = Vec3;

Vec3 mf_rhs(const SystemParams& p, const MeanFieldState& m);

/// Ω/(√2Γ): the m_y value on which c is singular.
double c_pole(const SystemParams& p);

/// c = m_x/(m_y − Ω/(√2Γ)). Throws std::domain_error within 1e-12 of the singular manifold.
double conserved_c(const SystemParams& p, const MeanFieldState& m);

struct MeanFieldTrajectory {
    std::vector<double> times;
    std::vector<MeanFieldState> states;
    std::vector<double> c_values;  // NaN where c is undefined
};

struct MeanFieldOptions {
    double dt = 1e-3;
    int store_every = 1;
    double drift_tol = 1e-6;  // abort threshold for |m|² and relative c drift
};

/// RK4 integration. m_y is advanced as the offset m_y − Ω/(√2Γ): m_x and that offset obey the
/// same linear equation ẋ = √2Γ m_z x, so their ratio c keeps full relative precision even as
/// both decay to zero in the stationary phase.
/// Throws IntegratorError when a conserved quantity drifts beyond drift_tol.
void mf_integrate_observe(const SystemParams& p, const MeanFieldState& m0, double t_max, const MeanFieldOptions& opts,
                          const std::function<void(double, const MeanFieldState&)>& observer);

MeanFieldTrajectory mf_integrate(const SystemParams& p, const MeanFieldState& m0, double t_max,
                                 const MeanFieldOptions& opts = {});
inline MeanFieldTrajectory mf_integrate(const SystemParams& p, const MeanFieldState& m0, double t_max, double dt) {
    MeanFieldOptions o;
    o.dt = dt;
    return mf_integrate(p, m0, t_max, o);
}

/// Stable fixed point of the stationary phase (Ω < Γ): (0, Ω/(√2Γ), −√(Γ²−Ω²)/(√2Γ)).
MeanFieldState stationary_fixed_point(const SystemParams& p);

enum class Phase { stationary, critical, time_crystal };
Phase classify_phase(const SystemParams& p);

struct PeriodOptions {
    double t_max = 2000.0;
    double dt = 1e-3;
    double jitter_tol = 1e-4;
};

/// Limit-cycle period for Ω > Γ, from successive upward crossings of m_z through the
/// midpoint of its range. Throws std::domain_error outside the time-crystal phase and
/// NumericalError when no stable periodicity is found within t_max.
double mf_period(const SystemParams& p, const MeanFieldState& m0, const PeriodOptions& opts = {});

/// Mean-field ground state of H (all spins along −x) and "ground state" of V_z.
inline MeanFieldState mf_ground_state_h() { return {-1.0 / kSqrt2, 0.0, 0.0}; }
inline MeanFieldState mf_ground_state_vz() { return {0.0, 0.0, -1.0 / kSqrt2}; }

}  // namespace btc
