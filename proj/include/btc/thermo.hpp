// thermo.hpp — heat, work, entropy and entropy-production bookkeeping.
//
// Conventions: ħ = 1, heat flowing into the system and work performed on it are positive.
// Finite-N currents (heat_current etc.) are totals; ThermoRecord and the mean-field helpers
// report powers per spin. Entropies are in nats and are not divided by N.

#pragma once

#include "btc/core.hpp"
#include "btc/liouville.hpp"
#include "btc/meanfield.hpp"
#include "btc/params.hpp"

#include <optional>
#include <vector>

namespace btc {

/// Q̇ = (ωΓ/N)[n_β⟨V_−V_+⟩ − (n_β+1)⟨V_+V_−⟩].
double heat_current(const SystemParams& p, const Operator& rho);

/// U̇ = (ΩΓ/N)[⟨V_xV_z + V_zV_x⟩/2 − ((2n_β+1)/√2)⟨V_x⟩].
double internal_energy_rate(const SystemParams& p, const Operator& rho);

/// Ẇ = U̇ − Q̇.
double work_power(const SystemParams& p, const Operator& rho);

/// β·Q̇. Throws std::domain_error at n_β = 0, where β is infinite.
double entropy_flux_rate(const SystemParams& p, const Operator& rho);

/// β·Q̇ with the zero-temperature sentinel: at n_β = 0 returns +inf·sign(Q̇) (0 when Q̇ = 0),
/// the limit of βQ̇ as β → ∞.
double entropy_flux_or_sentinel(const SystemParams& p, double q_dot);

double vn_entropy(const Operator& rho);

/// Logarithm of a steady state, restricted to its support when π is singular.
struct SteadyLog {
    Operator log_pi;
    Operator kernel_projector;  // zero when π has full rank
    bool projected = false;
};
SteadyLog steady_state_log(const Operator& pi, double cutoff = 1e-14);

/// Ḃ = −Tr{L[ρ] ln π}. On a singular π the logarithm is taken on its support; throws
/// NumericalError when L[ρ] has weight on the kernel of π.
double spohn_bound(const LindbladGenerator& gen, const Operator& rho, const SteadyLog& log_pi);
double spohn_bound(const LindbladGenerator& gen, const Operator& rho, const Operator& pi);

/// Trapezoidal running average (1/t)∫₀ᵗ f(s)ds on a grid starting at times[0]; entry 0 is f(t₀).
std::vector<double> cumulative_time_average(const std::vector<double>& times, const std::vector<double>& values);

/// (1/(t−t₀))∫ f over the whole grid.
double time_avg_power(const std::vector<double>& times, const std::vector<double>& values);

/// Second-order finite-difference derivative: central inside, one-sided three-point at the ends.
std::vector<double> central_difference(const std::vector<double>& times, const std::vector<double>& values);

/// Σ̇ = Ṡ − Φ̇.
inline double entropy_production_rate(double s_dot, double phi_dot) { return s_dot - phi_dot; }

struct ThermoRecord {
    double t = 0.0;
    double q_dot = 0.0;      // per spin
    double u_dot = 0.0;      // per spin
    double w_dot = 0.0;      // per spin
    double S = 0.0;
    double S_dot = 0.0;
    double phi_dot = 0.0;    // βQ̇ (total)
    double sigma_dot = 0.0;  // S_dot − phi_dot
    double b_dot = 0.0;      // Spohn bound
};

/// Records along a finite-N trajectory. Ṡ uses central differences on the stored grid.
/// If pi is empty the steady state is solved for.
std::vector<ThermoRecord> thermo_records(const LindbladGenerator& gen, const Trajectory& traj,
                                         const std::optional<Operator>& pi = std::nullopt);

/// Leading-order mean-field powers per spin. With G supplied the O(1/N) fluctuation
/// correction is added for a reference size N = p.n_spins.
struct MeanFieldPower {
    double q_dot;
    double u_dot;
    double w_dot;
};
MeanFieldPower mf_power(const SystemParams& p, const MeanFieldState& m, const Mat3* G = nullptr);

/// ẇ_∞ = ωΩ²/(2Γ) on the stationary branch (|Ω| ≤ Γ).
double stationary_power(const SystemParams& p);

struct AsymptoticPower {
    double w_bar;   // lim w̄̇
    double q_bar;   // lim q̄̇
    double period;  // limit-cycle period, 0 on the stationary branch
};

struct AsymptoticOptions {
    double dt = 1e-3;
    double t_settle = 400.0;  // stationary branch: integrate this long, then take the instantaneous value
    double t_average = 200.0; // time-crystal branch: average over the whole number of periods fitting here
};

/// Long-time average power along the mean-field orbit from m0.
AsymptoticPower asymptotic_power(const SystemParams& p, const MeanFieldState& m0, const AsymptoticOptions& opts = {});

/// Σ = I(S:E) + S(ρ′_E‖ρ_E) for one collision.
struct EntropySplit {
    double mutual_information;
    double relative_entropy;
    double total() const { return mutual_information + relative_entropy; }
};
/// joint_post lives on system ⊗ ancilla with the given system dimension; ancilla_pre is the
/// fresh ancilla state before the collision.
EntropySplit collision_entropy_split(const Operator& joint_post, const Operator& ancilla_pre, Eigen::Index dim_system);

}  // namespace btc
