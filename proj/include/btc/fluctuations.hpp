// fluctuations.hpp — Gaussian quantum fluctuations around the mean-field flow.
//
// Fluctuation operators F_α = (V_α − ⟨V_α⟩)/√N become bosonic as N → ∞ with commutator
// matrix s(m) and covariance G_{αβ} = ½⟨{F_α,F_β}⟩. G obeys
//
//   Ġ = W G + G Wᵀ − s A s,   W = D + D̄ + s B.
//
// The non-symmetrised second-moment matrix closes on (G, s) and is never stored.

#pragma once

#include "btc/core.hpp"
#include "btc/meanfield.hpp"
#include "btc/params.hpp"

#include <functional>
#include <vector>

namespace btc {

struct NoiseMatrices {
    Mat3 A;  // Γ(2n_β+1)·diag(1,1,0)
    Mat3 B;  // B_xy = −Γ, B_yx = Γ
};

NoiseMatrices noise_matrices(const SystemParams& p);

/// s_{αβ} = √2 ε_{αβγ} m_γ.
Mat3 symplectic(const MeanFieldState& m);

/// Dissipative part of the linearised drift: D̄_{μν} = −√2 Σ_{η,ζ} B_{ηζ} m_ζ ε_{ημν}.
/// This normalisation makes W(m) the Jacobian of the mean-field flow.
Mat3 drift_dissipative(const SystemParams& p, const MeanFieldState& m);

/// W = D + D̄ + sB with D_{μη} = −Ω ε_{xμη}.
Mat3 drift_matrix(const SystemParams& p, const MeanFieldState& m);

struct CovarianceState {
    Mat3 G;
    MeanFieldState m;
};

/// W G + G Wᵀ − s A s, symmetrised.
Mat3 covariance_rhs(const SystemParams& p, const CovarianceState& state);

/// λ ≥ 0 with spectrum(isG) = {0, ±λ}; computed from λ² = −½ tr((sG)²).
double symplectic_eigenvalue(const CovarianceState& state);

/// Eigenvalues of isG from a general eigensolver, sorted ascending (cross-check of the closed form).
Vec3 isg_spectrum(const CovarianceState& state);

/// (λ+½)ln(λ+½) − (λ−½)ln(λ−½). λ within 1e-8 below ½ is clamped to ½.
/// Throws NumericalError for λ < ½ − 1e-8.
double gaussian_entropy_from_lambda(double lambda);
double gaussian_entropy(const CovarianceState& state);

/// S_β = (n_β+1)ln(n_β+1) − n_β ln n_β.
double thermal_entropy(double n_beta);

/// Thermodynamic-limit estimate of ⟨V_μV_ν⟩/N: N m_μ m_ν + G_{μν} + (i/2) s_{μν}. Axes 0,1,2 = x,y,z.
cplx product_expectation(const MeanFieldState& m, const Mat3& G, int mu, int nu, int n_spins);

/// Covariance of a spin-coherent state pointing along m: ½(1 − n nᵀ), n = m/|m|.
Mat3 coherent_covariance(const MeanFieldState& m);

/// Fixed point of the covariance flow at a stationary m (Ω < Γ). The Lyapunov map is singular;
/// the solution with G·m = 0 is the one reached by the joint flow and is returned.
Mat3 stationary_covariance(const SystemParams& p, const MeanFieldState& m);

struct FluctuationSample {
    double t;
    MeanFieldState m;
    Mat3 G;
    double lambda;
    double entropy;
};

struct JointOptions {
    double dt = 1e-3;
    int store_every = 1;
    double physicality_tol = 1e-6;  // abort when λ < ½ − tol
};

/// Co-integrates the mean-field equations and the covariance flow with one RK4 stepper.
/// Throws IntegratorError on a physicality violation.
void joint_integrate_observe(const SystemParams& p, const MeanFieldState& m0, const Mat3& G0, double t_max,
                             const JointOptions& opts, const std::function<void(const FluctuationSample&)>& observer);

std::vector<FluctuationSample> joint_integrate(const SystemParams& p, const MeanFieldState& m0, const Mat3& G0,
                                               double t_max, const JointOptions& opts = {});

}  // namespace btc
