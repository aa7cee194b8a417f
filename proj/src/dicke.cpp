#include "btc/dicke.hpp"

#include <cmath>
#include <stdexcept>

namespace btc {

namespace {

// √2·⟨m+1|J_+|m⟩ for sector labels, stored as V_+(k−1, k).
Operator raising(int n) {
    const Eigen::Index d = sector_dim(n);
    const double j = 0.5 * n;
    Operator vp = Operator::Zero(d, d);
    for (Eigen::Index k = 1; k < d; ++k) {
        const double m = j - static_cast<double>(k);
        vp(k - 1, k) = kSqrt2 * std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    return vp;
}

}  // namespace

Operator collective_op(int n_spins, Axis axis) {
    if (n_spins < 1) throw std::invalid_argument("collective_op: N must be >= 1");
    const Eigen::Index d = sector_dim(n_spins);
    switch (axis) {
        case Axis::plus:
            return raising(n_spins);
        case Axis::minus:
            return raising(n_spins).adjoint();
        case Axis::x: {
            const Operator vp = raising(n_spins);
            return 0.5 * (vp + vp.adjoint());
        }
        case Axis::y: {
            const Operator vp = raising(n_spins);
            return cplx(0.0, -0.5) * (vp - vp.adjoint());
        }
        case Axis::z: {
            Operator vz = Operator::Zero(d, d);
            for (Eigen::Index k = 0; k < d; ++k) vz(k, k) = kSqrt2 * (0.5 * n_spins - static_cast<double>(k));
            return vz;
        }
    }
    throw std::invalid_argument("collective_op: unknown axis");
}

Operator hamiltonian(const SystemParams& p) {
    return (p.omega_rabi / kSqrt2) * collective_op(p.n_spins, Axis::x);
}

Operator coherent_state(int n_spins, double theta, double phi) {
    if (n_spins < 1) throw std::invalid_argument("coherent_state: N must be >= 1");
    const Eigen::Index d = sector_dim(n_spins);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    Eigen::VectorXcd psi(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        // k = j − m spins down; amplitude √C(N,k) c^{N−k} s^{k} e^{ikφ}.
        const double up = static_cast<double>(n_spins - k);
        const double down = static_cast<double>(k);
        const double log_binom =
            std::lgamma(n_spins + 1.0) - std::lgamma(up + 1.0) - std::lgamma(down + 1.0);
        const double mag = std::exp(0.5 * log_binom) * std::pow(c, up) * std::pow(s, down);
        psi(k) = std::polar(mag, down * phi);
    }
    psi.normalize();
    return psi * psi.adjoint();
}

double casimir_value(int n_spins) {
    return n_spins * (0.5 * n_spins + 1.0);
}

double casimir_check(const SystemParams& p) {
    const Operator vx = collective_op(p.n_spins, Axis::x);
    const Operator vy = collective_op(p.n_spins, Axis::y);
    const Operator vz = collective_op(p.n_spins, Axis::z);
    const Eigen::Index d = sector_dim(p.n_spins);
    const Operator v2 = vx * vx + vy * vy + vz * vz;
    return max_norm(v2 - casimir_value(p.n_spins) * Operator::Identity(d, d));
}

Vec3 magnetization(const Operator& rho) {
    const Eigen::Index d = rho.rows();
    const int n = static_cast<int>(d) - 1;
    if (n < 1) throw std::invalid_argument("magnetization: state dimension must be >= 2");
    // ⟨V_+⟩ = Σ_k V_+(k−1,k) ρ(k,k−1); ⟨V_x⟩ = Re⟨V_+⟩, ⟨V_y⟩ = Im⟨V_+⟩.
    const double j = 0.5 * n;
    cplx vp = 0.0;
    double vz = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        const double m = j - static_cast<double>(k);
        vz += kSqrt2 * m * rho(k, k).real();
        if (k > 0) vp += kSqrt2 * std::sqrt(j * (j + 1.0) - m * (m + 1.0)) * rho(k, k - 1);
    }
    return Vec3(vp.real(), vp.imag(), vz) / static_cast<double>(n);
}

}  // namespace btc
