#include "btc/fluctuations.hpp"

#include "btc/rk4.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace btc {

namespace {

double levi_civita(int a, int b, int c) {
    return static_cast<double>((a - b) * (b - c) * (c - a)) / 2.0;
}

using Joint = Eigen::Matrix<double, 12, 1>;

Joint pack(const Vec3& u, const Mat3& g) {
    Joint y;
    y.head<3>() = u;
    y.tail<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(g.data());
    return y;
}

Mat3 unpack_g(const Joint& y) {
    return Eigen::Map<const Mat3>(y.tail<9>().data());
}

}  // namespace

NoiseMatrices noise_matrices(const SystemParams& p) {
    NoiseMatrices nm;
    nm.A = Mat3::Zero();
    nm.A(0, 0) = nm.A(1, 1) = p.gamma * (2.0 * p.n_beta + 1.0);
    nm.B = Mat3::Zero();
    nm.B(0, 1) = -p.gamma;
    nm.B(1, 0) = p.gamma;
    return nm;
}

Mat3 symplectic(const MeanFieldState& m) {
    Mat3 s = Mat3::Zero();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) s(a, b) += kSqrt2 * levi_civita(a, b, c) * m(c);
    return s;
}

Mat3 drift_dissipative(const SystemParams& p, const MeanFieldState& m) {
    const Mat3 b = noise_matrices(p).B;
    const Vec3 bm = b * m;  // Σ_ζ B_{ηζ} m_ζ
    Mat3 d = Mat3::Zero();
    for (int mu = 0; mu < 3; ++mu)
        for (int nu = 0; nu < 3; ++nu)
            for (int eta = 0; eta < 3; ++eta) d(mu, nu) -= kSqrt2 * bm(eta) * levi_civita(eta, mu, nu);
    return d;
}

Mat3 drift_matrix(const SystemParams& p, const MeanFieldState& m) {
    Mat3 d = Mat3::Zero();
    for (int mu = 0; mu < 3; ++mu)
        for (int eta = 0; eta < 3; ++eta) d(mu, eta) = -p.omega_rabi * levi_civita(0, mu, eta);
    return d + drift_dissipative(p, m) + symplectic(m) * noise_matrices(p).B;
}

Mat3 covariance_rhs(const SystemParams& p, const CovarianceState& state) {
    const Mat3 w = drift_matrix(p, state.m);
    const Mat3 s = symplectic(state.m);
    const Mat3 a = noise_matrices(p).A;
    const Mat3 out = w * state.G + state.G * w.transpose() - s * a * s;
    return 0.5 * (out + out.transpose());
}

double symplectic_eigenvalue(const CovarianceState& state) {
    const Mat3 sg = symplectic(state.m) * state.G;
    const double l2 = -0.5 * (sg * sg).trace();
    return std::sqrt(std::max(l2, 0.0));
}

Vec3 isg_spectrum(const CovarianceState& state) {
    const Eigen::Matrix3cd isg = cplx(0.0, 1.0) * (symplectic(state.m) * state.G).cast<cplx>();
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(isg, false);
    Vec3 ev = es.eigenvalues().real();
    std::sort(ev.data(), ev.data() + 3);
    return ev;
}

double gaussian_entropy_from_lambda(double lambda) {
    if (!(lambda >= 0.5 - 1e-8)) {
        std::ostringstream os;
        os << "gaussian_entropy: unphysical symplectic eigenvalue " << lambda << " < 1/2";
        throw NumericalError(os.str());
    }
    const double l = std::max(lambda, 0.5);
    const double lm = l - 0.5;
    return (l + 0.5) * std::log(l + 0.5) - (lm > 0.0 ? lm * std::log(lm) : 0.0);
}

double gaussian_entropy(const CovarianceState& state) {
    return gaussian_entropy_from_lambda(symplectic_eigenvalue(state));
}

double thermal_entropy(double n_beta) {
    if (n_beta < 0.0) throw std::invalid_argument("thermal_entropy: n_beta must satisfy n_beta >= 0");
    if (n_beta == 0.0) return 0.0;
    return (n_beta + 1.0) * std::log1p(n_beta) - n_beta * std::log(n_beta);
}

cplx product_expectation(const MeanFieldState& m, const Mat3& G, int mu, int nu, int n_spins) {
    if (mu < 0 || mu > 2 || nu < 0 || nu > 2) throw std::invalid_argument("product_expectation: axis index out of range");
    const Mat3 s = symplectic(m);
    return {static_cast<double>(n_spins) * m(mu) * m(nu) + G(mu, nu), 0.5 * s(mu, nu)};
}

Mat3 coherent_covariance(const MeanFieldState& m) {
    const double norm = m.norm();
    if (norm == 0.0) throw std::invalid_argument("coherent_covariance: m must be nonzero");
    const Vec3 n = m / norm;
    return 0.5 * (Mat3::Identity() - n * n.transpose());
}

Mat3 stationary_covariance(const SystemParams& p, const MeanFieldState& m) {
    const Mat3 w = drift_matrix(p, m);
    const Mat3 s = symplectic(m);
    const Mat3 q = s * noise_matrices(p).A * s;
    // Unknowns: the six independent entries of symmetric G. The Lyapunov map has a kernel
    // along m; the rows G·m = 0 pin the physical solution (no longitudinal fluctuation).
    static constexpr int idx[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    Eigen::Matrix<double, 9, 6> lhs = Eigen::Matrix<double, 9, 6>::Zero();
    Eigen::Matrix<double, 9, 1> rhs = Eigen::Matrix<double, 9, 1>::Zero();
    for (int c = 0; c < 6; ++c) {
        Mat3 e = Mat3::Zero();
        e(idx[c][0], idx[c][1]) = e(idx[c][1], idx[c][0]) = 1.0;
        const Mat3 img = w * e + e * w.transpose();
        for (int r = 0; r < 6; ++r) lhs(r, c) = img(idx[r][0], idx[r][1]);
        lhs.block<3, 1>(6, c) = e * m;
    }
    for (int r = 0; r < 6; ++r) rhs(r) = q(idx[r][0], idx[r][1]);
    const Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix<double, 9, 6>> cod(lhs);
    const Eigen::Matrix<double, 6, 1> x = cod.solve(rhs);
    Mat3 g;
    for (int c = 0; c < 6; ++c) g(idx[c][0], idx[c][1]) = g(idx[c][1], idx[c][0]) = x(c);
    const double res = (lhs * x - rhs).cwiseAbs().maxCoeff();
    if (res > 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) {
        std::ostringstream os;
        os << "stationary_covariance: no fixed point at this m (residual " << res << ")";
        throw NumericalError(os.str());
    }
    return g;
}

void joint_integrate_observe(const SystemParams& p, const MeanFieldState& m0, const Mat3& G0, double t_max,
                             const JointOptions& opts, const std::function<void(const FluctuationSample&)>& observer) {
    if (!(opts.dt > 0.0)) throw std::invalid_argument("joint_integrate: dt must be positive");
    if (opts.store_every < 1) throw std::invalid_argument("joint_integrate: store_every must be >= 1");
    if (!(p.gamma > 0.0)) throw std::invalid_argument("joint_integrate: gamma must be positive");
    const double pole = c_pole(p);
    const NoiseMatrices nm = noise_matrices(p);
    const double g2 = kSqrt2 * p.gamma;

    // m is carried as (m_x, m_y − pole, m_z), matching mf_integrate.
    const auto rhs = [&](const Joint& y) {
        const Vec3 u = y.head<3>();
        const MeanFieldState m(u.x(), u.y() + pole, u.z());
        Joint dy;
        dy(0) = g2 * u.z() * u.x();
        dy(1) = g2 * u.z() * u.y();
        dy(2) = p.omega_rabi * m.y() - g2 * (m.x() * m.x() + m.y() * m.y());
        const Mat3 g = unpack_g(y);
        const Mat3 w = drift_matrix(p, m);
        const Mat3 s = symplectic(m);
        const Mat3 dg = w * g + g * w.transpose() - s * nm.A * s;
        dy.tail<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(Mat3(0.5 * (dg + dg.transpose())).data());
        return dy;
    };

    auto emit = [&](std::int64_t k, const Joint& y) {
        FluctuationSample smp;
        smp.t = static_cast<double>(k) * opts.dt;
        smp.m = MeanFieldState(y(0), y(1) + pole, y(2));
        const Mat3 g = unpack_g(y);
        smp.G = 0.5 * (g + g.transpose());
        smp.lambda = symplectic_eigenvalue({smp.G, smp.m});
        if (smp.lambda < 0.5 - opts.physicality_tol) {
            std::ostringstream os;
            os << "joint_integrate: physicality violated, lambda = " << smp.lambda << " at t = " << smp.t;
            throw IntegratorError(os.str());
        }
        smp.entropy = gaussian_entropy_from_lambda(std::max(smp.lambda, 0.5));
        observer(smp);
    };

    const std::int64_t steps = step_count(t_max, opts.dt);
    Joint y = pack(Vec3(m0.x(), m0.y() - pole, m0.z()), G0);
    emit(0, y);
    for (std::int64_t k = 1; k <= steps; ++k) {
        y = rk4_step(y, opts.dt, rhs);
        if (k % opts.store_every == 0 || k == steps) emit(k, y);
    }
}

std::vector<FluctuationSample> joint_integrate(const SystemParams& p, const MeanFieldState& m0, const Mat3& G0,
                                               double t_max, const JointOptions& opts) {
    std::vector<FluctuationSample> out;
    joint_integrate_observe(p, m0, G0, t_max, opts, [&out](const FluctuationSample& s) { out.push_back(s); });
    return out;
}

}  // namespace btc
