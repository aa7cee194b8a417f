#include "btc/meanfield.hpp"

#include "btc/rk4.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace btc {

Vec3 mf_rhs(const SystemParams& p, const MeanFieldState& m) {
    const double g = kSqrt2 * p.gamma;
    return {g * m.z() * m.x(),
            m.z() * (g * m.y() - p.omega_rabi),
            p.omega_rabi * m.y() - g * (m.x() * m.x() + m.y() * m.y())};
}

double c_pole(const SystemParams& p) {
    return p.omega_rabi / (kSqrt2 * p.gamma);
}

double conserved_c(const SystemParams& p, const MeanFieldState& m) {
    const double den = m.y() - c_pole(p);
    if (std::abs(den) <= 1e-12) throw std::domain_error("conserved_c: state lies on the singular manifold m_y = Omega/(sqrt2 Gamma)");
    return m.x() / den;
}

namespace {

// Integration variables (m_x, m_y − Ω/(√2Γ), m_z).
Vec3 shifted_rhs(const SystemParams& p, double pole, const Vec3& u) {
    const double g = kSqrt2 * p.gamma;
    const double my = u.y() + pole;
    return {g * u.z() * u.x(), g * u.z() * u.y(), p.omega_rabi * my - g * (u.x() * u.x() + my * my)};
}

double c_or_nan(const Vec3& u) {
    if (std::abs(u.y()) < 1e-300) return std::numeric_limits<double>::quiet_NaN();
    return u.x() / u.y();
}

}  // namespace

namespace {

// Shared driver: calls emit(k, m, c) on stored samples, c computed from the offset variable.
template <class Emit>
void integrate_shifted(const SystemParams& p, const MeanFieldState& m0, double t_max, const MeanFieldOptions& opts,
                       Emit&& emit) {
    if (!(opts.dt > 0.0)) throw std::invalid_argument("mf_integrate: dt must be positive");
    if (opts.store_every < 1) throw std::invalid_argument("mf_integrate: store_every must be >= 1");
    if (!(p.gamma > 0.0)) throw std::invalid_argument("mf_integrate: gamma must be positive");
    const double pole = c_pole(p);
    const std::int64_t steps = step_count(t_max, opts.dt);
    const auto rhs = [&p, pole](const Vec3& u) { return shifted_rhs(p, pole, u); };

    Vec3 u(m0.x(), m0.y() - pole, m0.z());
    const double norm0 = m0.squaredNorm();
    const double c0 = c_or_nan(u);

    auto sample = [&](std::int64_t k) {
        const MeanFieldState m(u.x(), u.y() + pole, u.z());
        const double t = static_cast<double>(k) * opts.dt;
        const double dn = std::abs(m.squaredNorm() - norm0);
        if (dn > opts.drift_tol) {
            std::ostringstream os;
            os << "mf_integrate: |m|^2 drift " << dn << " at t = " << t;
            throw IntegratorError(os.str());
        }
        const double c = c_or_nan(u);
        if (std::isfinite(c0) && std::isfinite(c)) {
            const double dc = std::abs(c - c0) / std::max(1.0, std::abs(c0));
            if (dc > opts.drift_tol) {
                std::ostringstream os;
                os << "mf_integrate: conserved c drift " << dc << " at t = " << t;
                throw IntegratorError(os.str());
            }
        }
        emit(t, m, c);
    };

    sample(0);
    for (std::int64_t k = 1; k <= steps; ++k) {
        u = rk4_step(u, opts.dt, rhs);
        if (k % opts.store_every == 0 || k == steps) sample(k);
    }
}

}  // namespace

void mf_integrate_observe(const SystemParams& p, const MeanFieldState& m0, double t_max, const MeanFieldOptions& opts,
                          const std::function<void(double, const MeanFieldState&)>& observer) {
    integrate_shifted(p, m0, t_max, opts, [&](double t, const MeanFieldState& m, double) { observer(t, m); });
}

MeanFieldTrajectory mf_integrate(const SystemParams& p, const MeanFieldState& m0, double t_max,
                                 const MeanFieldOptions& opts) {
    MeanFieldTrajectory traj;
    integrate_shifted(p, m0, t_max, opts, [&](double t, const MeanFieldState& m, double c) {
        traj.times.push_back(t);
        traj.states.push_back(m);
        traj.c_values.push_back(c);
    });
    return traj;
}

MeanFieldState stationary_fixed_point(const SystemParams& p) {
    if (!(std::abs(p.omega_rabi) <= p.gamma))
        throw std::domain_error("stationary_fixed_point: requires |Omega| <= Gamma");
    const double g = p.gamma;
    return {0.0, p.omega_rabi / (kSqrt2 * g),
            -std::sqrt(g * g - p.omega_rabi * p.omega_rabi) / (kSqrt2 * g)};
}

Phase classify_phase(const SystemParams& p) {
    if (p.omega_rabi < p.gamma) return Phase::stationary;
    if (p.omega_rabi > p.gamma) return Phase::time_crystal;
    return Phase::critical;
}

double mf_period(const SystemParams& p, const MeanFieldState& m0, const PeriodOptions& opts) {
    if (classify_phase(p) != Phase::time_crystal)
        throw std::domain_error("mf_period: requires Omega > Gamma (time-crystal phase)");
    MeanFieldOptions mo;
    mo.dt = opts.dt;
    std::vector<double> t, z;
    mf_integrate_observe(p, m0, opts.t_max, mo, [&](double tt, const MeanFieldState& m) {
        t.push_back(tt);
        z.push_back(m.z());
    });
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    const double mid = 0.5 * (*lo + *hi);
    if (*hi - *lo < 1e-9) throw NumericalError("mf_period: m_z does not oscillate (orbit sits on a fixed point)");

    std::vector<double> crossings;
    for (std::size_t k = 1; k < z.size(); ++k) {
        const double a = z[k - 1] - mid;
        const double b = z[k] - mid;
        if (a < 0.0 && b >= 0.0) crossings.push_back(t[k - 1] + (t[k] - t[k - 1]) * (-a) / (b - a));
    }
    if (crossings.size() < 3) throw NumericalError("mf_period: fewer than three crossings within t_max");

    std::vector<double> periods;
    for (std::size_t k = 1; k < crossings.size(); ++k) periods.push_back(crossings[k] - crossings[k - 1]);
    for (std::size_t k = 1; k < periods.size(); ++k) {
        if (std::abs(periods[k] - periods[k - 1]) > opts.jitter_tol * periods[k])
            throw NumericalError("mf_period: period jitter exceeds tolerance");
    }
    // Average over the full span of detected cycles.
    return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

}  // namespace btc
