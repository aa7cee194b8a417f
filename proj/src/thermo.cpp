#include "btc/thermo.hpp"

#include "btc/dicke.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace btc {

namespace {

// Diagonals of V_+V_− and V_−V_+ in the V_z basis.
struct LadderDiagonals {
    Eigen::VectorXd pm, mp;
};

LadderDiagonals ladder_diagonals(int n_spins) {
    const Operator vp = collective_op(n_spins, Axis::plus);
    const Operator vm = collective_op(n_spins, Axis::minus);
    return {(vp * vm).diagonal().real(), (vm * vp).diagonal().real()};
}

void check_dim(const SystemParams& p, const Operator& rho, const char* what) {
    if (rho.rows() != sector_dim(p.n_spins) || rho.cols() != rho.rows()) {
        std::ostringstream os;
        os << what << ": state dimension does not match N + 1";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

double heat_current(const SystemParams& p, const Operator& rho) {
    check_dim(p, rho, "heat_current");
    const LadderDiagonals ld = ladder_diagonals(p.n_spins);
    const Eigen::VectorXd pop = rho.diagonal().real();
    const double mp = pop.dot(ld.mp);
    const double pm = pop.dot(ld.pm);
    return p.omega_bath * p.gamma / p.n_spins * (p.n_beta * mp - (p.n_beta + 1.0) * pm);
}

double internal_energy_rate(const SystemParams& p, const Operator& rho) {
    check_dim(p, rho, "internal_energy_rate");
    if (p.omega_rabi == 0.0) return 0.0;
    const Operator vx = collective_op(p.n_spins, Axis::x);
    const Operator vz = collective_op(p.n_spins, Axis::z);
    const double sym = expectation(rho, vx * vz + vz * vx).real() / 2.0;
    const double mx = expectation(rho, vx).real();
    return p.omega_rabi * p.gamma / p.n_spins * (sym - (2.0 * p.n_beta + 1.0) / kSqrt2 * mx);
}

double work_power(const SystemParams& p, const Operator& rho) {
    return internal_energy_rate(p, rho) - heat_current(p, rho);
}

double entropy_flux_rate(const SystemParams& p, const Operator& rho) {
    if (p.zero_temperature())
        throw std::domain_error("entropy_flux_rate: zero-temperature flux undefined (beta infinite); use the sentinel form");
    return p.beta() * heat_current(p, rho);
}

double entropy_flux_or_sentinel(const SystemParams& p, double q_dot) {
    if (!p.zero_temperature()) return p.beta() * q_dot;
    if (q_dot == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), q_dot);
}

double vn_entropy(const Operator& rho) {
    return von_neumann_entropy(rho);
}

SteadyLog steady_state_log(const Operator& pi, double cutoff) {
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(pi));
    if (es.info() != Eigen::Success) throw NumericalError("steady_state_log: eigensolver failed");
    const Eigen::Index d = pi.rows();
    Eigen::VectorXcd logs(d), kernel(d);
    SteadyLog out;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double ev = es.eigenvalues()(i);
        if (ev > cutoff) {
            logs(i) = std::log(ev);
            kernel(i) = 0.0;
        } else {
            logs(i) = 0.0;
            kernel(i) = 1.0;
            out.projected = true;
        }
    }
    const Operator& v = es.eigenvectors();
    out.log_pi = v * logs.asDiagonal() * v.adjoint();
    out.kernel_projector = v * kernel.asDiagonal() * v.adjoint();
    return out;
}

double spohn_bound(const LindbladGenerator& gen, const Operator& rho, const SteadyLog& log_pi) {
    const Operator l = gen.apply(rho);
    if (log_pi.projected) {
        const double leak = max_norm(log_pi.kernel_projector * l * log_pi.kernel_projector);
        if (leak > 1e-10) {
            std::ostringstream os;
            os << "spohn_bound: L[rho] has weight " << leak << " on the kernel of a singular steady state";
            throw NumericalError(os.str());
        }
    }
    return -expectation(l, log_pi.log_pi).real();
}

double spohn_bound(const LindbladGenerator& gen, const Operator& rho, const Operator& pi) {
    return spohn_bound(gen, rho, steady_state_log(pi));
}

std::vector<double> cumulative_time_average(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size() || times.empty())
        throw std::invalid_argument("cumulative_time_average: times and values must be non-empty and of equal length");
    std::vector<double> out(times.size());
    out[0] = values[0];
    double integral = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        integral += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
        out[k] = integral / (times[k] - times[0]);
    }
    return out;
}

double time_avg_power(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() < 2) throw std::invalid_argument("time_avg_power: need at least two samples");
    return cumulative_time_average(times, values).back();
}

std::vector<double> central_difference(const std::vector<double>& t, const std::vector<double>& f) {
    const std::size_t n = t.size();
    if (f.size() != n || n < 3) throw std::invalid_argument("central_difference: need at least three samples");
    std::vector<double> d(n);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double h1 = t[k] - t[k - 1];
        const double h2 = t[k + 1] - t[k];
        // Non-uniform three-point formula; reduces to (f[k+1] − f[k−1])/2h on a uniform grid.
        d[k] = (h1 * h1 * f[k + 1] - h2 * h2 * f[k - 1] + (h2 * h2 - h1 * h1) * f[k]) / (h1 * h2 * (h1 + h2));
    }
    const double h = t[1] - t[0];
    const double hn = t[n - 1] - t[n - 2];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * hn);
    return d;
}

std::vector<ThermoRecord> thermo_records(const LindbladGenerator& gen, const Trajectory& traj,
                                         const std::optional<Operator>& pi) {
    const SystemParams& p = gen.params();
    const std::size_t n = traj.times.size();
    if (n < 3) throw std::invalid_argument("thermo_records: trajectory needs at least three samples");
    const SteadyLog lp = steady_state_log(pi ? *pi : steady_state(gen));

    std::vector<ThermoRecord> rec(n);
    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Operator& rho = traj.states[k];
        ThermoRecord& r = rec[k];
        r.t = traj.times[k];
        const double q = heat_current(p, rho);
        const double u = internal_energy_rate(p, rho);
        r.q_dot = q / p.n_spins;
        r.u_dot = u / p.n_spins;
        r.w_dot = (u - q) / p.n_spins;
        r.S = vn_entropy(rho);
        r.phi_dot = entropy_flux_or_sentinel(p, q);
        r.b_dot = spohn_bound(gen, rho, lp);
        s[k] = r.S;
    }
    const std::vector<double> sd = central_difference(traj.times, s);
    for (std::size_t k = 0; k < n; ++k) {
        rec[k].S_dot = sd[k];
        rec[k].sigma_dot = entropy_production_rate(sd[k], rec[k].phi_dot);
    }
    return rec;
}

MeanFieldPower mf_power(const SystemParams& p, const MeanFieldState& m, const Mat3* G) {
    const double wg = p.omega_bath * p.gamma;
    double q = -wg * (m.x() * m.x() + m.y() * m.y());
    double u = p.omega_rabi * p.gamma * m.x() * m.z();
    if (G != nullptr) {
        const double inv_n = 1.0 / p.n_spins;
        const double two_n1 = 2.0 * p.n_beta + 1.0;
        q += wg * inv_n * (-two_n1 * kSqrt2 * m.z() - (*G)(0, 0) - (*G)(1, 1));
        u += p.omega_rabi * p.gamma * inv_n * ((*G)(0, 2) - two_n1 / kSqrt2 * m.x());
    }
    return {q, u, u - q};
}

double stationary_power(const SystemParams& p) {
    if (!(std::abs(p.omega_rabi) <= p.gamma)) throw std::domain_error("stationary_power: requires |Omega| <= Gamma");
    return p.omega_bath * p.omega_rabi * p.omega_rabi / (2.0 * p.gamma);
}

AsymptoticPower asymptotic_power(const SystemParams& p, const MeanFieldState& m0, const AsymptoticOptions& opts) {
    MeanFieldOptions mo;
    mo.dt = opts.dt;
    if (classify_phase(p) != Phase::time_crystal) {
        MeanFieldState last = m0;
        mf_integrate_observe(p, m0, opts.t_settle, mo, [&last](double, const MeanFieldState& m) { last = m; });
        const MeanFieldPower pw = mf_power(p, last);
        return {pw.w_dot, pw.q_dot, 0.0};
    }
    // The orbit is exactly periodic from the start; averaging over whole periods removes the
    // bounded oscillating part of u(t) that otherwise decays only like 1/t.
    PeriodOptions po;
    po.dt = opts.dt;
    po.t_max = std::max(opts.t_average, 50.0);
    const double period = mf_period(p, m0, po);
    const double cycles = std::floor(opts.t_average / period);
    if (cycles < 1.0) throw NumericalError("asymptotic_power: averaging window shorter than one period");
    const double span = cycles * period;
    // Integrate over exactly `cycles` periods with a step that divides the span.
    MeanFieldOptions fine;
    const double steps = std::ceil(span / opts.dt);
    fine.dt = span / steps;
    std::vector<double> t, w, q;
    mf_integrate_observe(p, m0, span, fine, [&](double tt, const MeanFieldState& m) {
        const MeanFieldPower pw = mf_power(p, m);
        t.push_back(tt);
        w.push_back(pw.w_dot);
        q.push_back(pw.q_dot);
    });
    return {time_avg_power(t, w), time_avg_power(t, q), period};
}

EntropySplit collision_entropy_split(const Operator& joint_post, const Operator& ancilla_pre, Eigen::Index dim_system) {
    const Eigen::Index de = ancilla_pre.rows();
    if (joint_post.rows() != dim_system * de)
        throw std::invalid_argument("collision_entropy_split: joint dimension does not match system x ancilla");
    const Operator rs = partial_trace_second(joint_post, dim_system, de);
    const Operator re = partial_trace_first(joint_post, dim_system, de);
    const double mi = von_neumann_entropy(rs) + von_neumann_entropy(re) - von_neumann_entropy(joint_post);
    return {mi, relative_entropy(re, ancilla_pre)};
}

}  // namespace btc
