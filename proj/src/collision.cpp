#include "btc/collision.hpp"

#include "btc/dicke.hpp"
#include "btc/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace btc {

int default_n_max(double n_beta) {
    if (n_beta < 0.0) throw std::invalid_argument("n_beta must satisfy n_beta >= 0");
    if (n_beta == 0.0) return 2;
    const double ratio = n_beta / (n_beta + 1.0);
    const int n = static_cast<int>(std::ceil(std::log(1e-8) / std::log(ratio)));
    return std::max(2, n);
}

OscillatorAncilla::OscillatorAncilla(double n_beta, double omega_bath, int n_max)
    : n_beta_(n_beta), omega_(omega_bath), n_max_(n_max > 0 ? n_max : default_n_max(n_beta)) {
    if (n_beta < 0.0) throw std::invalid_argument("n_beta must satisfy n_beta >= 0");
    if (!(omega_bath > 0.0)) throw std::invalid_argument("omega_bath must satisfy omega > 0");
    const double tail = tail_weight();
    if (tail >= 1e-8) {
        std::ostringstream os;
        os << "ancilla truncation n_max = " << n_max_ << " discards thermal weight " << tail
           << " (needs < 1e-8; default n_max is " << default_n_max(n_beta) << ")";
        throw std::invalid_argument(os.str());
    }
    const Eigen::Index d = n_max_ + 1;
    const double ratio = n_beta / (n_beta + 1.0);
    Eigen::VectorXd p(d);
    double w = 1.0;
    for (Eigen::Index n = 0; n < d; ++n) {
        p(n) = w;
        w *= ratio;
    }
    p /= p.sum();
    state_ = p.cast<cplx>().asDiagonal();
    a_ = Operator::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) a_(n - 1, n) = std::sqrt(static_cast<double>(n));
    number_ = Eigen::VectorXd::LinSpaced(d, 0.0, static_cast<double>(d - 1)).cast<cplx>().asDiagonal();
}

double OscillatorAncilla::tail_weight() const {
    if (n_beta_ == 0.0) return 0.0;
    return std::pow(n_beta_ / (n_beta_ + 1.0), n_max_ + 1);
}

double CollisionConfig::coupling(const SystemParams& p) const {
    if (!(delta_t > 0.0)) throw std::invalid_argument("collision delta_t must be positive");
    return std::sqrt(p.gamma / (p.n_spins * delta_t));
}

Operator interaction_hamiltonian(const SystemParams& p, const CollisionConfig& cfg, const OscillatorAncilla& anc) {
    const double g = cfg.coupling(p);
    const Operator vm = collective_op(p.n_spins, Axis::minus);
    const Operator vp = collective_op(p.n_spins, Axis::plus);
    return g * (kron(vm, anc.annihilation().adjoint()) + kron(vp, anc.annihilation()));
}

Operator joint_hamiltonian(const SystemParams& p, const CollisionConfig& cfg, const OscillatorAncilla& anc) {
    const Eigen::Index ds = sector_dim(p.n_spins);
    const Operator id_s = Operator::Identity(ds, ds);
    const Operator id_e = Operator::Identity(anc.dim(), anc.dim());
    return kron(hamiltonian(p), id_e) + kron(id_s, anc.omega_bath() * anc.number()) +
           interaction_hamiltonian(p, cfg, anc);
}

CollisionModel::CollisionModel(const SystemParams& p, const CollisionConfig& cfg, const OscillatorAncilla& anc)
    : params_(p), cfg_(cfg), anc_(anc) {
    params_.validate(SystemParams::kDefaultMaxSpins, /*allow_zero_gamma=*/true);
    const Eigen::Index dim = sector_dim(p.n_spins) * anc.dim();
    if (dim > cfg.max_joint_dim) {
        std::ostringstream os;
        os << "collision: joint dimension " << dim << " exceeds cap " << cfg.max_joint_dim;
        throw std::invalid_argument(os.str());
    }
    h_sys_ = hamiltonian(p);
    h_int_ = interaction_hamiltonian(p, cfg, anc);
    u_ = expm(cplx(0.0, -cfg.delta_t) * joint_hamiltonian(p, cfg, anc));
}

CollisionStep CollisionModel::collide(const Operator& rho) const {
    const Eigen::Index ds = sector_dim(params_.n_spins);
    const Eigen::Index de = anc_.dim();
    if (rho.rows() != ds || rho.cols() != ds) throw std::invalid_argument("collide: state dimension mismatch");

    const Operator joint_pre = kron(rho, anc_.state());
    CollisionStep st;
    st.joint_post = u_ * joint_pre * u_.adjoint();
    st.rho_next = partial_trace_second(st.joint_post, ds, de);
    const Operator anc_post = partial_trace_first(st.joint_post, ds, de);

    st.top_population = anc_post(de - 1, de - 1).real();
    if (st.top_population > cfg_.leakage_tol) {
        std::ostringstream os;
        os << "collision: top ancilla level population " << st.top_population << " exceeds " << cfg_.leakage_tol
           << " (increase n_max beyond " << anc_.n_max() << ")";
        throw TruncationError(os.str());
    }
    const double dn = (expectation(anc_post, anc_.number()) - expectation(anc_.state(), anc_.number())).real();
    st.delta_e = anc_.omega_bath() * dn;
    st.heat = -st.delta_e;
    st.delta_u = (expectation(st.rho_next, h_sys_) - expectation(rho, h_sys_)).real();
    st.work = -expectation(Operator(st.joint_post - joint_pre), h_int_).real();
    return st;
}

CollisionStep collide_once(const Operator& rho, const SystemParams& p, const CollisionConfig& cfg,
                           const OscillatorAncilla& anc) {
    return CollisionModel(p, cfg, anc).collide(rho);
}

namespace {

CollisionTrajectory run_collisions(const Operator& rho0, const CollisionModel& model) {
    CollisionTrajectory tr;
    tr.n_max_used = model.ancilla().n_max();
    const double dt = model.config().delta_t;
    Operator rho = rho0;
    double heat = 0.0;
    tr.times.push_back(0.0);
    tr.states.push_back(rho);
    tr.heat_cumulative.push_back(0.0);
    for (int k = 1; k <= model.config().n_collisions; ++k) {
        CollisionStep st = model.collide(rho);
        rho = std::move(st.rho_next);
        heat += st.heat;
        tr.times.push_back(k * dt);
        tr.states.push_back(rho);
        tr.heat_cumulative.push_back(heat);
    }
    return tr;
}

}  // namespace

CollisionTrajectory collision_trajectory(const Operator& rho0, const SystemParams& p, const CollisionConfig& cfg,
                                         int n_max) {
    if (cfg.n_collisions < 0) throw std::invalid_argument("collision: n_collisions must be non-negative");
    require_density(rho0, "collision_trajectory: initial state");
    int nm = n_max > 0 ? n_max : default_n_max(p.n_beta);
    for (;;) {
        const OscillatorAncilla anc(p.n_beta, p.omega_bath, nm);
        try {
            return run_collisions(rho0, CollisionModel(p, cfg, anc));
        } catch (const TruncationError&) {
            const Eigen::Index next_dim = sector_dim(p.n_spins) * (2 * nm + 1);
            if (next_dim > cfg.max_joint_dim) throw;
            nm *= 2;
        }
    }
}

std::vector<CollisionComparisonRow> compare_with_lindblad(const Operator& rho0, const SystemParams& p,
                                                          const CollisionConfig& cfg, int n_max) {
    const CollisionTrajectory ct = collision_trajectory(rho0, p, cfg, n_max);
    const LindbladGenerator gen(p);
    const Eigen::Index d = gen.dim();
    const Eigen::MatrixXcd s = gen.superoperator();
    const Eigen::MatrixXcd step = expm(cplx(cfg.delta_t) * s);
    const Eigen::MatrixXcd half = expm(cplx(0.5 * cfg.delta_t) * s);

    std::vector<CollisionComparisonRow> rows;
    Eigen::VectorXcd v = vec(rho0);
    double heat = 0.0;
    for (std::size_t k = 0; k < ct.times.size(); ++k) {
        if (k > 0) {
            const Eigen::VectorXcd mid = half * v;
            const Eigen::VectorXcd next = step * v;
            const double q0 = heat_current(p, unvec(v, d));
            const double qm = heat_current(p, unvec(mid, d));
            const double q1 = heat_current(p, unvec(next, d));
            heat += cfg.delta_t / 6.0 * (q0 + 4.0 * qm + q1);
            v = next;
        }
        rows.push_back({static_cast<int>(k), ct.times[k], trace_distance(ct.states[k], unvec(v, d)),
                        ct.heat_cumulative[k], heat});
    }
    return rows;
}

ConvergenceStudy collision_convergence(const Operator& rho0, const SystemParams& p, double t_final,
                                       const std::vector<double>& delta_ts, int n_max) {
    ConvergenceStudy out;
    for (double dt : delta_ts) {
        CollisionConfig cfg;
        cfg.delta_t = dt;
        const double n = t_final / dt;
        cfg.n_collisions = static_cast<int>(std::llround(n));
        if (std::abs(n - cfg.n_collisions) > 1e-9 * n)
            throw std::invalid_argument("collision_convergence: t_final must be a whole number of collisions");
        const auto rows = compare_with_lindblad(rho0, p, cfg, n_max);
        const auto& last = rows.back();
        const double rel = std::abs(last.heat_cumulative - last.heat_lindblad_cumulative) /
                           std::max(std::abs(last.heat_lindblad_cumulative), 1e-300);
        out.points.push_back({dt, last.trace_distance, last.heat_cumulative, last.heat_lindblad_cumulative, rel});
    }
    for (std::size_t k = 1; k < out.points.size(); ++k) {
        out.distance_ratios.push_back(out.points[k - 1].trace_distance / out.points[k].trace_distance);
        out.heat_error_ratios.push_back(out.points[k - 1].heat_relative_error / out.points[k].heat_relative_error);
    }
    return out;
}

}  // namespace btc
