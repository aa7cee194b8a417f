#include "btc/liouville.hpp"

#include "btc/dicke.hpp"
#include "btc/rk4.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace btc {

LindbladGenerator::LindbladGenerator(const SystemParams& params) : params_(params) {
    params_.validate(SystemParams::kDefaultMaxSpins, /*allow_zero_gamma=*/true);
    dim_ = sector_dim(params_.n_spins);
    h_ = btc::hamiltonian(params_);
    v_plus_ = collective_op(params_.n_spins, Axis::plus);
    v_minus_ = collective_op(params_.n_spins, Axis::minus);
    rate_down_ = params_.rate_down();
    rate_up_ = params_.rate_up();
    h_sp_ = h_.sparseView();
    vp_sp_ = v_plus_.sparseView();
    vm_sp_ = v_minus_.sparseView();
    // V_+V_− and V_−V_+ are diagonal in the V_z basis.
    const Eigen::VectorXd pm = (v_plus_ * v_minus_).diagonal().real();
    const Eigen::VectorXd mp = (v_minus_ * v_plus_).diagonal().real();
    anti_ = rate_down_ * pm + rate_up_ * mp;
}

Operator LindbladGenerator::apply(const Operator& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_)
        throw std::invalid_argument("LindbladGenerator::apply: dimension mismatch");
    Operator out = cplx(0.0, -1.0) * (h_sp_ * rho - rho * h_sp_);
    if (rate_down_ != 0.0) out.noalias() += rate_down_ * (Operator(vm_sp_ * rho) * vp_sp_);
    if (rate_up_ != 0.0) out.noalias() += rate_up_ * (Operator(vp_sp_ * rho) * vm_sp_);
    for (Eigen::Index j = 0; j < dim_; ++j)
        for (Eigen::Index i = 0; i < dim_; ++i) out(i, j) -= 0.5 * (anti_(i) + anti_(j)) * rho(i, j);
    return out;
}

Operator LindbladGenerator::apply_adjoint(const Operator& x) const {
    if (x.rows() != dim_ || x.cols() != dim_)
        throw std::invalid_argument("LindbladGenerator::apply_adjoint: dimension mismatch");
    Operator out = cplx(0.0, 1.0) * (h_sp_ * x - x * h_sp_);
    if (rate_down_ != 0.0) out.noalias() += rate_down_ * (Operator(vp_sp_ * x) * vm_sp_);
    if (rate_up_ != 0.0) out.noalias() += rate_up_ * (Operator(vm_sp_ * x) * vp_sp_);
    for (Eigen::Index j = 0; j < dim_; ++j)
        for (Eigen::Index i = 0; i < dim_; ++i) out(i, j) -= 0.5 * (anti_(i) + anti_(j)) * x(i, j);
    return out;
}

Eigen::MatrixXcd LindbladGenerator::superoperator() const {
    const Eigen::Index n = dim_ * dim_;
    Eigen::MatrixXcd s(n, n);
    Operator unit = Operator::Zero(dim_, dim_);
    for (Eigen::Index j = 0; j < dim_; ++j) {
        for (Eigen::Index i = 0; i < dim_; ++i) {
            unit(i, j) = 1.0;
            s.col(i + dim_ * j) = vec(apply(unit));
            unit(i, j) = 0.0;
        }
    }
    return s;
}

double LindbladGenerator::stable_dt() const {
    const double h_norm = std::abs(params_.omega_rabi) * 0.5 * params_.n_spins;
    const double diss = 2.0 * (anti_.size() ? anti_.maxCoeff() : 0.0);
    const double bound = 2.0 * h_norm + 2.0 * diss;
    if (bound <= 0.0) return 0.05;
    return std::min(0.05, 2.0 / bound);
}

void evolve_observe(const LindbladGenerator& gen, const Operator& rho0, double t_max, const EvolveOptions& opts,
                    const std::function<void(double, const Operator&)>& observer) {
    if (!(opts.dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    if (!(t_max >= opts.dt)) throw std::invalid_argument("evolve: t_max must be >= dt");
    if (opts.store_every < 1) throw std::invalid_argument("evolve: store_every must be >= 1");
    if (rho0.rows() != gen.dim() || rho0.cols() != gen.dim())
        throw std::invalid_argument("evolve: initial state dimension mismatch");
    require_density(rho0, "evolve: initial state");

    const std::int64_t steps = step_count(t_max, opts.dt);
    const auto rhs = [&gen](const Operator& r) { return gen.apply(r); };

    auto emit = [&](std::int64_t k, const Operator& r) {
        const double tr = r.trace().real();
        const double drift = std::abs(tr - 1.0);
        if (drift > opts.renormalize_tol) {
            std::ostringstream os;
            os << "evolve: trace drift " << drift << " at t = " << k * opts.dt << " (reduce dt)";
            throw IntegratorError(os.str());
        }
        const Operator stored = r / tr;
        if (opts.check_positivity) {
            const double min_ev = hermitian_eigenvalues(stored).minCoeff();
            if (min_ev < -opts.positivity_tol) {
                std::ostringstream os;
                os << "evolve: positivity violated (min eigenvalue " << min_ev << ") at t = " << k * opts.dt
                   << " (reduce dt)";
                throw IntegratorError(os.str());
            }
        }
        observer(static_cast<double>(k) * opts.dt, stored);
    };

    Operator rho = rho0;
    emit(0, rho);
    for (std::int64_t k = 1; k <= steps; ++k) {
        rho = rk4_step(rho, opts.dt, rhs);
        if (k % opts.store_every == 0 || k == steps) emit(k, rho);
    }
}

Trajectory evolve(const LindbladGenerator& gen, const Operator& rho0, double t_max, const EvolveOptions& opts) {
    Trajectory traj;
    evolve_observe(gen, rho0, t_max, opts, [&traj](double t, const Operator& r) {
        traj.times.push_back(t);
        traj.states.push_back(r);
        traj.magnetization.push_back(magnetization(r));
    });
    return traj;
}

namespace {

Operator normalise_null_vector(const Eigen::VectorXcd& v, Eigen::Index dim) {
    Operator rho = unvec(v, dim);
    rho /= rho.trace();
    return hermitian_part(rho);
}

int count_null_dimension(const Eigen::MatrixXcd& s, double rel_threshold) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(s);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double thr = rel_threshold * sv(0);
    return static_cast<int>((sv.array() <= thr).count());
}

[[noreturn]] void degenerate(int null_dim) {
    std::ostringstream os;
    os << "steady_state: degenerate null space of dimension " << null_dim;
    throw NumericalError(os.str());
}

}  // namespace

SteadyState steady_state_nullspace(const LindbladGenerator& gen, const SteadyStateOptions& opts) {
    const Eigen::Index d = gen.dim();
    const Eigen::MatrixXcd s = gen.superoperator();
    SteadyState out;

    if (s.rows() <= opts.svd_max_dim) {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(s, Eigen::ComputeFullV);
        const Eigen::VectorXd& sv = svd.singularValues();
        const double thr = opts.null_rel_threshold * sv(0);
        const int null_dim = static_cast<int>((sv.array() <= thr).count());
        if (null_dim > 1) degenerate(null_dim);
        out.rho = normalise_null_vector(svd.matrixV().col(s.cols() - 1), d);
        out.method = SteadyStateMethod::svd;
    } else {
        // Tr L[X] = 0 makes the rows for diagonal entries linearly dependent; replace the
        // (0,0) row by the trace functional so a unique steady state gives a regular system.
        Eigen::MatrixXcd m = s;
        m.row(0).setZero();
        for (Eigen::Index i = 0; i < d; ++i) m(0, i + d * i) = 1.0;
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m.rows());
        rhs(0) = 1.0;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
        if (lu.rcond() < 1e-14) degenerate(count_null_dimension(s, opts.null_rel_threshold));
        out.rho = normalise_null_vector(lu.solve(rhs), d);
        out.method = SteadyStateMethod::bordered_lu;
    }
    out.residual = max_norm(gen.apply(out.rho));
    if (out.residual > opts.residual_tol) {
        std::ostringstream os;
        os << "steady_state: null-space residual " << out.residual << " exceeds " << opts.residual_tol;
        throw NumericalError(os.str());
    }
    return out;
}

SteadyState steady_state_by_evolution(const LindbladGenerator& gen, const SteadyStateOptions& opts) {
    const Eigen::Index d = gen.dim();
    const double dt = opts.evolution_dt > 0.0 ? opts.evolution_dt : gen.stable_dt();
    const auto rhs = [&gen](const Operator& r) { return gen.apply(r); };
    const std::int64_t max_steps = step_count(opts.evolution_t_max, dt);
    const std::int64_t check_every = std::max<std::int64_t>(1, std::llround(0.5 / dt));

    Operator rho = Operator::Identity(d, d) / static_cast<double>(d);
    for (std::int64_t k = 1; k <= max_steps; ++k) {
        rho = rk4_step(rho, dt, rhs);
        if (k % check_every == 0) {
            rho = hermitian_part(rho / rho.trace());
            const double res = max_norm(gen.apply(rho));
            if (res < opts.evolution_tol) return {rho, SteadyStateMethod::evolution, res};
        }
    }
    throw NumericalError("steady_state: long-time evolution did not converge before evolution_t_max");
}

SteadyState solve_steady_state(const LindbladGenerator& gen, const SteadyStateOptions& opts) {
    if (gen.params().n_spins <= opts.max_spins_nullspace) return steady_state_nullspace(gen, opts);
    return steady_state_by_evolution(gen, opts);
}

}  // namespace btc
