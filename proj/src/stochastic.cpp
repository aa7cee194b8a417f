#include "btc/stochastic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace btc {

namespace {

constexpr double kEigenCutoff = 1e-14;

// First component with modulus above 1e-10 becomes real positive.
void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double a = std::abs(v(k));
        if (a > 1e-10) {
            v *= std::conj(v(k)) / a;
            return;
        }
    }
}

void validate_channel(const QuantumChannel& ch, double tol) {
    const double comp = ch.completeness_error();
    if (comp > tol) {
        std::ostringstream os;
        os << "channel (" << ch.source << "): Kraus completeness error " << comp << " exceeds " << tol;
        throw NumericalError(os.str());
    }
    const Eigen::Index d = ch.dim();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Operator rho = random_density_matrix(d, 7919 * seed);
        const Operator via_kraus = ch.apply(rho);
        const Operator via_map = unvec(ch.superop * vec(rho), d);
        const double err = max_norm(via_kraus - via_map);
        if (err > tol) {
            std::ostringstream os;
            os << "channel (" << ch.source << "): Kraus action differs from the map by " << err;
            throw NumericalError(os.str());
        }
    }
}

}  // namespace

Operator QuantumChannel::apply(const Operator& rho) const {
    Operator out = Operator::Zero(rho.rows(), rho.cols());
    for (const Operator& k : kraus) out.noalias() += k * rho * k.adjoint();
    return out;
}

double QuantumChannel::completeness_error() const {
    const Eigen::Index d = dim();
    Operator sum = Operator::Zero(d, d);
    for (const Operator& k : kraus) sum.noalias() += k.adjoint() * k;
    return max_norm(sum - Operator::Identity(d, d));
}

Eigen::MatrixXcd superop_from_kraus(const std::vector<Operator>& kraus) {
    if (kraus.empty()) throw std::invalid_argument("superop_from_kraus: empty Kraus set");
    const Eigen::Index d = kraus.front().rows();
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (const Operator& k : kraus) s += kron(k.conjugate(), k);
    return s;
}

Operator random_density_matrix(Eigen::Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Operator g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = cplx(normal(rng), normal(rng));
    Operator rho = g * g.adjoint();
    return rho / rho.trace().real();
}

QuantumChannel channel_from_generator(const LindbladGenerator& gen, double dt_channel) {
    if (!(dt_channel >= 0.0)) throw std::invalid_argument("dt_channel must be non-negative");
    const Eigen::Index d = gen.dim();
    const Eigen::Index dd = d * d;
    QuantumChannel ch;
    ch.dt_channel = dt_channel;
    {
        std::ostringstream os;
        os << "exp(" << dt_channel << " L)";
        ch.source = os.str();
    }
    ch.superop = dt_channel == 0.0 ? Eigen::MatrixXcd::Identity(dd, dd)
                                   : Eigen::MatrixXcd(expm(cplx(dt_channel) * gen.superoperator()));

    // Choi matrix C_{(i,a),(j,b)} = Λ(|i⟩⟨j|)_{ab}.
    Operator choi(dd, dd);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index a = 0; a < d; ++a)
                for (Eigen::Index b = 0; b < d; ++b) choi(i * d + a, j * d + b) = ch.superop(a + d * b, i + d * j);

    Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(choi));
    if (es.info() != Eigen::Success) throw NumericalError("channel_from_generator: Choi eigensolver failed");
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -1e-10) {
        std::ostringstream os;
        os << "channel_from_generator: Choi matrix has negative eigenvalue " << min_ev;
        throw NumericalError(os.str());
    }
    for (Eigen::Index c = dd - 1; c >= 0; --c) {  // descending eigenvalue
        const double lam = es.eigenvalues()(c);
        if (lam <= 1e-12) break;
        Eigen::VectorXcd v = es.eigenvectors().col(c);
        fix_phase(v);
        Operator k(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index a = 0; a < d; ++a) k(a, i) = std::sqrt(lam) * v(i * d + a);
        ch.kraus.push_back(std::move(k));
    }
    validate_channel(ch, 1e-10);
    return ch;
}

QuantumChannel channel_from_kraus(std::vector<Operator> kraus, std::string source, double dt_channel) {
    QuantumChannel ch;
    ch.superop = superop_from_kraus(kraus);
    ch.kraus = std::move(kraus);
    ch.source = std::move(source);
    ch.dt_channel = dt_channel;
    validate_channel(ch, 1e-10);
    return ch;
}

QuantumChannel reversal_map(const QuantumChannel& channel, const Operator& pi) {
    const Eigen::VectorXd r = hermitian_eigenvalues(pi);
    if (r.minCoeff() <= kEigenCutoff) {
        std::ostringstream os;
        os << "reversal_map: reference state is rank-deficient (min eigenvalue " << r.minCoeff()
           << "); zero temperature is not supported";
        throw NumericalError(os.str());
    }
    const Operator sq = hermitian_function(pi, [](double x) { return std::sqrt(x); });
    const Operator isq = hermitian_function(pi, [](double x) { return 1.0 / std::sqrt(x); });
    QuantumChannel rev;
    rev.source = "reversal of " + channel.source;
    rev.dt_channel = channel.dt_channel;
    for (const Operator& k : channel.kraus) rev.kraus.push_back(sq * k.adjoint() * isq);
    rev.superop = superop_from_kraus(rev.kraus);

    const double fix = max_norm(rev.apply(pi) - pi);
    const double comp = rev.completeness_error();
    if (fix > 1e-9 || comp > 1e-9) {
        std::ostringstream os;
        os << "reversal_map: R(pi) - pi = " << fix << ", completeness error " << comp
           << " (pi is not a fixed point of the channel)";
        throw NumericalError(os.str());
    }
    return rev;
}

Eigensystem state_eigensystem(const Operator& rho) {
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(rho));
    if (es.info() != Eigen::Success) throw NumericalError("state_eigensystem: eigensolver failed");
    const Eigen::Index d = rho.rows();
    Eigensystem out;
    out.values.resize(d);
    out.vectors.resize(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        const Eigen::Index src = d - 1 - c;
        double v = es.eigenvalues()(src);
        if (v < -1e-12) {
            std::ostringstream os;
            os << "state_eigensystem: eigenvalue " << v << " below -1e-12";
            throw NumericalError(os.str());
        }
        out.values(c) = std::max(v, 0.0);
        out.vectors.col(c) = es.eigenvectors().col(src);
        fix_phase(out.vectors.col(c));
    }
    out.values /= out.values.sum();
    return out;
}

SpectralData spectral_data(const QuantumChannel& channel, const Operator& rho, const Operator& pi) {
    return {state_eigensystem(rho), state_eigensystem(channel.apply(rho)), state_eigensystem(pi)};
}

double entropy_production_value(const SpectralData& sd, int mu, int nu, int i, int j, int k, int l) {
    const auto& p = sd.initial.values;
    const auto& q = sd.final.values;
    const auto& r = sd.reference.values;
    for (double v : {p(mu), q(nu), r(i), r(j), r(k), r(l)})
        if (v < kEigenCutoff) throw std::domain_error("entropy_production_value: eigenvalue below cutoff 1e-14");
    return std::log(p(mu)) - std::log(q(nu)) +
           0.5 * (std::log(r(k)) + std::log(r(l)) - std::log(r(i)) - std::log(r(j)));
}

cplx QuasiTable::total() const {
    cplx s = 0.0;
    for (std::size_t n = 0; n < weight.size(); ++n)
        if (included[n]) s += weight[n];
    return s;
}

std::size_t QuasiTable::index(int mu, int nu, int i, int j, int k, int l) const {
    const std::size_t d = static_cast<std::size_t>(dim);
    return ((((static_cast<std::size_t>(mu) * d + nu) * d + i) * d + j) * d + k) * d + l;
}

QuasiTable quasi_probability(const QuantumChannel& channel, const SpectralData& sd, const StochasticOptions& opts) {
    const Eigen::Index d = channel.dim();
    if (d - 1 > opts.max_spins) {
        std::ostringstream os;
        os << "quasi_probability: table of (N+1)^6 entries exceeds the memory guard N <= " << opts.max_spins;
        throw std::invalid_argument(os.str());
    }
    const Eigensystem& ref = sd.reference;
    if (ref.values.minCoeff() < kEigenCutoff)
        throw NumericalError("quasi_probability: reference state must have full rank");
    const Operator& u = ref.vectors;
    const Operator pt = u.adjoint() * sd.initial.vectors;  // pt(i, μ) = ⟨i|ψ_μ⟩
    const Operator ft = u.adjoint() * sd.final.vectors;

    // T[i][j](k, l) = ⟨k|N(|i⟩⟨j|)|l⟩ in the reference eigenbasis.
    std::vector<Operator> t(static_cast<std::size_t>(d * d));
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            const Operator x = u.col(i) * u.col(j).adjoint();
            t[static_cast<std::size_t>(i * d + j)] = u.adjoint() * unvec(channel.superop * vec(x), d) * u;
        }

    Eigen::VectorXd lr(d);
    for (Eigen::Index i = 0; i < d; ++i) lr(i) = std::log(ref.values(i));

    QuasiTable tab;
    tab.dim = static_cast<int>(d);
    const std::size_t total = static_cast<std::size_t>(std::pow(d, 6));
    tab.sigma.assign(total, 0.0);
    tab.weight.assign(total, cplx(0.0));
    tab.included.assign(total, 0);
    TableStats& st = tab.stats;
    st.min_real = std::numeric_limits<double>::infinity();

    std::size_t n = 0;
    for (Eigen::Index mu = 0; mu < d; ++mu) {
        const double p = sd.initial.values(mu);
        const bool p_ok = p >= kEigenCutoff;
        for (Eigen::Index nu = 0; nu < d; ++nu) {
            const double q = sd.final.values(nu);
            const bool q_ok = q >= kEigenCutoff;
            const double base = p_ok && q_ok ? std::log(p) - std::log(q) : 0.0;
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j) {
                    const cplx a = p * pt(i, mu) * std::conj(pt(j, mu));
                    const Operator& tij = t[static_cast<std::size_t>(i * d + j)];
                    for (Eigen::Index k = 0; k < d; ++k)
                        for (Eigen::Index l = 0; l < d; ++l, ++n) {
                            if (!p_ok) continue;  // weight carries p_μ: exactly zero
                            const cplx w = a * std::conj(ft(k, nu)) * ft(l, nu) * tij(k, l);
                            if (!q_ok) {
                                if (std::abs(w) > 1e-12) {
                                    std::ostringstream os;
                                    os << "quasi_probability: term with final eigenvalue " << q
                                       << " below cutoff carries weight " << std::abs(w);
                                    throw NumericalError(os.str());
                                }
                                ++st.n_excluded;
                                st.excluded_weight += std::abs(w);
                                continue;
                            }
                            tab.weight[n] = w;
                            tab.sigma[n] = base + 0.5 * (lr(k) + lr(l) - lr(i) - lr(j));
                            tab.included[n] = 1;
                            ++st.n_terms;
                            st.min_real = std::min(st.min_real, w.real());
                            if (w.real() < 0.0) st.negative_sum += w.real();
                            st.max_imag = std::max(st.max_imag, std::abs(w.imag()));
                        }
                }
        }
    }
    return tab;
}

QuasiTable quasi_probability(const QuantumChannel& channel, const Operator& rho, const Operator& pi,
                             const StochasticOptions& opts) {
    return quasi_probability(channel, spectral_data(channel, rho, pi), opts);
}

double QuasiProbDistribution::total_weight() const {
    double s = 0.0;
    for (const Atom& a : atoms) s += a.weight;
    return s;
}

QuasiProbDistribution bin_table(const QuasiTable& table, double bin_tol) {
    constexpr double kAtomFloor = 1e-14;
    std::vector<std::size_t> order;
    order.reserve(table.stats.n_terms);
    for (std::size_t n = 0; n < table.weight.size(); ++n)
        if (table.included[n]) order.push_back(n);
    std::sort(order.begin(), order.end(), [&table](std::size_t a, std::size_t b) {
        if (table.sigma[a] != table.sigma[b]) return table.sigma[a] < table.sigma[b];
        return a < b;
    });

    QuasiProbDistribution dist;
    dist.bin_tolerance = bin_tol;
    dist.raw = table.stats;
    std::size_t pos = 0;
    while (pos < order.size()) {
        cplx w = 0.0;
        double sigma_sum = 0.0;
        std::size_t count = 0;
        double last = table.sigma[order[pos]];
        while (pos < order.size() && table.sigma[order[pos]] - last < bin_tol) {
            last = table.sigma[order[pos]];
            w += table.weight[order[pos]];
            sigma_sum += last;
            ++count;
            ++pos;
        }
        if (std::abs(w) <= kAtomFloor) continue;  // round-off only; carries no probability
        dist.atoms.push_back({sigma_sum / static_cast<double>(count), w.real()});
        dist.max_imag_residue = std::max(dist.max_imag_residue, std::abs(w.imag()));
        if (w.real() < 0.0) dist.negativity += w.real();
    }
    return dist;
}

QuasiProbDistribution distribution(const QuantumChannel& channel, const Operator& rho, const Operator& pi,
                                   const StochasticOptions& opts) {
    return bin_table(quasi_probability(channel, rho, pi, opts), opts.bin_tol);
}

QuasiProbDistribution reverse_distribution(const QuantumChannel& channel, const Operator& rho, const Operator& pi,
                                           const StochasticOptions& opts) {
    const QuantumChannel rev = reversal_map(channel, pi);
    const SpectralData sd = spectral_data(channel, rho, pi).reversed();
    return bin_table(quasi_probability(rev, sd, opts), opts.bin_tol);
}

CrooksReport check_crooks(const QuasiProbDistribution& forward, const QuasiProbDistribution& backward,
                          double match_tol) {
    CrooksReport rep;
    const auto& back = backward.atoms;
    for (const Atom& a : forward.atoms) {
        if (std::abs(a.weight) <= 1e-12) continue;
        const double target = -a.sigma;
        auto it = std::lower_bound(back.begin(), back.end(), target - match_tol,
                                   [](const Atom& x, double v) { return x.sigma < v; });
        const Atom* best = nullptr;
        for (; it != back.end() && it->sigma <= target + match_tol; ++it)
            if (best == nullptr || std::abs(it->sigma - target) < std::abs(best->sigma - target)) best = &*it;
        if (best == nullptr) {
            if (std::abs(a.weight) > 1e-8) rep.unmatched.push_back(a);
            continue;
        }
        const double res = std::abs(a.weight - std::exp(a.sigma) * best->weight);
        rep.entries.push_back({a.sigma, res});
        rep.max_residual = std::max(rep.max_residual, res);
    }
    return rep;
}

double integral_ft(const QuasiProbDistribution& dist) {
    double s = 0.0;
    for (const Atom& a : dist.atoms) s += a.weight * std::exp(-a.sigma);
    return s;
}

FluctuationSummary fluctuation_summary(const QuantumChannel& channel, const Operator& rho, const Operator& pi,
                                       const StochasticOptions& opts) {
    FluctuationSummary out;
    out.forward = distribution(channel, rho, pi, opts);
    out.backward = reverse_distribution(channel, rho, pi, opts);
    out.crooks = check_crooks(out.forward, out.backward);
    out.integral_ft = integral_ft(out.forward);
    out.min_sigma = std::numeric_limits<double>::infinity();
    for (const Atom& a : out.forward.atoms)
        if (std::abs(a.weight) > 1e-12) out.min_sigma = std::min(out.min_sigma, a.sigma);
    return out;
}

}  // namespace btc
