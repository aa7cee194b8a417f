// stochastic.hpp — stochastic entropy production for one application of a quantum channel.
//
// A transition is labelled by (μ, ν, i, j, k, l): μ/ν index eigenvectors of the initial and
// final states, i..l index eigenvectors |i⟩ of the reference state π. Its quasi-probability is
//   P = p_μ ⟨φ_ν|Π_k N(Π_i|ψ_μ⟩⟨ψ_μ|Π_j) Π_l|φ_ν⟩
// and its entropy production is
//   σ = ln p_μ − ln q_ν + ½(ln r_k + ln r_l − ln r_i − ln r_j).
// The half weights the two-sided heat term so that ⟨e^{−σ}⟩ = 1 holds exactly.

#pragma once

#include "btc/core.hpp"
#include "btc/liouville.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace btc {

struct QuantumChannel {
    std::vector<Operator> kraus;
    Eigen::MatrixXcd superop;  // acts on column-major vec(ρ)
    std::string source;
    double dt_channel = 0.0;

    Eigen::Index dim() const { return kraus.empty() ? 0 : kraus.front().rows(); }
    Operator apply(const Operator& rho) const;
    /// ‖Σ K†K − 1‖_max.
    double completeness_error() const;
};

/// Σ_m conj(K_m) ⊗ K_m, the column-major superoperator of a Kraus set.
Eigen::MatrixXcd superop_from_kraus(const std::vector<Operator>& kraus);

/// Kraus decomposition of exp(dt·L) through its Choi matrix; eigenvalues ≤ 1e-12 are dropped.
/// Throws NumericalError on Choi negativity below −1e-10 or failed validation.
QuantumChannel channel_from_generator(const LindbladGenerator& gen, double dt_channel);

/// Channel from an explicit Kraus set (validated for completeness to 1e-10).
QuantumChannel channel_from_kraus(std::vector<Operator> kraus, std::string source, double dt_channel = 0.0);

/// Crooks reversal K̃ = π^{1/2} K† π^{−1/2}. Throws NumericalError when π is not full rank
/// (eigenvalue ≤ 1e-14) or when R(π) ≠ π or Σ K̃†K̃ ≠ 1 beyond 1e-9.
QuantumChannel reversal_map(const QuantumChannel& channel, const Operator& pi);

/// Random density matrix (Ginibre construction) from a seeded generator.
Operator random_density_matrix(Eigen::Index dim, std::uint64_t seed);

/// Descending eigen-decomposition of a Hermitian state. Each eigenvector's first component
/// with modulus > 1e-10 is made real and positive. Eigenvalues ≥ −1e-12 are clamped at 0 and
/// renormalised to sum 1; anything more negative throws NumericalError.
struct Eigensystem {
    Eigen::VectorXd values;
    Operator vectors;  // columns
};
Eigensystem state_eigensystem(const Operator& rho);

struct SpectralData {
    Eigensystem initial;    // p_μ, ψ_μ
    Eigensystem final;      // q_ν, φ_ν
    Eigensystem reference;  // r_i, |i⟩

    /// Initial and final roles exchanged (used for the backward process).
    SpectralData reversed() const { return {final, initial, reference}; }
};

SpectralData spectral_data(const QuantumChannel& channel, const Operator& rho, const Operator& pi);

/// σ for the transition (μ, ν, i, j, k, l). Throws std::domain_error if any referenced
/// eigenvalue is below 1e-14.
double entropy_production_value(const SpectralData& sd, int mu, int nu, int i, int j, int k, int l);

struct TableStats {
    double min_real = 0.0;       // smallest real part over raw terms
    double negative_sum = 0.0;   // sum of negative real parts
    double max_imag = 0.0;       // largest raw imaginary part
    std::size_t n_terms = 0;
    std::size_t n_excluded = 0;  // terms dropped for a sub-cutoff eigenvalue
    double excluded_weight = 0.0;
};

/// Flat table in the index order (μ, ν, i, j, k, l), last index fastest.
struct QuasiTable {
    int dim = 0;
    std::vector<double> sigma;
    std::vector<cplx> weight;
    std::vector<unsigned char> included;  // 0 for terms excluded by the eigenvalue cutoff
    TableStats stats;

    cplx total() const;
    std::size_t index(int mu, int nu, int i, int j, int k, int l) const;
};

struct StochasticOptions {
    int max_spins = 14;  // table has (N+1)^6 entries
    double bin_tol = 1e-10;
};

/// Forward table for `channel` between sd.initial and sd.final.
QuasiTable quasi_probability(const QuantumChannel& channel, const SpectralData& sd,
                             const StochasticOptions& opts = {});
QuasiTable quasi_probability(const QuantumChannel& channel, const Operator& rho, const Operator& pi,
                             const StochasticOptions& opts = {});

struct Atom {
    double sigma;
    double weight;
};

struct QuasiProbDistribution {
    std::vector<Atom> atoms;  // ascending σ
    double bin_tolerance = 0.0;
    double negativity = 0.0;      // sum of negative binned weights
    double max_imag_residue = 0.0;
    TableStats raw;

    double total_weight() const;
};

/// Bins a table: stable sort by (σ, index), then chains neighbours closer than bin_tol.
/// Each atom carries the mean σ of its members. Atoms with |weight| ≤ 1e-14 are dropped.
QuasiProbDistribution bin_table(const QuasiTable& table, double bin_tol);

QuasiProbDistribution distribution(const QuantumChannel& channel, const Operator& rho, const Operator& pi,
                                   const StochasticOptions& opts = {});

/// Backward process: R in place of N, initial state N(ρ), final measurement in the
/// eigenbasis of ρ. Each backward transition carries minus the forward σ.
QuasiProbDistribution reverse_distribution(const QuantumChannel& channel, const Operator& rho, const Operator& pi,
                                           const StochasticOptions& opts = {});

struct CrooksEntry {
    double sigma;
    double residual;  // |P(σ) − e^σ P_R(−σ)|
};

struct CrooksReport {
    std::vector<CrooksEntry> entries;
    std::vector<Atom> unmatched;  // forward atoms with |w| > 1e-8 and no partner
    double max_residual = 0.0;
};

/// Pairs forward atoms at σ with backward atoms at −σ (within match_tol) for atoms with |w| > 1e-12.
CrooksReport check_crooks(const QuasiProbDistribution& forward, const QuasiProbDistribution& backward,
                          double match_tol = 1e-8);

/// Σ w e^{−σ}.
double integral_ft(const QuasiProbDistribution& dist);

/// Everything the ep-dist pipeline reports for one parameter set.
struct FluctuationSummary {
    QuasiProbDistribution forward, backward;
    CrooksReport crooks;
    double integral_ft = 0.0;
    double min_sigma = 0.0;  // smallest σ among atoms with |w| > 1e-12
};

FluctuationSummary fluctuation_summary(const QuantumChannel& channel, const Operator& rho, const Operator& pi,
                                       const StochasticOptions& opts = {});

}  // namespace btc
