// params.hpp — physical constants shared by every module.

#pragma once

namespace btc {

/// Model constants. Ω, Γ and ω are given in the same frequency/energy units (ħ = 1);
/// the conventional choice is Γ = ω = 1 so powers come out in units of ωΓ and times in 1/Γ.
struct SystemParams {
    int n_spins = 1;           // N
    double omega_rabi = 0.0;   // Ω, transverse field
    double gamma = 1.0;        // Γ, collective decay rate
    double omega_bath = 1.0;   // ω, energy of the environmental oscillators
    double n_beta = 0.0;       // thermal occupation (e^{βω} − 1)^{-1}

    static constexpr int kDefaultMaxSpins = 512;

    /// Inverse temperature implied by n_beta; +inf at n_beta = 0.
    double beta() const;

    /// Sets n_beta from an inverse temperature (β = +inf gives n_beta = 0).
    void set_beta(double beta);

    bool zero_temperature() const { return n_beta == 0.0; }

    /// Rate of the V_- jump, Γ(n_β+1)/N, and of the V_+ jump, Γn_β/N.
    double rate_down() const { return gamma * (n_beta + 1.0) / n_spins; }
    double rate_up() const { return gamma * n_beta / n_spins; }

    /// Throws std::invalid_argument naming the violated constraint. Γ = 0 (closed dynamics) is
    /// accepted only when allow_zero_gamma is set; the mean-field layer divides by Γ.
    void validate(int max_spins = kDefaultMaxSpins, bool allow_zero_gamma = false) const;
};

}  // namespace btc
