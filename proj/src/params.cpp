#include "btc/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace btc {

double SystemParams::beta() const {
    if (n_beta == 0.0) return std::numeric_limits<double>::infinity();
    return std::log1p(1.0 / n_beta) / omega_bath;
}

void SystemParams::set_beta(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    n_beta = std::isinf(beta) ? 0.0 : 1.0 / std::expm1(beta * omega_bath);
}

void SystemParams::validate(int max_spins, bool allow_zero_gamma) const {
    if (n_spins < 1) throw std::invalid_argument("n_spins must satisfy N >= 1");
    if (n_spins > max_spins)
        throw std::invalid_argument("n_spins exceeds the configured cap of " + std::to_string(max_spins));
    if (allow_zero_gamma ? !(gamma >= 0.0) : !(gamma > 0.0))
        throw std::invalid_argument(allow_zero_gamma ? "gamma must satisfy Gamma >= 0" : "gamma must satisfy Gamma > 0");
    if (!(omega_bath > 0.0)) throw std::invalid_argument("omega_bath must satisfy omega > 0");
    if (!(n_beta >= 0.0) || std::isinf(n_beta)) throw std::invalid_argument("n_beta must satisfy n_beta >= 0");
    if (!std::isfinite(omega_rabi)) throw std::invalid_argument("omega_rabi must be finite");
}

}  // namespace btc
