#include "doctest.h"
#include "helpers.hpp"

#include "btc/dicke.hpp"

#include <cmath>
#include <stdexcept>

using namespace btc;
using btc::test::make;

namespace {
const cplx I(0.0, 1.0);
}

TEST_CASE("V_z on the smallest sectors") {
    const Operator vz1 = collective_op(1, Axis::z);
    CHECK(vz1(0, 0).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(vz1(1, 1).real() == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    const Operator vz2 = collective_op(2, Axis::z);
    CHECK(vz2(0, 0).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(std::abs(vz2(1, 1)) < 1e-15);
    CHECK(vz2(2, 2).real() == doctest::Approx(-std::sqrt(2.0)));
}

TEST_CASE("commutators [V_a, V_b] = i sqrt2 eps V_c for N <= 16") {
    for (int n = 1; n <= 16; ++n) {
        const Operator x = collective_op(n, Axis::x), y = collective_op(n, Axis::y), z = collective_op(n, Axis::z);
        const cplx c = I * kSqrt2;
        CHECK(max_norm(x * y - y * x - c * z) < 1e-12);
        CHECK(max_norm(y * z - z * y - c * x) < 1e-12);
        CHECK(max_norm(z * x - x * z - c * y) < 1e-12);
    }
}

TEST_CASE("ladder operators are V_x +- i V_y") {
    for (int n : {1, 4, 9}) {
        const Operator x = collective_op(n, Axis::x), y = collective_op(n, Axis::y);
        CHECK(max_norm(collective_op(n, Axis::plus) - (x + I * y)) < 1e-14);
        CHECK(max_norm(collective_op(n, Axis::minus) - (x - I * y)) < 1e-14);
    }
}

TEST_CASE("hamiltonian") {
    // N=1, Omega=2: off-diagonal element Omega/2 = 1.
    const Operator h1 = hamiltonian(make(1, 2.0, 0.0));
    CHECK(std::abs(h1(0, 1) - cplx(1.0)) < 1e-15);
    CHECK(max_norm(hamiltonian(make(5, 0.0, 0.0))) == 0.0);
    // Spectrum of Omega J_x: {-2,-1,0,1,2} Omega for N=4.
    const Eigen::VectorXd ev = hermitian_eigenvalues(hamiltonian(make(4, 1.7, 0.0)));
    for (int k = 0; k < 5; ++k) CHECK(ev(k) == doctest::Approx(1.7 * (k - 2)).epsilon(1e-12));
}

TEST_CASE("coherent states") {
    const Operator down = coherent_state(1, std::numbers::pi, 0.0);
    CHECK(std::abs(down(1, 1) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(down(0, 0)) < 1e-15);

    const Operator g = coherent_state(10, std::numbers::pi / 2.0, std::numbers::pi);
    CHECK(magnetization(g).x() == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs((g * g).trace() - cplx(1.0)) < 1e-12);

    // General angle: m = (sinθcosφ, sinθsinφ, cosθ)/sqrt2.
    const double th = 1.1, ph = 0.4;
    const Vec3 m = magnetization(coherent_state(7, th, ph));
    CHECK(m.x() == doctest::Approx(std::sin(th) * std::cos(ph) / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(m.y() == doctest::Approx(std::sin(th) * std::sin(ph) / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(m.z() == doctest::Approx(std::cos(th) / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("Casimir") {
    CHECK(casimir_value(1) == doctest::Approx(1.5));
    CHECK(casimir_value(2) == doctest::Approx(4.0));
    CHECK(casimir_value(100) == doctest::Approx(5100.0));
    for (int n : {1, 2, 10, 50, 100}) CHECK(casimir_check(make(n, 0.0, 0.0)) < 1e-10);
}

TEST_CASE("invalid sizes are rejected") {
    CHECK_THROWS(collective_op(0, Axis::x));
    CHECK_THROWS(collective_op(-3, Axis::z));
}
