// core.hpp — shared numeric types, error classes and small dense linear-algebra helpers.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace btc {

using cplx = std::complex<double>;

/// Dense complex matrix on the (N+1)-dimensional maximal-spin sector (or a joint space built from it).
/// Row/column k carries the V_z label m = N/2 - k, i.e. descending V_z eigenvalue.
using Operator = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Thrown when an integrator detects trace, positivity, conservation or physicality drift beyond its abort threshold.
class IntegratorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by numerical routines whose result would be ill-defined (degenerate null space, rank-deficient state, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Largest absolute entry.
inline double max_norm(const Eigen::Ref<const Operator>& x) {
    return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

inline double hermiticity_error(const Operator& x) {
    return max_norm(x - x.adjoint());
}

inline Operator hermitian_part(const Operator& x) {
    return 0.5 * (x + x.adjoint());
}

inline cplx expectation(const Operator& rho, const Operator& obs) {
    // Tr(rho * obs) without forming the product.
    return (rho.transpose().cwiseProduct(obs)).sum();
}

/// Eigenvalues (ascending) of the Hermitian part of x.
Eigen::VectorXd hermitian_eigenvalues(const Operator& x);

/// f(X) for Hermitian X via its eigendecomposition; f is applied to each eigenvalue.
template <class F>
Operator hermitian_function(const Operator& x, F&& f) {
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(x));
    if (es.info() != Eigen::Success) throw NumericalError("hermitian_function: eigensolver failed");
    Eigen::VectorXcd fv(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(es.eigenvalues()(i));
    return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

/// ½‖a − b‖₁ for Hermitian a, b.
double trace_distance(const Operator& a, const Operator& b);

/// −Σ λ ln λ over eigenvalues ≥ 1e-14 (smaller ones contribute 0·ln 0 = 0). Natural log.
double von_neumann_entropy(const Operator& rho);

/// S(σ‖ρ) = Tr σ ln σ − Tr σ ln ρ. Throws if σ has weight on the kernel of ρ.
double relative_entropy(const Operator& sigma, const Operator& rho);

/// Kronecker product a ⊗ b; index of |i⟩⊗|k⟩ is i·dim(b) + k.
Operator kron(const Operator& a, const Operator& b);

/// Partial traces of an operator on A ⊗ B (A-major ordering, as produced by kron).
Operator partial_trace_second(const Operator& x, Eigen::Index dim_a, Eigen::Index dim_b);
Operator partial_trace_first(const Operator& x, Eigen::Index dim_a, Eigen::Index dim_b);

/// Column-major vectorisation: vec(X)[i + d·j] = X(i, j).
inline Eigen::VectorXcd vec(const Operator& x) {
    return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}
inline Operator unvec(const Eigen::VectorXcd& v, Eigen::Index dim) {
    return Eigen::Map<const Operator>(v.data(), dim, dim);
}

/// Matrix exponential (Padé scaling and squaring).
Operator expm(const Operator& x);

/// Diagnostics for the density-matrix contract (unit trace, Hermitian, positive).
struct DensityDiagnostics {
    double trace_error = 0.0;
    double hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;

    bool valid(double tol = 1e-10) const {
        return trace_error < tol && hermiticity_error < tol && min_eigenvalue >= -tol;
    }
};

DensityDiagnostics diagnose_density(const Operator& rho);

/// Throws std::invalid_argument naming `what` when rho violates the density-matrix contract.
void require_density(const Operator& rho, const std::string& what, double tol = 1e-10);

}  // namespace btc
