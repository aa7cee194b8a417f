#include "btc/core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace btc {

Eigen::VectorXd hermitian_eigenvalues(const Operator& x) {
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(x), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("hermitian_eigenvalues: eigensolver failed");
    return es.eigenvalues();
}

double trace_distance(const Operator& a, const Operator& b) {
    return 0.5 * hermitian_eigenvalues(a - b).cwiseAbs().sum();
}

double von_neumann_entropy(const Operator& rho) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(rho);
    double s = 0.0;
    for (double p : ev) {
        if (p >= 1e-14) s -= p * std::log(p);
    }
    return s;
}

double relative_entropy(const Operator& sigma, const Operator& rho) {
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(rho));
    if (es.info() != Eigen::Success) throw NumericalError("relative_entropy: eigensolver failed");
    const Operator& u = es.eigenvectors();
    const Operator sig = u.adjoint() * sigma * u;
    double cross = 0.0;
    for (Eigen::Index i = 0; i < sig.rows(); ++i) {
        const double r = es.eigenvalues()(i);
        const double w = sig(i, i).real();
        if (r < 1e-14) {
            if (w > 1e-12) throw NumericalError("relative_entropy: support of sigma not contained in support of rho");
            continue;
        }
        cross += w * std::log(r);
    }
    return -von_neumann_entropy(sigma) - cross;
}

Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Operator partial_trace_second(const Operator& x, Eigen::Index dim_a, Eigen::Index dim_b) {
    Operator out = Operator::Zero(dim_a, dim_a);
    for (Eigen::Index i = 0; i < dim_a; ++i)
        for (Eigen::Index j = 0; j < dim_a; ++j)
            out(i, j) = x.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
    return out;
}

Operator partial_trace_first(const Operator& x, Eigen::Index dim_a, Eigen::Index dim_b) {
    Operator out = Operator::Zero(dim_b, dim_b);
    for (Eigen::Index i = 0; i < dim_a; ++i) out += x.block(i * dim_b, i * dim_b, dim_b, dim_b);
    return out;
}

Operator expm(const Operator& x) {
    return x.exp();
}

DensityDiagnostics diagnose_density(const Operator& rho) {
    DensityDiagnostics d;
    d.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
    d.hermiticity_error = hermiticity_error(rho);
    d.min_eigenvalue = rho.size() == 0 ? 0.0 : hermitian_eigenvalues(rho).minCoeff();
    return d;
}

void require_density(const Operator& rho, const std::string& what, double tol) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument(what + ": density matrix must be square");
    const DensityDiagnostics d = diagnose_density(rho);
    if (!d.valid(tol)) {
        std::ostringstream os;
        os << what << ": not a density matrix (trace error " << d.trace_error << ", hermiticity error "
           << d.hermiticity_error << ", min eigenvalue " << d.min_eigenvalue << ")";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace btc
