#include "fracheat/spd.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace fracheat {

CgNotConverged::CgNotConverged(int iterations, double residual)
    : std::runtime_error("cg_solve: no convergence after " + std::to_string(iterations) +
                         " iterations, relative residual " + std::to_string(residual)),
      iterations_(iterations),
      residual_(residual) {}

SpdFactorization::SpdFactorization(const Matrix& m) : llt_(m) {
    if (llt_.info() != Eigen::Success) {
        throw NotSpdError("cholesky: non-positive pivot, matrix is not SPD");
    }
}

Vector SpdFactorization::solve(const Vector& b) const {
    if (b.size() != llt_.rows()) {
        throw std::invalid_argument("SpdFactorization::solve: right-hand side length mismatch");
    }
    return llt_.solve(b);
}

SpdFactorization cholesky(const Matrix& m) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw std::invalid_argument("cholesky: matrix must be square and non-empty");
    }
    return SpdFactorization(m);
}

CgResult cg_solve(const LinearOperator& op, const Vector& b, const CgOptions& options) {
    if (!(options.tol > 0.0)) {
        throw std::invalid_argument("cg_solve: tolerance must be positive");
    }
    const auto n = b.size();
    const int max_it = options.max_iterations > 0 ? options.max_iterations
                                                  : 10 * static_cast<int>(n);
    const bool jacobi = options.jacobi_diagonal.has_value();
    if (jacobi && options.jacobi_diagonal->size() != n) {
        throw std::invalid_argument("cg_solve: preconditioner length mismatch");
    }

    CgResult result;
    result.x = Vector::Zero(n);
    const double b_norm = b.norm();
    if (b_norm == 0.0) {
        return result;
    }

    const auto precondition = [&](const Vector& r) -> Vector {
        return jacobi ? Vector(r.cwiseQuotient(*options.jacobi_diagonal)) : r;
    };

    Vector r = b;
    Vector z = precondition(r);
    Vector p = z;
    double rz = r.dot(z);
    for (int it = 1; it <= max_it; ++it) {
        const Vector ap = op(p);
        const double alpha = rz / p.dot(ap);
        result.x += alpha * p;
        r -= alpha * ap;
        const double rel = r.norm() / b_norm;
        if (!std::isfinite(rel) || !std::isfinite(alpha)) {
            throw CgDiverged("cg_solve: non-finite iterate at iteration " + std::to_string(it));
        }
        result.iterations = it;
        result.relative_residual = rel;
        if (rel <= options.tol) {
            return result;
        }
        z = precondition(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    throw CgNotConverged(result.iterations, result.relative_residual);
}

SpectralDecomposition eigendecompose(const Matrix& a) {
    if (a.rows() == 0 || a.rows() != a.cols()) {
        throw std::invalid_argument("eigendecompose: matrix must be square and non-empty");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecompose: eigen-iteration did not converge");
    }
    // Eigen returns eigenvalues in ascending order.
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double energy_norm(const RieszOperator& a, const Vector& v) {
    return std::sqrt(std::max(0.0, v.dot(a.apply(v))));
}

double dual_norm(const SpdFactorization& a, const Vector& v) {
    if (v.size() == 0) {
        return 0.0;
    }
    return std::sqrt(std::max(0.0, v.dot(a.solve(v))));
}

StepSolver::StepSolver(const RieszOperator& a, double tau, SolverKind kind, double cg_tol)
    : a_(a), tau_(tau), kind_(kind), cg_tol_(cg_tol) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("StepSolver: tau must be positive");
    }
    if (kind_ == SolverKind::automatic) {
        kind_ = a.size() <= kCholeskyLimit ? SolverKind::cholesky : SolverKind::cg;
    }
    diagonal_ = Vector::Ones(a.size()) + 0.5 * tau_ * a.diag();
    if (kind_ == SolverKind::cholesky) {
        Matrix l = 0.5 * tau_ * a.dense();
        l.diagonal().array() += 1.0;
        factor_.emplace(cholesky(l));
    }
}

Vector StepSolver::solve(const Vector& b) const {
    if (factor_) {
        return factor_->solve(b);
    }
    const LinearOperator op = [this](const Vector& v) -> Vector {
        return v + 0.5 * tau_ * a_.apply(v);
    };
    CgOptions options;
    options.tol = cg_tol_;
    options.jacobi_diagonal = diagonal_;
    return cg_solve(op, b, options).x;
}

}  // namespace fracheat
