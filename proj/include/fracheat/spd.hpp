#pragma once

#include "fracheat/grid.hpp"
#include "fracheat/riesz.hpp"

#include <Eigen/Cholesky>

#include <functional>
#include <optional>
#include <stdexcept>

namespace fracheat {

class NotSpdError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when CG hits its iteration cap; carries the achieved residual.
class CgNotConverged : public std::runtime_error {
public:
    CgNotConverged(int iterations, double residual);
    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    int iterations_;
    double residual_;
};

class CgDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lower-triangular Cholesky factor G with G G^T = M.
class SpdFactorization {
public:
    explicit SpdFactorization(const Matrix& m);

    int size() const { return static_cast<int>(llt_.rows()); }
    Matrix lower() const { return llt_.matrixL(); }
    Vector solve(const Vector& b) const;

private:
    Eigen::LLT<Matrix> llt_;
};

/// Throws NotSpdError on a non-positive pivot, std::invalid_argument on an
/// empty or non-square matrix.
SpdFactorization cholesky(const Matrix& m);

using LinearOperator = std::function<Vector(const Vector&)>;

struct CgOptions {
    double tol = 1e-12;
    /// 0 selects 10 * dimension.
    int max_iterations = 0;
    /// Diagonal of the operator for Jacobi preconditioning.
    std::optional<Vector> jacobi_diagonal;
};

struct CgResult {
    Vector x;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients, stopping on ||b - Mx|| <= tol ||b||.
CgResult cg_solve(const LinearOperator& op, const Vector& b, const CgOptions& options = {});

/// Eigenpairs of a symmetric matrix, eigenvalues ascending, orthonormal columns.
struct SpectralDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

SpectralDecomposition eigendecompose(const Matrix& a);

/// sqrt(<A v, v>).
double energy_norm(const RieszOperator& a, const Vector& v);

/// sqrt(<A^{-1} v, v>) using a factorization of A.
double dual_norm(const SpdFactorization& a, const Vector& v);

enum class SolverKind { automatic, cholesky, cg };

/// Solves with L = I + (tau/2) A for any number of right-hand sides. The
/// automatic choice factors L once up to 2048 unknowns and falls back to
/// Jacobi-preconditioned CG above that.
class StepSolver {
public:
    StepSolver(const RieszOperator& a, double tau, SolverKind kind = SolverKind::automatic,
               double cg_tol = 1e-12);

    Vector solve(const Vector& b) const;
    SolverKind kind() const { return kind_; }

    static constexpr int kCholeskyLimit = 2048;

private:
    RieszOperator a_;
    double tau_;
    SolverKind kind_;
    double cg_tol_;
    std::optional<SpdFactorization> factor_;
    Vector diagonal_;
};

}  // namespace fracheat
