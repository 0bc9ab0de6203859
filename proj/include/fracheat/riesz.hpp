#pragma once

#include "fracheat/grid.hpp"

#include <iosfwd>
#include <stdexcept>

namespace fracheat {

/// c_{1,s} = 4^s s Gamma(1/2 + s) / (sqrt(pi) |Gamma(1 - s)|).
double normalization_constant(double s);

/// Exterior integral of |x_i - y|^{-(1+2s)} over R \ (0, l), without c_{1,s}.
/// Rejects boundary nodes (i = 0 or i = N).
double exterior_tail(int i, const Grid& grid);

/// Dense Dirichlet fractional Laplacian on the interior nodes, stored as a
/// Toeplitz off-diagonal coefficient vector plus a non-Toeplitz diagonal.
///
/// A_ij = -offdiag[|i-j| - 1] for i != j and A_ii = diag[i]. Symmetry is
/// structural.
class RieszOperator {
public:
    RieszOperator(int size, double s, double h, Vector offdiag, Vector diag, double norm_const);

    int size() const { return size_; }
    double order() const { return s_; }
    double h() const { return h_; }
    double norm_const() const { return norm_const_; }

    /// c_k for lag k = 1..size-1.
    const Vector& offdiag() const { return offdiag_; }
    const Vector& diag() const { return diag_; }

    double entry(int i, int j) const;

    /// A v by direct O(n^2) summation over the Toeplitz structure.
    Vector apply(const Vector& v) const;

    Matrix dense() const;

private:
    int size_;
    double s_;
    double h_;
    Vector offdiag_;
    Vector diag_;
    double norm_const_;
};

RieszOperator assemble(const Grid& grid);

/// Dense reconstruction, row-major, 17 significant digits, comma separated.
void write_dense_csv(const RieszOperator& op, std::ostream& out);

class OracleNotConverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
    /// Initial panel count multiplier; each doubling halves the panel width.
    int refinement = 8;
    double rel_tol = 1e-10;
    int max_doublings = 14;
};

/// Principal-value quadrature of (-Delta)^s u at the interior nodes,
/// independent of the matrix A. u must be smooth on [0, l]; it is extended
/// by zero outside.
Vector quadrature_oracle(const ScalarFunction& u, const Grid& grid,
                         const QuadratureOptions& options = {});

}  // namespace fracheat
