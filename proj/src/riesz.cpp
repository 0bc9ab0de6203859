#include "fracheat/riesz.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fracheat {

double normalization_constant(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw std::invalid_argument("normalization_constant: s must lie in (0, 1)");
    }
    const double num = std::pow(4.0, s) * s * std::tgamma(0.5 + s);
    const double den = std::sqrt(std::numbers::pi) * std::abs(std::tgamma(1.0 - s));
    return num / den;
}

double exterior_tail(int i, const Grid& grid) {
    if (i <= 0 || i >= grid.space_intervals()) {
        throw std::invalid_argument("exterior_tail: node " + std::to_string(i) +
                                    " is not an interior node");
    }
    const double s = grid.order();
    const double x = grid.x(i);
    const double l = grid.length();
    return (std::pow(x, -2.0 * s) + std::pow(l - x, -2.0 * s)) / (2.0 * s);
}

RieszOperator::RieszOperator(int size, double s, double h, Vector offdiag, Vector diag,
                             double norm_const)
    : size_(size),
      s_(s),
      h_(h),
      offdiag_(std::move(offdiag)),
      diag_(std::move(diag)),
      norm_const_(norm_const) {
    if (diag_.size() != size_ || offdiag_.size() != std::max(size_ - 1, 0)) {
        throw std::invalid_argument("RieszOperator: storage sizes do not match dimension");
    }
}

double RieszOperator::entry(int i, int j) const {
    if (i == j) {
        return diag_[i];
    }
    return -offdiag_[std::abs(i - j) - 1];
}

Vector RieszOperator::apply(const Vector& v) const {
    if (v.size() != size_) {
        throw std::invalid_argument("RieszOperator::apply: vector length " +
                                    std::to_string(v.size()) + " != " + std::to_string(size_));
    }
    Vector out = diag_.cwiseProduct(v);
    for (int i = 0; i < size_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < i; ++j) {
            acc += offdiag_[i - j - 1] * v[j];
        }
        for (int j = i + 1; j < size_; ++j) {
            acc += offdiag_[j - i - 1] * v[j];
        }
        out[i] -= acc;
    }
    return out;
}

Matrix RieszOperator::dense() const {
    Matrix a(size_, size_);
    for (int i = 0; i < size_; ++i) {
        for (int j = 0; j < size_; ++j) {
            a(i, j) = entry(i, j);
        }
    }
    return a;
}

RieszOperator assemble(const Grid& grid) {
    const int n = grid.interior_size();
    const int N = grid.space_intervals();
    const double s = grid.order();
    const double c = normalization_constant(s);
    const double scale = c / std::pow(grid.h(), 2.0 * s);

    // lag_sum[m] = sum_{k=1}^{m} k^{-(1+2s)}, accumulated in ascending lag.
    Vector lag_sum = Vector::Zero(n);
    Vector offdiag(std::max(n - 1, 0));
    double acc = 0.0;
    for (int k = 1; k < n; ++k) {
        const double term = std::pow(static_cast<double>(k), -(1.0 + 2.0 * s));
        offdiag[k - 1] = scale * term;
        acc += term;
        lag_sum[k] = acc;
    }

    Vector diag(n);
    for (int k = 0; k < n; ++k) {
        const int i = Grid::node_of(k);
        const double interior = lag_sum[i - 1] + lag_sum[N - 1 - i];
        const double tail = (std::pow(static_cast<double>(i), -2.0 * s) +
                             std::pow(static_cast<double>(N - i), -2.0 * s)) /
                            (2.0 * s);
        diag[k] = scale * (interior + tail);
    }
    return RieszOperator(n, s, grid.h(), std::move(offdiag), std::move(diag), c);
}

void write_dense_csv(const RieszOperator& op, std::ostream& out) {
    char buf[32];
    for (int i = 0; i < op.size(); ++i) {
        for (int j = 0; j < op.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", op.entry(i, j));
            if (j > 0) {
                out << ',';
            }
            out << buf;
        }
        out << '\n';
    }
}

namespace {

// Tanh-sinh rule on (a, b) with step halving until two successive levels
// agree. Nodes cluster double-exponentially at both ends, which absorbs
// algebraic endpoint behaviour of the integrand.
template <class F>
double tanh_sinh(const F& f, double a, double b, const QuadratureOptions& opt, double abs_floor,
                 const char* what) {
    constexpr double half_pi = 0.5 * std::numbers::pi;
    constexpr double t_max = 4.0;
    const double width = b - a;

    // Contribution of abscissa t (and -t when mirrored) scaled by the weight.
    const auto term = [&](double t) {
        const double u = half_pi * std::sinh(t);
        const double e = std::exp(-2.0 * std::abs(u));
        // distance of the node from the nearer endpoint, as a fraction of width
        const double near_end = e / (1.0 + e);
        const double weight = half_pi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if (near_end * width == 0.0 || weight == 0.0) {
            return 0.0;
        }
        const double lo = a + width * near_end;
        const double hi = b - width * near_end;
        if (t == 0.0) {
            return weight * f(0.5 * (a + b));
        }
        return weight * (f(lo) + f(hi));
    };

    double step = 1.0 / opt.refinement;
    double sum = term(0.0);
    for (double t = step; t <= t_max; t += step) {
        sum += term(t);
    }
    double previous = 0.5 * width * step * sum;
    for (int level = 0; level < opt.max_doublings; ++level) {
        step *= 0.5;
        for (double t = step; t <= t_max; t += 2.0 * step) {
            sum += term(t);
        }
        const double current = 0.5 * width * step * sum;
        const double diff = std::abs(current - previous);
        if (level > 0 && (diff <= opt.rel_tol * std::abs(current) || diff <= abs_floor)) {
            return current;
        }
        previous = current;
    }
    throw OracleNotConverged(std::string("quadrature_oracle: ") + what +
                             " integral did not converge within the refinement budget");
}

}  // namespace

Vector quadrature_oracle(const ScalarFunction& u, const Grid& grid,
                         const QuadratureOptions& opt) {
    if (opt.refinement < 1) {
        throw std::invalid_argument("quadrature_oracle: refinement must be positive");
    }
    const double s = grid.order();
    const double h = grid.h();
    const double l = grid.length();
    const double c = normalization_constant(s);
    const double p = 2.0 - 2.0 * s;

    const auto zero_extended = [&](double y) { return (y <= 0.0 || y >= l) ? 0.0 : u(y); };

    double u_scale = 0.0;
    for (int i = 1; i < grid.space_intervals(); ++i) {
        u_scale = std::max(u_scale, std::abs(u(grid.x(i))));
    }
    const double abs_floor = 1e-13 * u_scale * std::pow(h, -2.0 * s);

    Vector out(grid.interior_size());
    for (int k = 0; k < grid.interior_size(); ++k) {
        const double x = grid.x_at(k);
        const double ux = u(x);

        // Near field |y - x| < h, folded onto z in (0, h) so that the linear
        // Taylor term cancels; z = h v^{1/p} absorbs the z^{1-2s} weight.
        // G(z) = g(z)/z^2 is even and smooth, so on the sliver z < 1e-3 h it is
        // taken as constant, which sidesteps the cancellation in g.
        const auto near_integrand = [&](double v) {
            const double z = h * std::pow(v, 1.0 / p);
            const double g = 2.0 * ux - zero_extended(x + z) - zero_extended(x - z);
            return g / (z * z);
        };
        const double v_cut = std::pow(1e-3, p);
        const double near_scale = std::pow(h, p) / p;
        const double near =
            near_scale * (v_cut * near_integrand(v_cut) +
                          tanh_sinh(near_integrand, v_cut, 1.0, opt, abs_floor / near_scale,
                                    "near-field"));

        // Far field h <= |y - x| <= reach, in the log variable d = h e^sigma.
        const auto far_side = [&](double reach, double direction) {
            if (reach <= h * (1.0 + 1e-12)) {
                return 0.0;
            }
            const auto integrand = [&](double sigma) {
                const double d = h * std::exp(sigma);
                return (ux - zero_extended(x + direction * d)) * std::pow(d, -2.0 * s);
            };
            return tanh_sinh(integrand, 0.0, std::log(reach / h), opt, abs_floor, "far-field");
        };
        const double far = far_side(x, -1.0) + far_side(l - x, 1.0);

        const double tail = (std::pow(x, -2.0 * s) + std::pow(l - x, -2.0 * s)) / (2.0 * s);
        out[k] = c * (near + far + ux * tail);
    }
    return out;
}

}  // namespace fracheat
