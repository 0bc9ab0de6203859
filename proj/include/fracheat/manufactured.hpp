#pragma once

#include "fracheat/grid.hpp"
#include "fracheat/riesz.hpp"

#include <string>
#include <vector>

namespace fracheat {

enum class ExampleId { example1, example2 };

/// How the nodal source is built from the exact solution: with the discrete
/// operator A (the nodal exact solution then solves the semi-discrete system
/// exactly) or with the quadrature evaluation of (-Delta)^s.
enum class SourceMode { discrete, quadrature };

ExampleId parse_example(const std::string& text);
SourceMode parse_source(const std::string& text);
std::string to_string(ExampleId id);
std::string to_string(SourceMode mode);

/// One separable term a(t) sin(k pi x) of the exact solution.
struct SineMode {
    int wavenumber;
    ScalarFunction amplitude;
    ScalarFunction rate;  ///< d amplitude / dt
};

struct ManufacturedProblem {
    ExampleId id;
    double s;
    SourceMode source;
    std::vector<SineMode> modes;
    ScalarFunction r_exact;
    ScalarFunction omega;
    ScalarFunction w_exact;

    double u_exact(double t, double x) const;
    double ut_exact(double t, double x) const;
    /// u_exact(t, .) at the interior nodes.
    Vector u_nodal(const Grid& grid, double t) const;
};

struct ManufacturedCase {
    ManufacturedProblem problem;
    ProblemData data;
};

/// Closed-form data of the two test problems on (0, 1) x (0, T). The forcing
/// is f = (u_t + (-Delta)^s u) / r at the nodes, with (-Delta)^s evaluated per
/// `source`. Measurements are the analytic w(t^n).
///
/// Discontinuous weights are sampled as cell averages over
/// [x_i - h/2, x_i + h/2] so that h<U, omega> stays second-order accurate.
ManufacturedCase build_manufactured(ExampleId id, const Grid& grid,
                                    SourceMode source = SourceMode::discrete,
                                    const QuadratureOptions& quadrature = {});

/// Cell-average samples of the indicator of [a, b] at the interior nodes.
Vector indicator_cell_average(const Grid& grid, double a, double b);

}  // namespace fracheat
