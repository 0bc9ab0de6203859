#include "fracheat/manufactured.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace fracheat {

namespace {
constexpr double pi = std::numbers::pi;
}

ExampleId parse_example(const std::string& text) {
    if (text == "1" || text == "example1") {
        return ExampleId::example1;
    }
    if (text == "2" || text == "example2") {
        return ExampleId::example2;
    }
    throw std::invalid_argument("unknown example id '" + text + "'");
}

SourceMode parse_source(const std::string& text) {
    if (text == "discrete") {
        return SourceMode::discrete;
    }
    if (text == "quadrature") {
        return SourceMode::quadrature;
    }
    throw std::invalid_argument("unknown source mode '" + text + "'");
}

std::string to_string(ExampleId id) {
    return id == ExampleId::example1 ? "example1" : "example2";
}

std::string to_string(SourceMode mode) {
    return mode == SourceMode::discrete ? "discrete" : "quadrature";
}

double ManufacturedProblem::u_exact(double t, double x) const {
    double u = 0.0;
    for (const auto& m : modes) {
        u += m.amplitude(t) * std::sin(m.wavenumber * pi * x);
    }
    return u;
}

double ManufacturedProblem::ut_exact(double t, double x) const {
    double ut = 0.0;
    for (const auto& m : modes) {
        ut += m.rate(t) * std::sin(m.wavenumber * pi * x);
    }
    return ut;
}

Vector ManufacturedProblem::u_nodal(const Grid& grid, double t) const {
    return grid.sample([&](double x) { return u_exact(t, x); });
}

Vector indicator_cell_average(const Grid& grid, double a, double b) {
    const double h = grid.h();
    Vector out(grid.interior_size());
    for (int k = 0; k < grid.interior_size(); ++k) {
        const double x = grid.x_at(k);
        const double overlap = std::min(x + 0.5 * h, b) - std::max(x - 0.5 * h, a);
        out[k] = std::clamp(overlap / h, 0.0, 1.0);
    }
    return out;
}

ManufacturedCase build_manufactured(ExampleId id, const Grid& grid, SourceMode source,
                                    const QuadratureOptions& quadrature) {
    if (std::abs(grid.length() - 1.0) > 1e-12) {
        throw std::invalid_argument("manufactured examples are defined on (0, 1); got l = " +
                                    std::to_string(grid.length()));
    }
    const double s = grid.order();
    ManufacturedCase out;
    auto& p = out.problem;
    p.id = id;
    p.s = s;
    p.source = source;

    Vector weight;
    if (id == ExampleId::example1) {
        p.modes = {
            {1, [s](double t) { return 1.0 + t * t + s * std::sin(t); },
             [s](double t) { return 2.0 * t + s * std::cos(t); }},
            {3, [s](double t) { return s * t * std::exp(-t); },
             [s](double t) { return s * std::exp(-t) * (1.0 - t); }},
        };
        p.r_exact = [s](double t) { return 1.0 + 0.5 * s * (1.0 + std::cos(t)); };
        p.omega = [](double x) { return std::sin(pi * x); };
        p.w_exact = [s](double t) { return 0.5 * (1.0 + t * t + s * std::sin(t)); };
        weight = grid.sample(p.omega);
    } else {
        p.modes = {
            {1, [](double t) { return std::cos(t); }, [](double t) { return -std::sin(t); }},
            {2, [s](double t) { return s * t * std::exp(-t); },
             [s](double t) { return s * std::exp(-t) * (1.0 - t); }},
        };
        p.r_exact = [](double t) { return 1.0 + std::sin(t); };
        p.omega = [](double x) { return (x >= 0.4 && x <= 0.6) ? 1.0 : 0.0; };
        p.w_exact = [](double t) { return (std::sqrt(5.0) - 1.0) / (2.0 * pi) * std::cos(t); };
        weight = indicator_cell_average(grid, 0.4, 0.6);
    }

    // Nodal sine basis and its image under the chosen fractional Laplacian.
    std::vector<Vector> basis;
    std::vector<Vector> image;
    std::optional<RieszOperator> a;
    if (source == SourceMode::discrete) {
        a.emplace(assemble(grid));
    }
    for (const auto& m : p.modes) {
        const int k = m.wavenumber;
        const auto mode_fn = [k](double x) { return std::sin(k * pi * x); };
        basis.push_back(grid.sample(mode_fn));
        image.push_back(a ? a->apply(basis.back()) : quadrature_oracle(mode_fn, grid, quadrature));
    }

    out.data.phi = p.u_nodal(grid, 0.0);
    out.data.weight = weight;
    out.data.coefficient = p.r_exact;
    out.data.forcing = [modes = p.modes, basis, image, r = p.r_exact](double t) {
        Vector f = Vector::Zero(basis.front().size());
        for (std::size_t j = 0; j < modes.size(); ++j) {
            f += modes[j].rate(t) * basis[j] + modes[j].amplitude(t) * image[j];
        }
        return Vector(f / r(t));
    };

    out.data.measurements.kind = MeasurementKind::exact_analytic;
    out.data.measurements.values.resize(grid.time_steps() + 1);
    for (int n = 0; n <= grid.time_steps(); ++n) {
        out.data.measurements.values[n] = p.w_exact(grid.t(n));
    }
    return out;
}

}  // namespace fracheat
