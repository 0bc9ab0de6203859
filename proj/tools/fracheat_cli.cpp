#include "fracheat/forward.hpp"
#include "fracheat/inverse.hpp"
#include "fracheat/io.hpp"
#include "fracheat/manufactured.hpp"
#include "fracheat/study.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

using namespace fracheat;
namespace fs = std::filesystem;

namespace {

// Command-line values as raw text, keyed like the config file.
struct FlagValues {
    std::map<std::string, std::string> text;
    std::string config_path;
};

void add_common_flags(CLI::App* sub, FlagValues& flags) {
    const std::vector<std::pair<std::string, std::string>> options = {
        {"example", "Test problem: 1 or 2"},
        {"s", "Fractional order in (0, 1)"},
        {"N", "Space intervals (comma-separated list for studies)"},
        {"M", "Time steps (comma-separated list for studies)"},
        {"l", "Domain length"},
        {"T", "Final time"},
        {"couple-tau-h", "Use M = N T / l (true|false)"},
        {"solver", "cholesky | cg | auto"},
        {"tol", "CG relative tolerance"},
        {"delta", "Noise level(s)"},
        {"seed", "Noise seed(s)"},
        {"smooth-window", "Odd moving-average window for noisy data"},
        {"source", "discrete | quadrature"},
        {"out", "Output directory"},
    };
    for (const auto& [key, help] : options) {
        sub->add_option("--" + key, flags.text[key], help);
    }
    sub->add_option("--config", flags.config_path, "key = value config file");
}

StudyConfig resolve(const CLI::App* sub, const FlagValues& flags, StudyConfig config) {
    if (!flags.config_path.empty()) {
        for (const auto& [key, value] : load_config_file(flags.config_path)) {
            apply_config_entry(config, key, value);
        }
    }
    for (const auto& [key, value] : flags.text) {
        if (sub->count("--" + key) > 0) {
            apply_config_entry(config, key, value);
        }
    }
    config.validate();
    return config;
}

StudyConfig defaults(int N, int M, double s) {
    StudyConfig c;
    c.s = s;
    c.N_values = {N};
    c.M_values = {M};
    return c;
}

Grid single_grid(const StudyConfig& c) {
    const int N = c.N_values.front();
    const int M = c.couple_tau_to_h ? static_cast<int>(std::lround(N * c.T / c.l))
                                    : c.M_values.front();
    return Grid::make(c.l, c.T, N, M, c.s);
}

void report_table(const ConvergenceTable& t) {
    std::printf("%-12s %-12s %-12s %-12s %-12s %-8s %-8s\n", "h", "tau", "linf_u", "l2_u",
                "linf_r", "ord_u", "ord_r");
    for (const auto& r : t.rows) {
        std::printf("%-12.5g %-12.5g %-12.4e %-12.4e %-12.4e %-8s %-8s\n", r.h, r.tau, r.linf_u,
                    r.l2_u, r.linf_r, r.order_u ? std::to_string(*r.order_u).substr(0, 6).c_str() : "",
                    r.order_r ? std::to_string(*r.order_r).substr(0, 6).c_str() : "");
    }
}

int cmd_forward(const StudyConfig& c) {
    const auto grid = single_grid(c);
    const auto mc = build_manufactured(c.example, grid, c.source);
    const StepOperators ops(assemble(grid), grid.tau(), c.solver, c.tol);
    const auto traj = run_forward(ops, grid, mc.data.phi, mc.data.forcing, mc.problem.r_exact);
    const fs::path out = c.output_dir;
    const Vector exact = mc.problem.u_nodal(grid, grid.final_time());
    write_u_final_csv(out / "u_final.csv", grid, traj.final_state(), exact);
    write_trajectory_csv(out / "trajectory.csv", grid, traj);
    std::printf("forward: linf error at T = %.6e\n",
                (traj.final_state() - exact).cwiseAbs().maxCoeff());
    return 0;
}

int cmd_inverse(const StudyConfig& c) {
    const auto grid = single_grid(c);
    const auto mc = build_manufactured(c.example, grid, c.source);
    MeasurementSeries w = mc.data.measurements;
    const double delta = c.deltas.empty() ? 0.0 : c.deltas.front();
    if (delta > 0.0) {
        NoiseSpec spec;
        spec.delta = delta;
        spec.seed = c.seeds.empty() ? 0 : c.seeds.front();
        w = perturb_measurements(w, spec);
    }
    if (c.smoothing_window > 1) {
        w = smooth_measurements(w, c.smoothing_window);
    }
    const auto result = run_manufactured_inverse(c.example, grid, c.source, c.solver, c.tol, w);
    if (result.inverse.compatibility_warning) {
        std::fprintf(stderr, "warning: w(0) and h<phi, omega> differ by %.3g (relative)\n",
                     result.inverse.compatibility_gap);
    }
    const fs::path out = c.output_dir;
    write_r_series_csv(out / "r_series.csv", grid, result.inverse.coefficients,
                       result.r_exact_mid);
    write_u_final_csv(out / "u_final.csv", grid, result.inverse.trajectory.final_state(),
                      result.u_exact_final);
    std::printf("inverse (%s): linf_u %.6e  l2_u %.6e  linf_r %.6e  l2_r %.6e\n",
                w.provenance().c_str(), result.errors.linf_u, result.errors.l2_u,
                result.errors.linf_r, result.errors.l2_r);
    return result.inverse.coefficients.values.allFinite() ? 0 : 1;
}

int cmd_convergence(const StudyConfig& c, bool time_study) {
    const auto table = time_study ? convergence_study_time(c) : convergence_study_space(c);
    write_table_csv(fs::path(c.output_dir) / (time_study ? "table1.csv" : "table2.csv"), table);
    report_table(table);
    return 0;
}

int cmd_noise(const StudyConfig& c) {
    if (c.deltas.empty() || c.seeds.empty()) {
        throw std::invalid_argument("noise: delta and seed lists must be nonempty");
    }
    const auto res = noise_study(c);
    write_noise_outputs(c.output_dir, res);
    for (double d : c.deltas) {
        const auto sm = res.mean_linf_r_smoothed(d);
        std::printf("delta %-6g mean linf_r %.4e", d, res.mean_linf_r(d));
        if (sm) {
            std::printf("  smoothed %.4e", *sm);
        }
        std::printf("\n");
    }
    for (const auto& nc : res.cases) {
        if (!nc.completed) {
            std::fprintf(stderr, "case delta=%g seed=%llu failed: %s\n", nc.delta,
                         static_cast<unsigned long long>(nc.seed), nc.failure.c_str());
        }
    }
    return res.all_completed() ? 0 : 1;
}

int cmd_oracle_check(const StudyConfig& c) {
    const auto grid = single_grid(c);
    const auto mc = build_manufactured(c.example, grid, SourceMode::discrete);
    const auto& p = mc.problem;
    const ScalarFunction u0 = [&p](double x) { return p.u_exact(0.0, x); };
    const Vector discrete = assemble(grid).apply(grid.sample(u0));
    const Vector oracle = quadrature_oracle(u0, grid);
    const fs::path path = fs::path(c.output_dir) / "oracle_check.csv";
    fs::create_directories(c.output_dir);
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) {
        throw IoError(path, "cannot open for writing");
    }
    std::fprintf(f, "x,a_u,oracle,abs_diff\n");
    for (int k = 0; k < grid.interior_size(); ++k) {
        std::fprintf(f, "%s,%s,%s,%s\n", format_real(grid.x_at(k)).c_str(),
                     format_real(discrete[k]).c_str(), format_real(oracle[k]).c_str(),
                     format_real(std::abs(discrete[k] - oracle[k])).c_str());
    }
    std::fclose(f);
    std::printf("oracle-check: max |A u - (-Delta)^s u| = %.6e\n",
                (discrete - oracle).cwiseAbs().maxCoeff());
    return 0;
}

int cmd_operator_dump(const StudyConfig& c) {
    const auto grid = single_grid(c);
    write_operator_csv(fs::path(c.output_dir) / "operator.csv", assemble(grid));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional heat equation: forward solver and coefficient recovery"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        FlagValues flags;
        StudyConfig base;
        std::function<int(const StudyConfig&)> run;
    };
    std::vector<std::unique_ptr<Sub>> subs;
    const auto add = [&](const std::string& name, const std::string& help, StudyConfig base,
                         std::function<int(const StudyConfig&)> run) {
        auto s = std::make_unique<Sub>();
        s->app = app.add_subcommand(name, help);
        s->base = std::move(base);
        s->run = std::move(run);
        add_common_flags(s->app, s->flags);
        subs.push_back(std::move(s));
    };

    add("forward", "Forward CN run with the exact coefficient", defaults(100, 100, 0.5),
        cmd_forward);
    add("inverse", "Recover r(t) from the example's measurements", defaults(100, 100, 0.5),
        cmd_inverse);
    {
        StudyConfig c = defaults(800, 50, 0.5);
        c.M_values = {50, 100, 200, 400, 800};
        add("convergence-time", "Errors at varying tau for fixed h (table1.csv)", c,
            [](const StudyConfig& cfg) { return cmd_convergence(cfg, true); });
    }
    {
        StudyConfig c = defaults(100, 100, 0.1);
        c.N_values = {100, 200, 400, 800};
        c.M_values.clear();
        c.couple_tau_to_h = true;
        add("convergence-space", "Errors at varying h with tau = h (table2.csv)", c,
            [](const StudyConfig& cfg) { return cmd_convergence(cfg, false); });
    }
    {
        StudyConfig c = defaults(100, 100, 0.5);
        c.deltas = {0.01, 0.03, 0.05};
        for (std::uint64_t k = 0; k < 10; ++k) {
            c.seeds.push_back(k);
        }
        add("noise", "Noisy-measurement study over delta and seed lists", c, cmd_noise);
    }
    add("oracle-check", "Compare A u with the quadrature fractional Laplacian",
        defaults(64, 1, 0.5), cmd_oracle_check);
    add("operator-dump", "Write the dense matrix A", defaults(16, 1, 0.5), cmd_operator_dump);

    CLI11_PARSE(app, argc, argv);

    for (const auto& s : subs) {
        if (!s->app->parsed()) {
            continue;
        }
        try {
            return s->run(resolve(s->app, s->flags, s->base));
        } catch (const std::exception& e) {
            std::cerr << s->app->get_name() << ": " << e.what() << '\n';
            return 2;
        }
    }
    return 2;
}
