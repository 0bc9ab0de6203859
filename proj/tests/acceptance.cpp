// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "fracheat/forward.hpp"
#include "fracheat/inverse.hpp"
#include "fracheat/io.hpp"
#include "fracheat/manufactured.hpp"
#include "fracheat/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace fracheat;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

fs::path out_root() {
    return fs::temp_directory_path() / "fracheat_acceptance";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome matrix_structure() {
    bool ok = true;
    double min_eig = INFINITY;
    for (int N : {16, 32, 64}) {
        for (double s : {0.1, 0.5, 0.9}) {
            const auto a = assemble(Grid::make(1.0, 1.0, N, 1, s));
            for (int i = 0; i < a.size(); ++i) {
                for (int j = 0; j < i; ++j) {
                    ok = ok && a.entry(i, j) == a.entry(j, i);
                }
            }
            const double e = eigendecompose(a.dense()).eigenvalues.minCoeff();
            min_eig = std::min(min_eig, e);
            ok = ok && e > 0.0;
        }
    }
    return {ok, "symmetric, min eigenvalue " + fmt("%.4g", min_eig)};
}

Outcome normalization() {
    const double pi = std::numbers::pi;
    const double e1 = std::abs(normalization_constant(0.5) - 1.0 / pi) * pi;
    const double q = std::sqrt(2.0) / (4.0 * std::sqrt(pi));
    const double e2 = std::abs(normalization_constant(0.25) - q) / q;
    return {e1 <= 1e-12 && e2 <= 1e-12,
            "rel err s=0.5 " + fmt("%.2e", e1) + ", s=0.25 " + fmt("%.2e", e2)};
}

Outcome energy_identity() {
    const auto g = Grid::make(1.0, 1.0, 64, 64, 0.5);
    const auto a = assemble(g);
    const StepOperators ops(a, g.tau());
    const Vector phi = build_manufactured(ExampleId::example1, g).data.phi;
    const ForcingField zero = [](double) { return Vector(Vector::Zero(63)); };
    const auto traj = run_forward(ops, g, phi, zero, [](double) { return 0.0; });
    double worst = 0.0;
    bool monotone = true;
    for (int n = 0; n < 64; ++n) {
        worst = std::max(worst, std::abs(energy_identity_residual(a, traj.states[n],
                                                                  traj.states[n + 1], g.tau())));
        monotone = monotone && traj.states[n + 1].norm() <= traj.states[n].norm();
    }
    const double rel = worst / phi.squaredNorm();
    return {rel <= 1e-10 && monotone,
            "max residual/||U0||^2 " + fmt("%.2e", rel) + (monotone ? ", monotone" : ", NOT monotone")};
}

Outcome modal_contractivity() {
    const auto g = Grid::make(1.0, 1.0, 16, 1, 0.5);
    const auto a = assemble(g);
    const auto d = eigendecompose(a.dense());
    double worst_g = 0.0;
    double worst_err = 0.0;
    for (double tau : {1e-3, 1.0, 1e3}) {
        const StepOperators ops(a, tau);
        for (int k = 0; k < d.size(); ++k) {
            const double gk = amplification_factor(tau * d.eigenvalues[k]);
            worst_g = std::max(worst_g, std::abs(gk));
            const Vector q = d.eigenvectors.col(k);
            worst_err = std::max(worst_err,
                                 (cn_step(ops, q, 0.0, Vector::Zero(15)) - gk * q).norm());
        }
    }
    return {worst_g <= 1.0 && worst_err <= 1e-10,
            "max |g| " + fmt("%.6f", worst_g) + ", max modal err " + fmt("%.2e", worst_err)};
}

Outcome temporal_order() {
    const auto g0 = Grid::make(1.0, 1.0, 32, 1, 0.5);
    const auto a = assemble(g0);
    const auto d = eigendecompose(a.dense());
    const auto mc0 = build_manufactured(ExampleId::example1, g0);
    const Vector ref =
        spectral_duhamel_oracle(d, mc0.data.phi, mc0.problem.r_exact, mc0.data.forcing, g0, 16384);
    std::vector<double> gaps;
    std::vector<double> taus;
    for (int M : {20, 40, 80, 160}) {
        const auto g = Grid::make(1.0, 1.0, 32, M, 0.5);
        const auto mc = build_manufactured(ExampleId::example1, g);
        const StepOperators ops(a, g.tau());
        const auto traj = run_forward(ops, g, mc.data.phi, mc.data.forcing, mc.problem.r_exact);
        gaps.push_back((traj.final_state() - ref).cwiseAbs().maxCoeff());
        taus.push_back(g.tau());
    }
    const double slope = rate_fit(gaps, taus);
    return {std::abs(slope - 2.0) <= 0.2,
            "slope " + fmt("%.4f", slope) + ", gap at 1/160 " + fmt("%.3e", gaps.back())};
}

Outcome roundtrip() {
    double worst_r = 0.0;
    double worst_u = 0.0;
    const ScalarFunction r = [](double t) { return 1.0 + std::sin(t); };
    for (double s : {0.1, 0.5, 0.9}) {
        const auto g = Grid::make(1.0, 1.0, 64, 64, s);
        const auto mc = build_manufactured(ExampleId::example2, g);
        const StepOperators ops(assemble(g), g.tau());
        const auto fwd = run_forward(ops, g, mc.data.phi, mc.data.forcing, r);
        const auto w = measure_trajectory(fwd, mc.data.weight, g.h());
        const auto inv = run_inverse(ops, g, mc.data.phi, mc.data.forcing, mc.data.weight, w);
        worst_r = std::max(worst_r, (inv.coefficients.values - sample_midpoints(g, r).values)
                                        .cwiseAbs()
                                        .maxCoeff());
        for (int n = 0; n <= 64; ++n) {
            worst_u = std::max(
                worst_u, (inv.trajectory.states[n] - fwd.states[n]).cwiseAbs().maxCoeff());
        }
    }
    return {worst_r <= 1e-9 && worst_u <= 1e-9,
            "max r err " + fmt("%.2e", worst_r) + ", max U err " + fmt("%.2e", worst_u)};
}

StudyConfig table1_config() {
    StudyConfig c;
    c.example = ExampleId::example1;
    c.s = 0.5;
    c.N_values = {200};
    c.M_values = {50, 100, 200, 400};
    return c;
}

StudyConfig noise_config() {
    StudyConfig c;
    c.example = ExampleId::example1;
    c.s = 0.5;
    c.N_values = {100};
    c.M_values = {100};
    c.deltas = {0.01, 0.03, 0.05};
    for (std::uint64_t k = 0; k < 10; ++k) {
        c.seeds.push_back(k);
    }
    return c;
}

Outcome table1_trend() {
    const auto t = convergence_study_time(table1_config());
    std::vector<double> eu, er, taus;
    for (const auto& row : t.rows) {
        eu.push_back(row.linf_u);
        er.push_back(row.linf_r);
        taus.push_back(row.tau);
    }
    const double pu = rate_fit(eu, taus);
    const double pr = rate_fit(er, taus);
    const double r100 = t.rows[1].linf_r;
    const double scale = 3.327e-5;
    const bool ok = std::abs(pu - 2.0) <= 0.3 && std::abs(pr - 2.0) <= 0.3 && r100 <= 5 * scale &&
                    r100 >= scale / 5;
    write_table_csv(out_root() / "table1.csv", t);
    return {ok, "order u " + fmt("%.3f", pu) + ", order r " + fmt("%.3f", pr) +
                    ", linf_r(1/100) " + fmt("%.3e", r100)};
}

Outcome table2_trend() {
    StudyConfig c;
    c.example = ExampleId::example1;
    c.s = 0.1;
    c.N_values = {100, 200, 400};
    c.couple_tau_to_h = true;
    const auto fit = [](const ConvergenceTable& t, bool use_u) {
        std::vector<double> e, h;
        for (const auto& row : t.rows) {
            e.push_back(use_u ? row.linf_u : row.linf_r);
            h.push_back(row.h);
        }
        return rate_fit(e, h);
    };
    const auto disc = convergence_study_space(c);
    write_table_csv(out_root() / "table2_discrete.csv", disc);
    c.source = SourceMode::quadrature;
    const auto quad = convergence_study_space(c);
    write_table_csv(out_root() / "table2_quadrature.csv", quad);
    const double du = fit(disc, true);
    const double dr = fit(disc, false);
    const double qu = fit(quad, true);
    const double qr = fit(quad, false);
    const double lo = 2.0 - 2.0 * c.s - 0.25;
    const bool disc_ok = std::abs(du - 2.0) <= 0.3 && std::abs(dr - 2.0) <= 0.3;
    const bool quad_ok = qu >= lo && qu <= 2.1 && qr >= lo && qr <= 2.1;
    return {disc_ok && quad_ok, "discrete order u " + fmt("%.3f", du) + " r " + fmt("%.3f", dr) +
                                    "; quadrature order u " + fmt("%.3f", qu) + " r " +
                                    fmt("%.3f", qr) + " (required [" + fmt("%.2f", lo) + ", 2.1])"};
}

Outcome stability() {
    const auto g = Grid::make(1.0, 1.0, 100, 100, 0.5);
    const auto a = assemble(g);
    const auto fa = cholesky(a.dense());
    const StepOperators ops(a, g.tau());
    const auto mc = build_manufactured(ExampleId::example1, g);
    const auto r = sample_midpoints(g, mc.problem.r_exact);
    const std::span<const double> rs(r.values.data(), r.values.size());
    const auto traj = run_forward(ops, g, mc.data.phi, mc.data.forcing, rs);
    const auto rep = stability_bounds(traj, rs, mc.data.forcing, a, fa, g);
    return {rep.holds(0.0), "min L2 slack " + fmt("%.3e", rep.min_l2_slack()) +
                                ", min energy slack " + fmt("%.3e", rep.min_energy_slack())};
}

Outcome noise() {
    const auto res = noise_study(noise_config());
    write_noise_outputs(out_root() / "noise", res);
    const double m1 = res.mean_linf_r(0.01);
    const double m3 = res.mean_linf_r(0.03);
    const double m5 = res.mean_linf_r(0.05);
    bool finite = res.all_completed();
    for (const auto& c : res.cases) {
        finite = finite && c.r_raw.values.allFinite();
    }
    const bool files = fs::exists(out_root() / "noise" / "r_recovered_delta0.05_seed9.csv") &&
                       fs::exists(out_root() / "noise" / "noise_summary.csv");
    return {finite && m1 <= m3 && m3 <= m5 && files,
            "mean linf_r " + fmt("%.3e", m1) + " / " + fmt("%.3e", m3) + " / " + fmt("%.3e", m5) +
                (files ? ", CSVs written" : ", CSVs missing")};
}

Outcome determinism() {
    bool same = true;
    int compared = 0;
    std::vector<fs::path> dirs = {out_root() / "det_a", out_root() / "det_b"};
    for (const auto& d : dirs) {
        fs::remove_all(d);
        write_table_csv(d / "table1.csv", convergence_study_time(table1_config()));
        write_noise_outputs(d / "noise", noise_study(noise_config()));
    }
    for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
        if (!entry.is_regular_file()) {
            continue;
        }
        const auto rel = fs::relative(entry.path(), dirs[0]);
        same = same && fs::exists(dirs[1] / rel) && slurp(entry.path()) == slurp(dirs[1] / rel);
        ++compared;
    }
    return {same && compared > 1, std::to_string(compared) + " files compared"};
}

}  // namespace

int main() {
    fs::create_directories(out_root());
    struct Criterion {
        std::string name;
        std::function<Outcome()> run;
        double time_limit;  // seconds; 0 means unlimited
    };
    const std::vector<Criterion> criteria = {
        {"matrix structure", matrix_structure, 5.0},
        {"normalization constant", normalization, 0.0},
        {"energy identity", energy_identity, 0.0},
        {"modal contractivity", modal_contractivity, 0.0},
        {"temporal order vs spectral oracle", temporal_order, 30.0},
        {"inverse roundtrip", roundtrip, 0.0},
        {"time convergence (N=200)", table1_trend, 120.0},
        {"space convergence (s=0.1, tau=h)", table2_trend, 240.0},
        {"stability bounds", stability, 0.0},
        {"noise study", noise, 120.0},
        {"determinism", determinism, 0.0},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].time_limit > 0.0 && secs > criteria[i].time_limit) {
            o.pass = false;
            o.detail += ", over the " + fmt("%.0f", criteria[i].time_limit) + " s budget";
        }
        std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
