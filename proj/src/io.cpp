#include "fracheat/io.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fracheat {

IoError::IoError(const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what), path_(path) {}

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError(path.parent_path(), "cannot create directory: " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(path, std::string("cannot open for writing: ") + std::strerror(errno));
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw IoError(path, "write failed");
    }
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw std::invalid_argument("empty entry in list '" + text + "'");
        }
        items.push_back(item);
    }
    if (items.empty()) {
        throw std::invalid_argument("empty list");
    }
    return items;
}

long long parse_integer(const std::string& text) {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) {
        throw std::invalid_argument("not an integer: '" + text + "'");
    }
    return v;
}

double parse_real(const std::string& text) {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw std::invalid_argument("not a boolean: '" + text + "'");
}

constexpr std::array<const char*, 14> kConfigKeys = {
    "example", "s",   "l",      "T",     "N",    "M",    "couple-tau-h",
    "solver",  "tol", "source", "delta", "seed", "smooth-window", "out",
};

}  // namespace

void write_table_csv(const std::filesystem::path& path, const ConvergenceTable& table) {
    auto out = open_output(path);
    out << "h,tau,linf_u,l2_u,linf_r,order_u,order_r\n";
    for (const auto& row : table.rows) {
        out << format_real(row.h) << ',' << format_real(row.tau) << ',' << format_real(row.linf_u)
            << ',' << format_real(row.l2_u) << ',' << format_real(row.linf_r) << ','
            << (row.order_u ? format_real(*row.order_u) : "") << ','
            << (row.order_r ? format_real(*row.order_r) : "") << '\n';
    }
    finish(out, path);
}

void write_r_series_csv(const std::filesystem::path& path, const Grid& grid,
                        const CoefficientSeries& r, const std::optional<Vector>& r_exact) {
    auto out = open_output(path);
    out << (r_exact ? "t_mid,r_recovered,r_exact,abs_error\n" : "t_mid,r_recovered\n");
    for (Eigen::Index n = 0; n < r.values.size(); ++n) {
        out << format_real(grid.t_mid(static_cast<int>(n))) << ',' << format_real(r.values[n]);
        if (r_exact) {
            out << ',' << format_real((*r_exact)[n]) << ','
                << format_real(std::abs(r.values[n] - (*r_exact)[n]));
        }
        out << '\n';
    }
    finish(out, path);
}

void write_u_final_csv(const std::filesystem::path& path, const Grid& grid, const Vector& u,
                       const std::optional<Vector>& u_exact) {
    auto out = open_output(path);
    out << (u_exact ? "x,u_num,u_exact,abs_error\n" : "x,u_num\n");
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        out << format_real(grid.x_at(static_cast<int>(k))) << ',' << format_real(u[k]);
        if (u_exact) {
            out << ',' << format_real((*u_exact)[k]) << ','
                << format_real(std::abs(u[k] - (*u_exact)[k]));
        }
        out << '\n';
    }
    finish(out, path);
}

void write_trajectory_csv(const std::filesystem::path& path, const Grid& grid,
                          const Trajectory& trajectory) {
    auto out = open_output(path);
    out << "t,x,u\n";
    for (std::size_t n = 0; n < trajectory.size(); ++n) {
        const auto& state = trajectory.states[n];
        const std::string t = format_real(grid.t(static_cast<int>(n)));
        for (Eigen::Index k = 0; k < state.size(); ++k) {
            out << t << ',' << format_real(grid.x_at(static_cast<int>(k))) << ','
                << format_real(state[k]) << '\n';
        }
    }
    finish(out, path);
}

void write_operator_csv(const std::filesystem::path& path, const RieszOperator& op) {
    auto out = open_output(path);
    write_dense_csv(op, out);
    finish(out, path);
}

std::string noise_case_filename(const std::string& stem, double delta, std::uint64_t seed) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", delta);
    return stem + "_delta" + buf + "_seed" + std::to_string(seed) + ".csv";
}

void write_noise_outputs(const std::filesystem::path& dir, const NoiseStudyResult& result) {
    for (const auto& c : result.cases) {
        if (!c.completed) {
            continue;
        }
        write_r_series_csv(dir / noise_case_filename("r_recovered", c.delta, c.seed), result.grid,
                           c.r_raw, result.r_exact_mid);
        write_u_final_csv(dir / noise_case_filename("u_final", c.delta, c.seed), result.grid,
                          c.u_final, result.u_exact_final);
        if (c.r_smoothed) {
            write_r_series_csv(dir / noise_case_filename("r_smoothed", c.delta, c.seed),
                               result.grid, *c.r_smoothed, result.r_exact_mid);
        }
    }
    const auto summary = dir / "noise_summary.csv";
    auto out = open_output(summary);
    out << "delta,seed,completed,linf_r,l2_r,linf_u,l2_u,linf_r_smoothed,l2_r_smoothed\n";
    for (const auto& c : result.cases) {
        out << format_real(c.delta) << ',' << c.seed << ',' << (c.completed ? 1 : 0) << ',';
        if (c.completed) {
            out << format_real(c.errors_raw.linf_r) << ',' << format_real(c.errors_raw.l2_r) << ','
                << format_real(c.errors_raw.linf_u) << ',' << format_real(c.errors_raw.l2_u);
        } else {
            out << ",,,";
        }
        out << ',';
        if (c.completed && c.errors_smoothed) {
            out << format_real(c.errors_smoothed->linf_r) << ','
                << format_real(c.errors_smoothed->l2_r);
        } else {
            out << ',';
        }
        out << '\n';
    }
    finish(out, summary);
}

bool is_config_key(const std::string& key) {
    return std::find(kConfigKeys.begin(), kConfigKeys.end(), key) != kConfigKeys.end();
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> entries;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (!is_config_key(key)) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        }
        if (value.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty value for '" + key + "'");
        }
        if (!entries.emplace(key, value).second) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": duplicate key '" + key + "'");
        }
    }
    return entries;
}

std::map<std::string, std::string> load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path, "cannot open config file");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const std::invalid_argument& e) {
        throw IoError(path, e.what());
    }
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split_list(text)) {
        out.push_back(static_cast<int>(parse_integer(item)));
    }
    return out;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        out.push_back(parse_real(item));
    }
    return out;
}

SolverKind parse_solver(const std::string& text) {
    if (text == "cholesky") {
        return SolverKind::cholesky;
    }
    if (text == "cg") {
        return SolverKind::cg;
    }
    if (text == "auto") {
        return SolverKind::automatic;
    }
    throw std::invalid_argument("unknown solver '" + text + "'");
}

void apply_config_entry(StudyConfig& config, const std::string& key, const std::string& value) {
    if (key == "example") {
        config.example = parse_example(value);
    } else if (key == "s") {
        config.s = parse_real(value);
    } else if (key == "l") {
        config.l = parse_real(value);
    } else if (key == "T") {
        config.T = parse_real(value);
    } else if (key == "N") {
        config.N_values = parse_int_list(value);
    } else if (key == "M") {
        config.M_values = parse_int_list(value);
    } else if (key == "couple-tau-h") {
        config.couple_tau_to_h = parse_bool(value);
    } else if (key == "solver") {
        config.solver = parse_solver(value);
    } else if (key == "tol") {
        config.tol = parse_real(value);
    } else if (key == "source") {
        config.source = parse_source(value);
    } else if (key == "delta") {
        config.deltas = parse_real_list(value);
    } else if (key == "seed") {
        config.seeds.clear();
        for (const auto& item : split_list(value)) {
            const long long v = parse_integer(item);
            if (v < 0) {
                throw std::invalid_argument("seed must be nonnegative");
            }
            config.seeds.push_back(static_cast<std::uint64_t>(v));
        }
    } else if (key == "smooth-window") {
        config.smoothing_window = static_cast<int>(parse_integer(value));
    } else if (key == "out") {
        config.output_dir = value;
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

}  // namespace fracheat
