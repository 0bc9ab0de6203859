#pragma once

#include "fracheat/riesz.hpp"
#include "fracheat/study.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace fracheat {

class IoError : public std::runtime_error {
public:
    IoError(const std::filesystem::path& path, const std::string& what);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// 17 significant digits, '.' decimal separator.
std::string format_real(double value);

// CSV writers. Header row always present, LF line endings, files overwritten.

/// h,tau,linf_u,l2_u,linf_r,order_u,order_r (orders empty on the first row).
void write_table_csv(const std::filesystem::path& path, const ConvergenceTable& table);

/// t_mid,r_recovered[,r_exact,abs_error].
void write_r_series_csv(const std::filesystem::path& path, const Grid& grid,
                        const CoefficientSeries& r, const std::optional<Vector>& r_exact = {});

/// x,u_num[,u_exact,abs_error].
void write_u_final_csv(const std::filesystem::path& path, const Grid& grid, const Vector& u,
                       const std::optional<Vector>& u_exact = {});

/// t,x,u with one row per (n, i), interior nodes only.
void write_trajectory_csv(const std::filesystem::path& path, const Grid& grid,
                          const Trajectory& trajectory);

/// Dense A, row-major, no header.
void write_operator_csv(const std::filesystem::path& path, const RieszOperator& op);

/// "r_recovered_delta0.01_seed3.csv" and friends; delta in shortest %g form.
std::string noise_case_filename(const std::string& stem, double delta, std::uint64_t seed);

/// Per case: r_recovered_*.csv, u_final_*.csv, and r_smoothed_*.csv when
/// smoothing was applied; plus noise_summary.csv over all cases.
void write_noise_outputs(const std::filesystem::path& dir, const NoiseStudyResult& result);

/// Parses flat "key = value" text. Blank lines and lines starting with '#'
/// are skipped. Unknown keys, duplicate keys and malformed lines throw
/// std::invalid_argument naming the line.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::filesystem::path& path);

/// Applies one key/value pair (keys as accepted by parse_config_text).
void apply_config_entry(StudyConfig& config, const std::string& key, const std::string& value);

bool is_config_key(const std::string& key);

std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
SolverKind parse_solver(const std::string& text);

}  // namespace fracheat
