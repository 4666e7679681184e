#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dbb/simulator.hpp"
#include "dbb/trainer.hpp"

namespace dbb::io {

/// Raised for malformed files. The CLI maps it to the config-error exit code.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that parses back to exactly `x`.
std::string format_shortest(double x);
/// 17 significant digits, enough to round-trip any double.
std::string format_exact(double x);
/// Strict full-string parse; throws FormatError.
double parse_double(std::string_view text);
unsigned long long parse_unsigned(std::string_view text);

inline constexpr std::string_view kSweepHeader =
    "lambda,n,epoch,mse_dbb_emp,mse_dbb_closed,mse_pt_emp,mse_pt_closed,stderr_dbb,stderr_pt";
inline constexpr std::string_view kMetricsHeader = "step,mean_reward,entropy,zero_var_frac,clip_frac";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
/// Inverse of write_sweep_csv. point_variance_degenerate is recovered from n.
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

void write_metrics_csv(std::ostream& out, const std::vector<StepMetrics>& steps);
std::vector<StepMetrics> read_metrics_csv(std::istream& in);

/// Persisted posterior store. Text format:
///   dbb-snapshot v1 lambda=<value>
///   <prompt_id>\t<alpha>\t<beta>\t<visits>
///   ...
struct PosteriorSnapshot {
  int version = 1;
  double lambda = 0.5;
  std::vector<PromptPosterior> records;

  friend bool operator==(const PosteriorSnapshot&, const PosteriorSnapshot&) = default;
};

void save_snapshot(std::ostream& out, const PosteriorSnapshot& snapshot);
/// Throws FormatError on a malformed file or a version other than v1.
PosteriorSnapshot load_snapshot(std::istream& in);

void save_snapshot(const std::filesystem::path& path, const PosteriorSnapshot& snapshot);
PosteriorSnapshot load_snapshot(const std::filesystem::path& path);

/// Writes `contents` to `path`, throwing std::runtime_error if the file cannot
/// be opened or written.
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace dbb::io
