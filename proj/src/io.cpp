#include "dbb/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dbb::io {

std::string format_shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::string format_exact(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return {buf, res.ptr};
}

double parse_double(std::string_view text) {
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw FormatError("not a number: '" + std::string(text) + "'");
  return x;
}

unsigned long long parse_unsigned(std::string_view text) {
  unsigned long long x = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw FormatError("not a non-negative integer: '" + std::string(text) + "'");
  return x;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::vector<std::string_view>> read_table(std::istream& in, std::string_view header,
                                                      std::vector<std::string>& storage) {
  std::string line;
  if (!std::getline(in, line) || line != header) throw FormatError("unexpected CSV header");
  const std::size_t columns = split(header, ',').size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    storage.push_back(line);
  }
  std::vector<std::vector<std::string_view>> rows;
  rows.reserve(storage.size());
  for (const auto& s : storage) {
    auto cells = split(s, ',');
    if (cells.size() != columns) throw FormatError("wrong number of CSV columns");
    rows.push_back(std::move(cells));
  }
  return rows;
}

} // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kSweepHeader << '\n';
  for (const auto& r : records) {
    out << format_shortest(r.lambda) << ',' << r.n << ',' << r.epoch << ',' << format_shortest(r.mse_dbb_empirical)
        << ',' << format_shortest(r.mse_dbb_closed) << ',' << format_shortest(r.mse_point_empirical) << ','
        << format_shortest(r.mse_point_closed) << ',' << format_shortest(r.stderr_dbb) << ','
        << format_shortest(r.stderr_point) << '\n';
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::vector<std::string> storage;
  std::vector<SweepRecord> out;
  for (const auto& c : read_table(in, kSweepHeader, storage)) {
    SweepRecord r;
    r.lambda = parse_double(c[0]);
    r.n = parse_unsigned(c[1]);
    r.epoch = parse_unsigned(c[2]);
    r.mse_dbb_empirical = parse_double(c[3]);
    r.mse_dbb_closed = parse_double(c[4]);
    r.mse_point_empirical = parse_double(c[5]);
    r.mse_point_closed = parse_double(c[6]);
    r.stderr_dbb = parse_double(c[7]);
    r.stderr_point = parse_double(c[8]);
    r.point_variance_degenerate = r.n == 1;
    out.push_back(r);
  }
  return out;
}

void write_metrics_csv(std::ostream& out, const std::vector<StepMetrics>& steps) {
  out << kMetricsHeader << '\n';
  for (const auto& s : steps) {
    out << s.step << ',' << format_shortest(s.mean_reward) << ',' << format_shortest(s.entropy) << ','
        << format_shortest(s.zero_var_frac) << ',' << format_shortest(s.clip_frac) << '\n';
  }
}

std::vector<StepMetrics> read_metrics_csv(std::istream& in) {
  std::vector<std::string> storage;
  std::vector<StepMetrics> out;
  for (const auto& c : read_table(in, kMetricsHeader, storage)) {
    out.push_back({parse_unsigned(c[0]), parse_double(c[1]), parse_double(c[2]), parse_double(c[3]),
                   parse_double(c[4])});
  }
  return out;
}

namespace {
constexpr std::string_view kSnapshotMagic = "dbb-snapshot";
}

void save_snapshot(std::ostream& out, const PosteriorSnapshot& snapshot) {
  out << kSnapshotMagic << " v" << snapshot.version << " lambda=" << format_exact(snapshot.lambda) << '\n';
  for (const auto& r : snapshot.records) {
    if (r.prompt_id.find_first_of("\t\n") != std::string::npos)
      throw FormatError("prompt id contains a tab or newline");
    out << r.prompt_id << '\t' << format_exact(r.state.alpha) << '\t' << format_exact(r.state.beta) << '\t'
        << r.state.visits << '\n';
  }
}

PosteriorSnapshot load_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty snapshot");
  const auto head = split(line, ' ');
  if (head.size() != 3 || head[0] != kSnapshotMagic) throw FormatError("not a posterior snapshot");
  if (head[1] != "v1") throw FormatError("unsupported snapshot version: " + std::string(head[1]));
  if (head[2].substr(0, 7) != "lambda=") throw FormatError("snapshot header lacks lambda");

  PosteriorSnapshot snap;
  snap.version = 1;
  snap.lambda = parse_double(head[2].substr(7));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 4) throw FormatError("snapshot record needs 4 tab-separated fields");
    PromptPosterior r{std::string(f[0]), {parse_double(f[1]), parse_double(f[2]), parse_unsigned(f[3])}};
    if (!(r.state.alpha > 0.0) || !(r.state.beta > 0.0)) throw FormatError("snapshot pseudo-counts must be positive");
    snap.records.push_back(std::move(r));
  }
  return snap;
}

void save_snapshot(const std::filesystem::path& path, const PosteriorSnapshot& snapshot) {
  std::ostringstream os;
  save_snapshot(os, snapshot);
  write_file(path, os.str());
}

PosteriorSnapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path.string());
  return load_snapshot(in);
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace dbb::io
