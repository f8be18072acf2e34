#include "popsync/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "popsync/analyzer.hpp"
#include "popsync/version.hpp"

namespace popsync {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& s) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("malformed number '" + s + "' in CSV");
  return value;
}

std::string optional_number(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string();
}

// Data lines of a CSV file with the header line checked and '#' lines split off.
std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path,
                                                 const std::string& header_prefix,
                                                 std::vector<std::string>* comments) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (comments) comments->push_back(line);
      continue;
    }
    if (!header) {
      if (line.rfind(header_prefix, 0) != 0)
        throw std::runtime_error("unexpected header in " + path.string());
      header = true;
      continue;
    }
    rows.push_back(split_fields(line));
  }
  if (!header) throw std::runtime_error("missing header in " + path.string());
  return rows;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::vector<CriticalRow> critical_rows(const CriticalSet& set,
                                       const SystemConfig& system) {
  const auto dists = system.distributions();
  const RealMatrix alpha = system.coupling.lags();
  std::vector<CriticalRow> rows;
  for (const auto& s : set.solutions) {
    const complex det = evaluate_determinant(system.coupling.k, alpha, dists,
                                             s.eta_star, s.v_star);
    rows.push_back({s.eta_star, s.v_star, s.branch_id,
                    std::abs(det) / residual_scale(dists, s.v_star),
                    set.is_relevant(s)});
  }
  return rows;
}

void write_critical_csv(const std::filesystem::path& path,
                        const std::vector<CriticalRow>& rows) {
  auto out = open_out(path);
  out << "eta_star,v_star,branch_id,residual,is_relevant\n";
  for (const auto& r : rows)
    out << format_number(r.eta_star) << ',' << format_number(r.v_star) << ','
        << r.branch_id << ',' << format_number(r.residual) << ','
        << (r.is_relevant ? "true" : "false") << '\n';
}

std::vector<CriticalRow> read_critical_csv(const std::filesystem::path& path) {
  std::vector<CriticalRow> rows;
  for (const auto& f : read_table(path, "eta_star,", nullptr)) {
    if (f.size() != 5) throw std::runtime_error("critical.csv row needs 5 fields");
    rows.push_back({parse_number(f[0]), parse_number(f[1]),
                    static_cast<int>(parse_number(f[2])), parse_number(f[3]),
                    f[4] == "true"});
  }
  return rows;
}

CriticalSet critical_set_from_rows(const std::vector<CriticalRow>& rows) {
  std::vector<CriticalSolution> solutions;
  for (const auto& r : rows) solutions.push_back({r.eta_star, r.v_star, r.branch_id});
  return CriticalSet::from_solutions(std::move(solutions));
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  const auto& md = result.metadata;
  const std::size_t m = result.r_mean.size();
  auto out = open_out(path);
  out << "# popsync version = " << kVersion << '\n';
  out << "# seed = " << md.seed << '\n';
  out << "# dt = " << format_number(md.dt) << '\n';
  out << "# t_transient = " << format_number(md.t_transient) << '\n';
  out << "# t_average = " << format_number(md.t_average) << '\n';
  out << "# n =";
  for (std::size_t p = 0; p < md.n.size(); ++p) out << (p ? "," : " ") << md.n[p];
  out << '\n';
  out << "# sampling = " << md.sampling_mode << '\n';
  out << "# initial_phases = " << md.initial_phase_mode << '\n';
  out << "# engine = " << md.engine << '\n';
  out << "eta";
  for (std::size_t p = 1; p <= m; ++p) out << ",r_mean_" << p;
  for (std::size_t p = 1; p <= m; ++p) out << ",r_std_" << p;
  out << '\n';
  for (std::size_t j = 0; j < result.eta_values.size(); ++j) {
    out << format_number(result.eta_values[j]);
    for (std::size_t p = 0; p < m; ++p) out << ',' << format_number(result.r_mean[p][j]);
    for (std::size_t p = 0; p < m; ++p) out << ',' << format_number(result.r_std[p][j]);
    out << '\n';
  }
}

SweepResult read_sweep_csv(const std::filesystem::path& path) {
  std::vector<std::string> comments;
  const auto rows = read_table(path, "eta", &comments);
  SweepResult result;
  auto& md = result.metadata;
  for (const auto& c : comments) {
    const auto eq = c.find(" = ");
    if (eq == std::string::npos || c.size() < 2) continue;
    const std::string key = c.substr(2, eq - 2);
    const std::string value = c.substr(eq + 3);
    if (key == "n") {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ','))
        md.n.push_back(static_cast<std::size_t>(std::stoull(item)));
    } else if (key == "seed") md.seed = std::stoull(value);
    else if (key == "dt") md.dt = parse_number(value);
    else if (key == "t_transient") md.t_transient = parse_number(value);
    else if (key == "t_average") md.t_average = parse_number(value);
    else if (key == "sampling") md.sampling_mode = value;
    else if (key == "initial_phases") md.initial_phase_mode = value;
    else if (key == "engine") md.engine = value;
  }
  const std::size_t m = md.n.size();
  result.r_mean.assign(m, {});
  result.r_std.assign(m, {});
  for (const auto& f : rows) {
    if (f.size() != 1 + 2 * m) throw std::runtime_error("sweep.csv row has wrong width");
    result.eta_values.push_back(parse_number(f[0]));
    for (std::size_t p = 0; p < m; ++p) {
      result.r_mean[p].push_back(parse_number(f[1 + p]));
      result.r_std[p].push_back(parse_number(f[1 + m + p]));
    }
  }
  return result;
}

VerifyReport compare_onsets(const CriticalSet& predicted, const SweepResult& sweep,
                            const VerifyOptions& options) {
  std::vector<double> neg, pos;
  for (std::size_t p = 0; p < sweep.r_mean.size(); ++p)
    for (double e : detect_onset(sweep, p, options.onset)) (e < 0.0 ? neg : pos).push_back(e);

  VerifyReport report;
  auto side = [&](const char* name, const std::optional<double>& expected,
                  const std::vector<double>& onsets) {
    if (!expected && onsets.empty()) return;
    VerifyRow row;
    row.side = name;
    row.predicted = expected;
    if (expected) {
      row.tolerance = std::abs(*expected) < options.near_zero
                          ? options.abs_tolerance
                          : options.rel_tolerance * std::abs(*expected);
      for (double e : onsets)
        if (!row.detected || std::abs(e - *expected) < std::abs(*row.detected - *expected))
          row.detected = e;
      row.matched = row.detected && std::abs(*row.detected - *expected) <= row.tolerance;
    } else {
      // Onset where none was predicted: report the one nearest zero.
      for (double e : onsets)
        if (!row.detected || std::abs(e) < std::abs(*row.detected)) row.detected = e;
      row.matched = false;
    }
    report.rows.push_back(row);
  };
  side("negative", predicted.relevant_negative, neg);
  side("positive", predicted.relevant_positive, pos);

  report.vacuous = report.rows.empty();
  report.passed = true;
  for (const auto& r : report.rows) report.passed = report.passed && r.matched;
  return report;
}

void write_verify_csv(const std::filesystem::path& path, const VerifyReport& report) {
  auto out = open_out(path);
  out << "side,predicted_eta,detected_eta,abs_error,rel_error,tolerance,matched\n";
  for (const auto& r : report.rows) {
    std::optional<double> abs_err, rel_err;
    if (r.predicted && r.detected) {
      abs_err = std::abs(*r.detected - *r.predicted);
      rel_err = *abs_err / std::abs(*r.predicted);
    }
    out << r.side << ',' << optional_number(r.predicted) << ','
        << optional_number(r.detected) << ',' << optional_number(abs_err) << ','
        << optional_number(rel_err) << ',' << format_number(r.tolerance) << ','
        << (r.matched ? "true" : "false") << '\n';
  }
}

}  // namespace popsync
