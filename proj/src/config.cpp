#include "popsync/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"

namespace popsync {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> keys;
  for (const char* k : allowed) keys.insert(k);
  for (const auto& [key, _] : obj.items())
    if (!keys.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  return v.get<double>();
}

RealMatrix matrix(const json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty())
    throw ConfigError(what + " must be a non-empty list of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto cols = rows.front().is_array() ? rows.front().size() : 0;
  RealMatrix m(n, static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != cols)
      throw ConfigError(what + " rows must be lists of equal length");
    for (std::size_t j = 0; j < cols; ++j)
      m(i, static_cast<Eigen::Index>(j)) = number(row[j], what + " entry");
  }
  return m;
}

json matrix_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::uint64_t unsigned_int(const json& v, const std::string& what) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0))
    throw ConfigError(what + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

void parse_sim(const json& j, SimParams& sim) {
  reject_unknown(j, {"dt", "t_transient", "t_average", "seed", "sampling",
                     "initial_phases"},
                 "sim");
  if (j.contains("dt")) sim.dt = number(j["dt"], "sim.dt");
  if (j.contains("t_transient")) sim.t_transient = number(j["t_transient"], "sim.t_transient");
  if (j.contains("t_average")) sim.t_average = number(j["t_average"], "sim.t_average");
  if (j.contains("seed")) sim.seed = unsigned_int(j["seed"], "sim.seed");
  if (j.contains("sampling")) {
    const auto& s = j["sampling"];
    if (s == "deterministic") sim.sampling_mode = SamplingMode::deterministic;
    else if (s == "random") sim.sampling_mode = SamplingMode::random;
    else throw ConfigError("sim.sampling must be 'deterministic' or 'random'");
  }
  if (j.contains("initial_phases")) {
    const auto& p = j["initial_phases"];
    if (p == "random") {
      sim.initial_phase_mode = InitialPhaseMode::random;
    } else if (p.is_array()) {
      sim.initial_phase_mode = InitialPhaseMode::given;
      for (const auto& pop : p) {
        if (!pop.is_array()) throw ConfigError("sim.initial_phases must be lists");
        std::vector<double> phases;
        for (const auto& x : pop) phases.push_back(number(x, "initial phase"));
        sim.initial_phases.push_back(std::move(phases));
      }
    } else {
      throw ConfigError("sim.initial_phases must be 'random' or a list of lists");
    }
  }
}

ScanParams parse_scan(const json& j, const SystemConfig& system) {
  reject_unknown(j, {"v_min", "v_max", "n_points", "im_tolerance", "refine_tolerance"},
                 "scan");
  const auto dists = system.distributions();
  ScanParams scan = ScanParams::default_for(dists);
  if (j.contains("v_min")) scan.v_min = number(j["v_min"], "scan.v_min");
  if (j.contains("v_max")) scan.v_max = number(j["v_max"], "scan.v_max");
  if (j.contains("n_points")) scan.n_points = unsigned_int(j["n_points"], "scan.n_points");
  if (j.contains("im_tolerance")) scan.im_tolerance = number(j["im_tolerance"], "scan.im_tolerance");
  if (j.contains("refine_tolerance"))
    scan.refine_tolerance = number(j["refine_tolerance"], "scan.refine_tolerance");
  try {
    require_valid(scan);
  } catch (const AnalyzerError& e) {
    throw ConfigError(e.what());
  }
  return scan;
}

void parse_verify(const json& j, VerifyOptions& v) {
  reject_unknown(j, {"rel_tolerance", "abs_tolerance", "near_zero", "onset_c",
                     "onset_margin", "onset_sustain"},
                 "verify");
  if (j.contains("rel_tolerance")) v.rel_tolerance = number(j["rel_tolerance"], "verify.rel_tolerance");
  if (j.contains("abs_tolerance")) v.abs_tolerance = number(j["abs_tolerance"], "verify.abs_tolerance");
  if (j.contains("near_zero")) v.near_zero = number(j["near_zero"], "verify.near_zero");
  if (j.contains("onset_c")) v.onset.c = number(j["onset_c"], "verify.onset_c");
  if (j.contains("onset_margin")) v.onset.margin = number(j["onset_margin"], "verify.onset_margin");
  if (j.contains("onset_sustain"))
    v.onset.sustain = unsigned_int(j["onset_sustain"], "verify.onset_sustain");
}

std::vector<double> parse_grid(const json& j) {
  if (j.is_array()) {
    std::vector<double> grid;
    for (const auto& x : j) grid.push_back(number(x, "eta_grid entry"));
    if (grid.empty()) throw ConfigError("eta_grid must not be empty");
    return grid;
  }
  reject_unknown(j, {"min", "max", "step"}, "eta_grid");
  if (!j.contains("min") || !j.contains("max") || !j.contains("step"))
    throw ConfigError("eta_grid needs min, max and step");
  const double lo = number(j["min"], "eta_grid.min");
  const double hi = number(j["max"], "eta_grid.max");
  const double step = number(j["step"], "eta_grid.step");
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("eta_grid needs min <= max and step > 0");
  return eta_range(lo, hi, step);
}

}  // namespace

std::vector<double> eta_range(double min, double max, double step) {
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double e = min + step * static_cast<double>(i);
    if (std::abs(e) < 1e-12 * step) e = 0.0;
    grid.push_back(e);
  }
  return grid;
}

ScanParams RunConfig::scan_or_default() const {
  if (scan) return *scan;
  const auto dists = system.distributions();
  return ScanParams::default_for(dists);
}

RunConfig parse_run_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root, {"populations", "coupling", "sim", "scan", "eta_grid", "verify",
                        "output_dir"},
                 "config");

  RunConfig rc;
  if (!root.contains("populations") || !root["populations"].is_array())
    throw ConfigError("config needs a 'populations' list");
  for (const auto& p : root["populations"]) {
    reject_unknown(p, {"n", "delta", "omega0"}, "population");
    PopulationSpec spec;
    if (p.contains("n")) {
      if (!p["n"].is_number_integer() || p["n"].get<std::int64_t>() < 1)
        throw ConfigError("population n must be a positive integer");
      spec.n = p["n"].get<std::size_t>();
    }
    if (p.contains("delta")) spec.dist.delta = number(p["delta"], "population delta");
    if (p.contains("omega0")) spec.dist.omega0 = number(p["omega0"], "population omega0");
    rc.system.populations.push_back(spec);
  }

  if (!root.contains("coupling")) throw ConfigError("config needs a 'coupling' section");
  const auto& c = root["coupling"];
  reject_unknown(c, {"k", "alpha", "eta"}, "coupling");
  if (!c.contains("k")) throw ConfigError("coupling needs 'k'");
  rc.system.coupling.k = matrix(c["k"], "coupling.k");
  if (c.contains("alpha")) rc.system.coupling.alpha = matrix(c["alpha"], "coupling.alpha");
  if (c.contains("eta")) rc.system.coupling.eta = number(c["eta"], "coupling.eta");
  require_valid(rc.system);

  if (root.contains("sim")) parse_sim(root["sim"], rc.sim);
  require_valid(rc.sim, rc.system);
  if (root.contains("scan")) rc.scan = parse_scan(root["scan"], rc.system);
  if (root.contains("eta_grid")) rc.eta_grid = parse_grid(root["eta_grid"]);
  if (root.contains("verify")) parse_verify(root["verify"], rc.verify);
  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string()) throw ConfigError("output_dir must be a string");
    rc.output_dir = root["output_dir"].get<std::string>();
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string dump_run_config(const RunConfig& rc) {
  json root;
  json pops = json::array();
  for (const auto& p : rc.system.populations)
    pops.push_back({{"n", p.n}, {"delta", p.dist.delta}, {"omega0", p.dist.omega0}});
  root["populations"] = pops;
  root["coupling"] = {{"k", matrix_json(rc.system.coupling.k)},
                      {"alpha", matrix_json(rc.system.coupling.lags())},
                      {"eta", rc.system.coupling.eta}};

  json sim = {{"dt", rc.sim.dt},
              {"t_transient", rc.sim.t_transient},
              {"t_average", rc.sim.t_average},
              {"seed", rc.sim.seed},
              {"sampling", rc.sim.sampling_mode == SamplingMode::deterministic
                               ? "deterministic"
                               : "random"}};
  if (rc.sim.initial_phase_mode == InitialPhaseMode::given)
    sim["initial_phases"] = rc.sim.initial_phases;
  else
    sim["initial_phases"] = "random";
  root["sim"] = sim;

  if (rc.scan)
    root["scan"] = {{"v_min", rc.scan->v_min},
                    {"v_max", rc.scan->v_max},
                    {"n_points", rc.scan->n_points},
                    {"im_tolerance", rc.scan->im_tolerance},
                    {"refine_tolerance", rc.scan->refine_tolerance}};
  if (!rc.eta_grid.empty()) root["eta_grid"] = rc.eta_grid;
  root["verify"] = {{"rel_tolerance", rc.verify.rel_tolerance},
                    {"abs_tolerance", rc.verify.abs_tolerance},
                    {"near_zero", rc.verify.near_zero},
                    {"onset_c", rc.verify.onset.c},
                    {"onset_margin", rc.verify.onset.margin},
                    {"onset_sustain", rc.verify.onset.sustain}};
  root["output_dir"] = rc.output_dir.string();
  return root.dump(2) + "\n";
}

}  // namespace popsync
