#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "popsync/analyzer.hpp"
#include "popsync/model.hpp"
#include "popsync/simulator.hpp"

namespace popsync {

/// Tolerances used by `verify` when pairing predictions with onsets.
struct VerifyOptions {
  double rel_tolerance = 0.10;
  double abs_tolerance = 0.5;
  double near_zero = 1.0;  ///< |eta*| below this uses abs_tolerance
  OnsetOptions onset;
};

/// Everything one CLI invocation needs, read from a JSON file:
///
///   {
///     "populations": [{"n": 2000, "delta": 1.0, "omega0": 2.0}, ...],
///     "coupling": {"k": [[1, -1], [1, 0]], "alpha": [[0, 0], [0, 0]], "eta": 0},
///     "sim": {"dt": 0.02, "t_transient": 200, "t_average": 200, "seed": 1,
///             "sampling": "deterministic", "initial_phases": "random"},
///     "scan": {"v_min": -22, "v_max": 18, "n_points": 4001,
///              "im_tolerance": 1e-8, "refine_tolerance": 1e-10},
///     "eta_grid": {"min": 0, "max": 8, "step": 0.25},
///     "verify": {"rel_tolerance": 0.1, "abs_tolerance": 0.5, "near_zero": 1.0,
///                "onset_c": 2.0, "onset_margin": 0.05, "onset_sustain": 2},
///     "output_dir": "out"
///   }
///
/// Only "populations" and "coupling.k" are required. Rows of k are receiving
/// populations. "eta_grid" may also be an explicit list, and
/// "sim.initial_phases" may be a list of per-population phase lists. Unknown
/// keys are rejected.
struct RunConfig {
  SystemConfig system;
  SimParams sim;
  std::optional<ScanParams> scan;  ///< absent: ScanParams::default_for
  std::vector<double> eta_grid;
  VerifyOptions verify;
  std::filesystem::path output_dir = ".";

  ScanParams scan_or_default() const;
};

/// Throws ConfigError on malformed JSON, unknown keys or invalid values.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Serialises every field, including defaults, so parse(dump(c)) == c.
std::string dump_run_config(const RunConfig& config);

/// Expands {min, max, step}; the endpoint is included when it lies on the grid.
std::vector<double> eta_range(double min, double max, double step);

}  // namespace popsync
