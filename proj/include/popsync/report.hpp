#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "popsync/config.hpp"
#include "popsync/model.hpp"
#include "popsync/simulator.hpp"

namespace popsync {

/// Shortest decimal that parses back to the same double.
std::string format_number(double x);

struct CriticalRow {
  double eta_star = 0.0;
  double v_star = 0.0;
  int branch_id = 0;
  double residual = 0.0;  ///< |det| / residual_scale at (eta*, v*)
  bool is_relevant = false;
};

std::vector<CriticalRow> critical_rows(const CriticalSet& set,
                                       const SystemConfig& system);

/// Columns: eta_star,v_star,branch_id,residual,is_relevant
void write_critical_csv(const std::filesystem::path& path,
                        const std::vector<CriticalRow>& rows);
std::vector<CriticalRow> read_critical_csv(const std::filesystem::path& path);

/// Rebuilds the solution list and relevant thresholds from CSV rows.
CriticalSet critical_set_from_rows(const std::vector<CriticalRow>& rows);

/// Columns: eta,r_mean_1..M,r_std_1..M, preceded by '#'-prefixed metadata.
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);
SweepResult read_sweep_csv(const std::filesystem::path& path);

struct VerifyRow {
  std::string side;  ///< "negative" or "positive"
  std::optional<double> predicted;
  std::optional<double> detected;
  double tolerance = 0.0;
  bool matched = false;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  bool passed = false;
  bool vacuous = false;  ///< no predictions and no onsets
};

/// Pairs each relevant threshold with the nearest onset detected on the same
/// side of zero. An onset on a side with no prediction is a mismatch.
VerifyReport compare_onsets(const CriticalSet& predicted, const SweepResult& sweep,
                            const VerifyOptions& options);

/// Columns: side,predicted_eta,detected_eta,abs_error,rel_error,tolerance,matched
void write_verify_csv(const std::filesystem::path& path, const VerifyReport& report);

}  // namespace popsync
