#pragma once

#include "popsync/analyzer.hpp"
#include "popsync/config.hpp"

namespace popsync {

struct AnalysisOutcome {
  CriticalSet critical;
  bool closed_form = false;   ///< identical two-population table was used
  bool cross_checked = false; ///< scan agreed with the closed form
};

/// True for two populations sharing one distribution.
bool has_identical_pair(const SystemConfig& system);

/// Critical couplings for a run configuration. Two identical populations
/// with zero phase lags use the closed form, with the scan run alongside as a
/// cross-check (disagreement becomes a warning); everything else is scanned.
AnalysisOutcome analyze_system(const SystemConfig& system, const ScanParams& scan);

}  // namespace popsync
