#include "popsync/analysis.hpp"

#include <cmath>
#include <sstream>

namespace popsync {

bool has_identical_pair(const SystemConfig& system) {
  if (system.size() != 2) return false;
  const auto& a = system.populations[0].dist;
  const auto& b = system.populations[1].dist;
  return a.delta == b.delta && a.omega0 == b.omega0;
}

AnalysisOutcome analyze_system(const SystemConfig& system, const ScanParams& scan) {
  require_valid(system);
  const auto dists = system.distributions();
  const RealMatrix alpha = system.coupling.lags();
  CriticalSet scanned = find_critical_couplings(system.coupling.k, alpha, dists, scan);

  AnalysisOutcome outcome;
  if (!has_identical_pair(system) || !alpha.isZero(0.0)) {
    outcome.critical = std::move(scanned);
    return outcome;
  }

  const Eigen::Matrix2d k = system.coupling.k;
  outcome.critical = identical_critical(
      IdenticalCaseInput::from(k, dists[0].delta, dists[0].omega0));
  outcome.closed_form = true;

  bool agree = scanned.solutions.size() == outcome.critical.solutions.size();
  for (std::size_t i = 0; agree && i < scanned.solutions.size(); ++i) {
    const double a = scanned.solutions[i].eta_star;
    const double b = outcome.critical.solutions[i].eta_star;
    agree = std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b));
  }
  outcome.cross_checked = agree;
  if (!agree) {
    std::ostringstream msg;
    msg << "scan found " << scanned.solutions.size()
        << " critical couplings where the closed form gives "
        << outcome.critical.solutions.size() << " (or values differ)";
    outcome.critical.warnings.push_back(msg.str());
  }
  for (auto& w : scanned.warnings) outcome.critical.warnings.push_back(std::move(w));
  return outcome;
}

}  // namespace popsync
