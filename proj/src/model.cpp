#include "popsync/model.hpp"

#include <algorithm>
#include <cmath>

namespace popsync {

RealMatrix CouplingSpec::lags() const {
  if (alpha.size() == 0) return RealMatrix::Zero(k.rows(), k.cols());
  return alpha;
}

ComplexMatrix CouplingSpec::unit_coupling() const {
  const RealMatrix a = lags();
  ComplexMatrix out(k.rows(), k.cols());
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      // std::polar keeps the alpha == 0 case exactly real.
      out(i, j) = a(i, j) == 0.0 ? complex(k(i, j), 0.0)
                                 : k(i, j) * std::polar(1.0, -a(i, j));
    }
  }
  return out;
}

ComplexMatrix CouplingSpec::complex_coupling() const {
  return unit_coupling() * eta;
}

std::vector<LorentzianSpec> SystemConfig::distributions() const {
  std::vector<LorentzianSpec> out;
  out.reserve(populations.size());
  for (const auto& p : populations) out.push_back(p.dist);
  return out;
}

CriticalSet CriticalSet::from_solutions(std::vector<CriticalSolution> solutions) {
  CriticalSet set;
  std::sort(solutions.begin(), solutions.end(),
            [](const CriticalSolution& a, const CriticalSolution& b) {
              return a.eta_star < b.eta_star;
            });
  set.solutions = std::move(solutions);
  for (const auto& s : set.solutions) {
    if (s.eta_star > 0.0) {
      if (!set.relevant_positive || s.eta_star < *set.relevant_positive)
        set.relevant_positive = s.eta_star;
    } else if (s.eta_star < 0.0) {
      if (!set.relevant_negative || s.eta_star > *set.relevant_negative)
        set.relevant_negative = s.eta_star;
    }
  }
  return set;
}

bool CriticalSet::is_relevant(const CriticalSolution& s) const {
  return (relevant_positive && s.eta_star == *relevant_positive) ||
         (relevant_negative && s.eta_star == *relevant_negative);
}

namespace {

bool all_finite(const RealMatrix& m) { return m.allFinite(); }

}  // namespace

std::optional<ValidationError> validate(const SystemConfig& config) {
  const auto& c = config.coupling;
  if (config.populations.empty())
    return ValidationError{ValidationErrorKind::empty_system,
                           "system has no populations"};
  if (c.k.rows() != c.k.cols())
    return ValidationError{ValidationErrorKind::dimension_mismatch,
                           "coupling matrix k is not square"};
  if (c.alpha.size() != 0 &&
      (c.alpha.rows() != c.k.rows() || c.alpha.cols() != c.k.cols()))
    return ValidationError{ValidationErrorKind::dimension_mismatch,
                           "phase-lag matrix alpha does not match k"};
  if (c.dimension() != config.populations.size())
    return ValidationError{
        ValidationErrorKind::dimension_mismatch,
        "coupling dimension " + std::to_string(c.dimension()) +
            " does not match " + std::to_string(config.populations.size()) +
            " populations"};
  for (std::size_t i = 0; i < config.populations.size(); ++i) {
    const auto& p = config.populations[i];
    const std::string where = "population " + std::to_string(i + 1);
    if (p.n < 1)
      return ValidationError{ValidationErrorKind::nonpositive_count,
                             where + ": oscillator count must be >= 1"};
    if (!std::isfinite(p.dist.omega0) || !std::isfinite(p.dist.delta))
      return ValidationError{ValidationErrorKind::nonfinite_value,
                             where + ": distribution parameters must be finite"};
    if (!(p.dist.delta > 0.0))
      return ValidationError{ValidationErrorKind::nonpositive_delta,
                             where + ": delta must be positive"};
  }
  if (!all_finite(c.k) || !all_finite(c.lags()) || !std::isfinite(c.eta))
    return ValidationError{ValidationErrorKind::nonfinite_value,
                           "coupling contains non-finite values"};
  return std::nullopt;
}

void require_valid(const SystemConfig& config) {
  if (auto err = validate(config)) throw ConfigError(err->message);
}

}  // namespace popsync
