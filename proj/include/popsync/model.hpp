#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace popsync {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using complex = std::complex<double>;

/// Cauchy-Lorentz natural-frequency distribution of one population.
struct LorentzianSpec {
  double omega0 = 0.0;  ///< centre frequency
  double delta = 1.0;   ///< half-width at half-maximum, must be > 0
};

struct PopulationSpec {
  std::size_t n = 1;
  LorentzianSpec dist;
};

/// Inter-population coupling. Row index is the receiving population,
/// column index the sending one.
struct CouplingSpec {
  RealMatrix k;
  RealMatrix alpha;  ///< phase lags; empty means all zero
  double eta = 0.0;

  std::size_t dimension() const { return static_cast<std::size_t>(k.rows()); }

  /// alpha with an empty matrix expanded to zeros of the right shape.
  RealMatrix lags() const;

  /// eta * k * exp(-i alpha), elementwise.
  ComplexMatrix complex_coupling() const;

  /// k * exp(-i alpha), i.e. the coupling at eta = 1.
  ComplexMatrix unit_coupling() const;
};

struct SystemConfig {
  std::vector<PopulationSpec> populations;
  CouplingSpec coupling;

  std::size_t size() const { return populations.size(); }
  std::vector<LorentzianSpec> distributions() const;
};

struct OrderParameter {
  double r = 0.0;
  double psi = 0.0;  ///< in [0, 2pi)
};

/// A candidate root eta of the dispersion relation at marginal frequency v.
struct GrowthPoint {
  double v = 0.0;
  complex eta;
};

struct CriticalSolution {
  double eta_star = 0.0;
  double v_star = 0.0;
  int branch_id = 0;
};

struct CriticalSet {
  std::vector<CriticalSolution> solutions;  ///< ascending by eta_star
  std::optional<double> relevant_negative;
  std::optional<double> relevant_positive;
  std::vector<std::string> warnings;

  /// Sorts the solutions and picks the thresholds nearest zero on each side.
  static CriticalSet from_solutions(std::vector<CriticalSolution> solutions);

  bool empty() const { return solutions.empty(); }
  bool is_relevant(const CriticalSolution& s) const;
};

enum class ValidationErrorKind {
  empty_system,
  dimension_mismatch,
  nonpositive_delta,
  nonpositive_count,
  nonfinite_value,
};

struct ValidationError {
  ValidationErrorKind kind;
  std::string message;
};

/// Returns the first violated invariant, or nothing when the config is valid.
std::optional<ValidationError> validate(const SystemConfig& config);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError carrying the validate() message.
void require_valid(const SystemConfig& config);

}  // namespace popsync
