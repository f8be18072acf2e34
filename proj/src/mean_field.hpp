#pragma once

#include <span>
#include <vector>

#include "popsync/model.hpp"

namespace popsync::detail {

/// Flat-buffer integrator for the mean-field phase equations. Phases of all
/// populations live in one contiguous array; offsets_ marks the boundaries.
class MeanFieldKernel {
 public:
  MeanFieldKernel(const SystemConfig& config,
                  const std::vector<std::vector<double>>& omegas);

  std::size_t size() const { return omega_.size(); }
  std::size_t populations() const { return offsets_.size() - 1; }

  std::vector<double> flatten(const std::vector<std::vector<double>>& per_pop) const;
  std::vector<std::vector<double>> split(std::span<const double> flat) const;

  /// Mean phasors r e^{i psi} of `x`, one per population.
  void phasors(std::span<const double> x, std::span<complex> z);

  /// d x / dt. Leaves the phasors of `x` in last_phasors().
  void rates(std::span<const double> x, std::span<double> out);

  /// RK4 step in place followed by wrapping to [0, 2pi). last_phasors()
  /// afterwards holds the phasors of the state at the start of the step.
  void step(std::span<double> x, double dt);

  std::span<const complex> last_phasors() const { return z_; }

 private:
  void trig(std::span<const double> x);

  std::vector<std::size_t> offsets_;
  std::vector<double> omega_;
  ComplexMatrix coupling_;
  std::vector<double> sin_, cos_;
  std::vector<complex> z_, w_, z_start_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

void wrap_phases(std::span<double> x);

}  // namespace popsync::detail
