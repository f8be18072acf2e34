#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "popsync/distributions.hpp"
#include "popsync/model.hpp"

namespace popsync {

enum class InitialPhaseMode { random, given };

struct SimParams {
  double dt = 0.02;
  double t_transient = 200.0;
  double t_average = 200.0;
  std::uint64_t seed = 1;
  SamplingMode sampling_mode = SamplingMode::deterministic;
  InitialPhaseMode initial_phase_mode = InitialPhaseMode::random;
  /// Per-population starting phases, used when initial_phase_mode is given.
  std::vector<std::vector<double>> initial_phases;

  std::size_t transient_steps() const;
  std::size_t average_steps() const;
};

/// Throws ConfigError when dt, the time windows or given phases are unusable.
void require_valid(const SimParams& params, const SystemConfig& config);

/// Phases and natural frequencies, one array per population.
struct EnsembleState {
  std::vector<std::vector<double>> phases;
  std::vector<std::vector<double>> omegas;
  double t = 0.0;
};

/// r e^{i psi} = mean of e^{i phase}, per population.
std::vector<OrderParameter> compute_order_parameters(const EnsembleState& state);

/// Right-hand side of the phase equations in mean-field form:
///   d phase_i / dt = omega_i + sum_s' eta k_ss' r_s' sin(psi_s' - phase_i - alpha_ss').
std::vector<std::vector<double>> derivative(const EnsembleState& state,
                                            const SystemConfig& config);

/// One classical RK4 step; phases are wrapped back into [0, 2pi).
/// Throws std::invalid_argument unless dt > 0.
EnsembleState step_rk4(const EnsembleState& state, const SystemConfig& config,
                       double dt);

/// Frequencies for every population under the seed policy of `params`.
std::vector<std::vector<double>> sample_system_frequencies(
    const SystemConfig& config, const SimParams& params);

/// Starting state for a trial: given phases, or i.i.d. uniform phases drawn
/// from `phase_seed`.
EnsembleState initial_state(const SystemConfig& config, const SimParams& params,
                            std::vector<std::vector<double>> omegas,
                            std::uint64_t phase_seed);

struct TrialResult {
  std::vector<double> r_mean;
  std::vector<double> r_std;
};

/// Integrates t_transient, then averages r per population over t_average,
/// sampling once per step.
TrialResult run_trial(const SystemConfig& config, const SimParams& params);

/// Same, starting from a prepared state (frequencies already drawn).
TrialResult run_trial(const SystemConfig& config, const SimParams& params,
                      EnsembleState state);

struct SweepMetadata {
  std::uint64_t seed = 0;
  double dt = 0.0;
  double t_transient = 0.0;
  double t_average = 0.0;
  std::vector<std::size_t> n;
  std::string sampling_mode;
  std::string initial_phase_mode;
  std::string engine;
};

struct SweepResult {
  std::vector<double> eta_values;
  std::vector<std::vector<double>> r_mean;  ///< [population][eta]
  std::vector<std::vector<double>> r_std;   ///< [population][eta]
  SweepMetadata metadata;
};

/// One trial per eta. Frequencies are drawn once per sweep; every trial gets
/// its own initial phases derived from the seed and the grid index, so the
/// result does not depend on `threads` (0 = hardware concurrency).
SweepResult sweep_eta(const SystemConfig& config_template,
                      const std::vector<double>& eta_grid,
                      const SimParams& params, unsigned threads = 0);

struct OnsetOptions {
  double c = 2.0;
  double margin = 0.05;
  /// Consecutive grid points that must stay above threshold; a run cut short
  /// by the end of the grid still counts.
  std::size_t sustain = 2;
};

/// r_c = c / sqrt(n) + margin.
double onset_threshold(std::size_t n, const OnsetOptions& options);

/// Scans outward from eta = 0 in each direction and reports where the
/// time-averaged r first rises above the threshold, interpolating linearly
/// between grid points. Negative-side onset (if any) comes first.
/// Throws std::invalid_argument on an empty result or bad population index.
std::vector<double> detect_onset(const SweepResult& result,
                                 std::size_t population,
                                 const OnsetOptions& options = {});

}  // namespace popsync
