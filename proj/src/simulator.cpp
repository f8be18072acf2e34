#include "popsync/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>

#include "mean_field.hpp"

namespace popsync {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kPhaseStream = 0x70686173;  // "phas"

std::size_t steps_for(double duration, double dt) {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

}  // namespace

std::size_t SimParams::transient_steps() const {
  return steps_for(t_transient, dt);
}

std::size_t SimParams::average_steps() const {
  return steps_for(t_average, dt);
}

void require_valid(const SimParams& params, const SystemConfig& config) {
  if (!(params.dt > 0.0) || !std::isfinite(params.dt))
    throw ConfigError("dt must be positive");
  if (!(params.t_transient >= 0.0))
    throw ConfigError("t_transient must be non-negative");
  if (!(params.t_average > 0.0))
    throw ConfigError("t_average must be positive");
  if (params.t_average < 10.0 * params.dt * (1.0 - 1e-12))
    throw ConfigError("t_average must cover at least 10 steps");
  if (params.initial_phase_mode == InitialPhaseMode::given) {
    if (params.initial_phases.size() != config.size())
      throw ConfigError("given initial phases must list every population");
    for (std::size_t p = 0; p < config.size(); ++p)
      if (params.initial_phases[p].size() != config.populations[p].n)
        throw ConfigError("given initial phases for population " +
                          std::to_string(p + 1) + " have the wrong length");
  }
}

std::vector<OrderParameter> compute_order_parameters(const EnsembleState& state) {
  std::vector<OrderParameter> out;
  out.reserve(state.phases.size());
  for (const auto& phases : state.phases) {
    double sc = 0.0, ss = 0.0;
    for (double x : phases) {
      sc += std::cos(x);
      ss += std::sin(x);
    }
    const double n = static_cast<double>(phases.size());
    const complex z(sc / n, ss / n);
    double psi = std::arg(z);
    if (psi < 0.0) psi += kTwoPi;
    if (psi >= kTwoPi) psi = 0.0;
    out.push_back({std::min(1.0, std::abs(z)), psi});
  }
  return out;
}

std::vector<std::vector<double>> derivative(const EnsembleState& state,
                                            const SystemConfig& config) {
  detail::MeanFieldKernel kernel(config, state.omegas);
  const auto x = kernel.flatten(state.phases);
  std::vector<double> out(x.size());
  kernel.rates(x, out);
  return kernel.split(out);
}

EnsembleState step_rk4(const EnsembleState& state, const SystemConfig& config,
                       double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4 requires dt > 0");
  detail::MeanFieldKernel kernel(config, state.omegas);
  auto x = kernel.flatten(state.phases);
  kernel.step(x, dt);
  EnsembleState next;
  next.phases = kernel.split(x);
  next.omegas = state.omegas;
  next.t = state.t + dt;
  return next;
}

std::vector<std::vector<double>> sample_system_frequencies(
    const SystemConfig& config, const SimParams& params) {
  std::vector<std::vector<double>> omegas;
  omegas.reserve(config.size());
  for (std::size_t p = 0; p < config.size(); ++p) {
    const auto& pop = config.populations[p];
    omegas.push_back(sample_frequencies(pop.dist, pop.n, params.sampling_mode,
                                        mix_seed(params.seed, p)));
  }
  return omegas;
}

EnsembleState initial_state(const SystemConfig& config, const SimParams& params,
                            std::vector<std::vector<double>> omegas,
                            std::uint64_t phase_seed) {
  EnsembleState state;
  state.omegas = std::move(omegas);
  if (params.initial_phase_mode == InitialPhaseMode::given) {
    state.phases = params.initial_phases;
    for (auto& p : state.phases) detail::wrap_phases(p);
    return state;
  }
  Engine engine(phase_seed);
  state.phases.resize(config.size());
  for (std::size_t p = 0; p < config.size(); ++p) {
    state.phases[p].resize(config.populations[p].n);
    for (double& x : state.phases[p]) x = kTwoPi * uniform_open01(engine);
    detail::wrap_phases(state.phases[p]);
  }
  return state;
}

TrialResult run_trial(const SystemConfig& config, const SimParams& params,
                      EnsembleState state) {
  require_valid(config);
  require_valid(params, config);

  detail::MeanFieldKernel kernel(config, state.omegas);
  auto x = kernel.flatten(state.phases);
  const std::size_t m = config.size();

  for (std::size_t s = 0; s < params.transient_steps(); ++s) kernel.step(x, params.dt);

  // Sample r at the start of every averaging step; Welford for the spread.
  std::vector<double> mean(m, 0.0), m2(m, 0.0);
  const std::size_t samples = params.average_steps();
  for (std::size_t s = 0; s < samples; ++s) {
    kernel.step(x, params.dt);
    const auto z = kernel.last_phasors();
    const double count = static_cast<double>(s + 1);
    for (std::size_t p = 0; p < m; ++p) {
      const double r = std::min(1.0, std::abs(z[p]));
      const double d = r - mean[p];
      mean[p] += d / count;
      m2[p] += d * (r - mean[p]);
    }
  }
  TrialResult result;
  result.r_mean = mean;
  result.r_std.resize(m);
  for (std::size_t p = 0; p < m; ++p)
    result.r_std[p] = std::sqrt(std::max(0.0, m2[p] / static_cast<double>(samples)));
  return result;
}

TrialResult run_trial(const SystemConfig& config, const SimParams& params) {
  require_valid(config);
  require_valid(params, config);
  auto omegas = sample_system_frequencies(config, params);
  return run_trial(config, params,
                   initial_state(config, params, std::move(omegas),
                                 mix_seed(params.seed, kPhaseStream)));
}

SweepResult sweep_eta(const SystemConfig& config_template,
                      const std::vector<double>& eta_grid,
                      const SimParams& params, unsigned threads) {
  require_valid(config_template);
  require_valid(params, config_template);
  if (eta_grid.empty()) throw std::invalid_argument("eta grid is empty");
  for (double e : eta_grid)
    if (!std::isfinite(e)) throw std::invalid_argument("eta grid must be finite");

  const std::size_t m = config_template.size();
  const std::size_t count = eta_grid.size();
  const auto omegas = sample_system_frequencies(config_template, params);
  const std::uint64_t phase_base = mix_seed(params.seed, kPhaseStream);

  std::vector<TrialResult> trials(count);
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      for (std::size_t j = next++; j < count; j = next++) {
        SystemConfig config = config_template;
        config.coupling.eta = eta_grid[j];
        trials[j] = run_trial(config, params,
                              initial_state(config, params, omegas,
                                            mix_seed(phase_base, j)));
      }
    } catch (...) {
      next = count;
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.eta_values = eta_grid;
  result.r_mean.assign(m, std::vector<double>(count));
  result.r_std.assign(m, std::vector<double>(count));
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t p = 0; p < m; ++p) {
      result.r_mean[p][j] = trials[j].r_mean[p];
      result.r_std[p][j] = trials[j].r_std[p];
    }

  auto& md = result.metadata;
  md.seed = params.seed;
  md.dt = params.dt;
  md.t_transient = params.t_transient;
  md.t_average = params.t_average;
  for (const auto& p : config_template.populations) md.n.push_back(p.n);
  md.sampling_mode =
      params.sampling_mode == SamplingMode::deterministic ? "deterministic" : "random";
  md.initial_phase_mode =
      params.initial_phase_mode == InitialPhaseMode::random ? "random" : "given";
  md.engine = std::string(kEngineName);
  return result;
}

double onset_threshold(std::size_t n, const OnsetOptions& options) {
  return options.c / std::sqrt(static_cast<double>(n)) + options.margin;
}

std::vector<double> detect_onset(const SweepResult& result,
                                 std::size_t population,
                                 const OnsetOptions& options) {
  if (result.eta_values.empty()) throw std::invalid_argument("empty sweep result");
  if (population >= result.r_mean.size() || population >= result.metadata.n.size())
    throw std::invalid_argument("population index out of range");

  const auto& etas = result.eta_values;
  const auto& r = result.r_mean[population];
  const double threshold = onset_threshold(result.metadata.n[population], options);

  // Grid indices sorted by eta, split at zero.
  std::vector<std::size_t> order(etas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return etas[a] < etas[b]; });
  std::vector<std::size_t> positive, negative;
  for (std::size_t i : order)
    if (etas[i] >= 0.0) positive.push_back(i);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (etas[*it] <= 0.0) negative.push_back(*it);

  auto scan = [&](const std::vector<std::size_t>& path) -> std::optional<double> {
    const std::size_t sustain = std::max<std::size_t>(1, options.sustain);
    for (std::size_t a = 0; a < path.size(); ++a) {
      if (r[path[a]] <= threshold) continue;
      bool sustained = true;
      for (std::size_t b = a + 1; b < std::min(path.size(), a + sustain); ++b)
        if (r[path[b]] <= threshold) sustained = false;
      if (!sustained) continue;
      const double e1 = etas[path[a]];
      if (a == 0) return e1;
      const double e0 = etas[path[a - 1]];
      const double r0 = r[path[a - 1]], r1 = r[path[a]];
      return e0 + (threshold - r0) / (r1 - r0) * (e1 - e0);
    }
    return std::nullopt;
  };

  std::vector<double> onsets;
  if (auto e = scan(negative); e && *e < 0.0) onsets.push_back(*e);
  if (auto e = scan(positive); e && *e > 0.0) onsets.push_back(*e);
  return onsets;
}

}  // namespace popsync
