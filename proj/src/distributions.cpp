#include "popsync/distributions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace popsync {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double lorentzian_pdf(const LorentzianSpec& spec, double omega) {
  const double x = omega - spec.omega0;
  return spec.delta / std::numbers::pi / (x * x + spec.delta * spec.delta);
}

double lorentzian_cdf(const LorentzianSpec& spec, double omega) {
  return 0.5 + std::atan((omega - spec.omega0) / spec.delta) / std::numbers::pi;
}

double lorentzian_quantile(const LorentzianSpec& spec, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("quantile probability must lie in (0, 1)");
  return spec.omega0 + spec.delta * std::tan(std::numbers::pi * (p - 0.5));
}

std::vector<double> sample_frequencies(const LorentzianSpec& spec,
                                       std::size_t n, SamplingMode mode,
                                       std::uint64_t seed) {
  std::vector<double> out(n);
  if (mode == SamplingMode::deterministic) {
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Mirror the lower half so the sample is exactly symmetric about omega0.
      const std::size_t j = n - 1 - i;
      if (j < i) {
        out[i] = 2.0 * spec.omega0 - out[j];
        continue;
      }
      out[i] = lorentzian_quantile(spec, (static_cast<double>(i) + 0.5) / nd);
    }
    if (n % 2 == 1) out[n / 2] = spec.omega0;
    return out;
  }
  Engine engine(seed);
  for (auto& w : out) w = lorentzian_quantile(spec, uniform_open01(engine));
  return out;
}

complex g_inverse_lorentzian(const LorentzianSpec& spec, complex s) {
  return 2.0 * (s + complex(spec.delta, spec.omega0));
}

}  // namespace popsync
