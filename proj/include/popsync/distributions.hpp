#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "popsync/model.hpp"

namespace popsync {

enum class SamplingMode { deterministic, random };

/// Generator used for every random draw; named in output metadata.
using Engine = std::mt19937_64;
inline constexpr std::string_view kEngineName = "mt19937_64";

/// Uniform draw in the open interval (0, 1) from the top 53 bits of one
/// engine output. Portable, unlike std::uniform_real_distribution.
inline double uniform_open01(Engine& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

/// SplitMix64 finaliser, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

double lorentzian_pdf(const LorentzianSpec& spec, double omega);

double lorentzian_cdf(const LorentzianSpec& spec, double omega);

/// Inverse CDF. Throws std::domain_error unless 0 < p < 1.
double lorentzian_quantile(const LorentzianSpec& spec, double p);

/// Deterministic mode returns the quantiles at p_i = (i - 1/2) / n, which are
/// sorted and symmetric about omega0. Random mode draws i.i.d. inverse-CDF
/// samples from an Engine seeded with `seed`.
std::vector<double> sample_frequencies(const LorentzianSpec& spec,
                                       std::size_t n, SamplingMode mode,
                                       std::uint64_t seed);

/// 1/g(s) = 2 (s + delta + i omega0) for the Lorentzian.
complex g_inverse_lorentzian(const LorentzianSpec& spec, complex s);

}  // namespace popsync
