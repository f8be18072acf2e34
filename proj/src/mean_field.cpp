#include "mean_field.hpp"

#include <cmath>
#include <numbers>

namespace popsync::detail {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void wrap_phases(std::span<double> x) {
  for (double& v : x) {
    v -= kTwoPi * std::floor(v / kTwoPi);
    if (v >= kTwoPi) v -= kTwoPi;
    if (v < 0.0) v = 0.0;
  }
}

MeanFieldKernel::MeanFieldKernel(const SystemConfig& config,
                                 const std::vector<std::vector<double>>& omegas)
    : coupling_(config.coupling.complex_coupling()) {
  offsets_.push_back(0);
  for (const auto& w : omegas) {
    omega_.insert(omega_.end(), w.begin(), w.end());
    offsets_.push_back(omega_.size());
  }
  const std::size_t n = omega_.size();
  sin_.resize(n);
  cos_.resize(n);
  z_.resize(omegas.size());
  w_.resize(omegas.size());
  z_start_.resize(omegas.size());
  k1_.resize(n);
  k2_.resize(n);
  k3_.resize(n);
  k4_.resize(n);
  tmp_.resize(n);
}

std::vector<double> MeanFieldKernel::flatten(
    const std::vector<std::vector<double>>& per_pop) const {
  std::vector<double> flat;
  flat.reserve(size());
  for (const auto& v : per_pop) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

std::vector<std::vector<double>> MeanFieldKernel::split(
    std::span<const double> flat) const {
  std::vector<std::vector<double>> out(populations());
  for (std::size_t p = 0; p < populations(); ++p)
    out[p].assign(flat.begin() + offsets_[p], flat.begin() + offsets_[p + 1]);
  return out;
}

void MeanFieldKernel::trig(std::span<const double> x) {
  const std::size_t n = x.size();
  const double* xs = x.data();
  double* s = sin_.data();
  double* c = cos_.data();
  // Separate loops: a fused loop becomes sincos, which has no vector variant.
  for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(xs[i]);
  for (std::size_t i = 0; i < n; ++i) c[i] = std::cos(xs[i]);
}

void MeanFieldKernel::phasors(std::span<const double> x, std::span<complex> z) {
  trig(x);
  for (std::size_t p = 0; p < populations(); ++p) {
    double sc = 0.0, ss = 0.0;
    for (std::size_t i = offsets_[p]; i < offsets_[p + 1]; ++i) {
      sc += cos_[i];
      ss += sin_[i];
    }
    const double inv_n = 1.0 / static_cast<double>(offsets_[p + 1] - offsets_[p]);
    z[p] = complex(sc * inv_n, ss * inv_n);
  }
}

void MeanFieldKernel::rates(std::span<const double> x, std::span<double> out) {
  phasors(x, z_);
  const std::size_t m = populations();
  for (std::size_t p = 0; p < m; ++p) {
    complex acc = 0.0;
    for (std::size_t q = 0; q < m; ++q)
      acc += coupling_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) * z_[q];
    w_[p] = acc;
  }
  // Im(W e^{-i x}) = Im(W) cos x - Re(W) sin x
  for (std::size_t p = 0; p < m; ++p) {
    const double wr = w_[p].real(), wi = w_[p].imag();
    const double* s = sin_.data();
    const double* c = cos_.data();
    const double* om = omega_.data();
    double* o = out.data();
    for (std::size_t i = offsets_[p]; i < offsets_[p + 1]; ++i)
      o[i] = om[i] + wi * c[i] - wr * s[i];
  }
}

void MeanFieldKernel::step(std::span<double> x, double dt) {
  const std::size_t n = size();
  const double h2 = 0.5 * dt;

  rates(x, k1_);
  z_start_ = z_;

  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h2 * k1_[i];
  rates(tmp_, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h2 * k2_[i];
  rates(tmp_, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
  rates(tmp_, k4_);

  const double h6 = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i)
    x[i] += h6 * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
  wrap_phases(x);

  z_ = z_start_;
}

}  // namespace popsync::detail
