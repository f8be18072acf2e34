#include "popsync/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace popsync {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_zero(double x, double scale) {
  return std::abs(x) <= 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

ComplexMatrix unit_coupling(const RealMatrix& k, const RealMatrix& alpha) {
  CouplingSpec c{k, alpha, 1.0};
  return c.unit_coupling();
}

void check_dims(const RealMatrix& k, std::span<const LorentzianSpec> dists) {
  if (k.rows() != k.cols() || static_cast<std::size_t>(k.rows()) != dists.size())
    throw AnalyzerError("coupling matrix does not match the number of populations");
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

IdenticalCaseInput IdenticalCaseInput::from(const Eigen::Matrix2d& k,
                                            double delta, double omega0) {
  IdenticalCaseInput in;
  in.k = k;
  in.delta = delta;
  in.omega0 = omega0;
  in.trace_T = k.trace();
  in.det_D = k(0, 0) * k(1, 1) - k(0, 1) * k(1, 0);
  return in;
}

ScanParams ScanParams::default_for(std::span<const LorentzianSpec> dists) {
  ScanParams scan;
  if (dists.empty()) return scan;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double width = 0.0;
  for (const auto& d : dists) {
    lo = std::min(lo, -d.omega0);
    hi = std::max(hi, -d.omega0);
    width = std::max(width, d.delta);
  }
  scan.v_min = lo - 20.0 * width;
  scan.v_max = hi + 20.0 * width;
  return scan;
}

void require_valid(const ScanParams& scan) {
  if (!(scan.v_min < scan.v_max) || !std::isfinite(scan.v_min) ||
      !std::isfinite(scan.v_max))
    throw AnalyzerError("scan window requires v_min < v_max");
  if (scan.n_points < 3) throw AnalyzerError("scan needs at least 3 points");
  if (!(scan.im_tolerance > 0.0) || !(scan.refine_tolerance > 0.0))
    throw AnalyzerError("scan tolerances must be positive");
}

CriticalSet identical_critical(const IdenticalCaseInput& input) {
  const double T = input.trace_T;
  const double D = input.det_D;
  const double delta = input.delta;
  const double v0 = -input.omega0;
  const double scale = std::max(1.0, input.k.cwiseAbs().maxCoeff());

  std::vector<CriticalSolution> out;
  if (is_zero(T, scale)) {
    if (D < 0.0 && !is_zero(D, scale * scale)) {
      const double eta = 2.0 * delta / std::sqrt(-D);
      out.push_back({-eta, v0, 0});
      out.push_back({eta, v0, 1});
    }
  } else if (is_zero(D, scale * scale)) {
    out.push_back({2.0 * delta / T, v0, 0});
  } else if (T * T > 4.0 * D) {
    const double root = std::sqrt(T * T - 4.0 * D);
    out.push_back({delta * (T - root) / D, v0, 0});
    out.push_back({delta * (T + root) / D, v0, 1});
  } else {
    const double shift = std::abs(delta / T) * std::sqrt(std::max(0.0, 4.0 * D - T * T));
    out.push_back({4.0 * delta / T, v0 - shift, 0});
  }
  return CriticalSet::from_solutions(std::move(out));
}

complex marginal_inverse_g(const LorentzianSpec& dist, double v) {
  return 2.0 * complex(dist.delta, v + dist.omega0);
}

std::vector<complex> dispersion_roots_at(const ComplexMatrix& kbar,
                                         std::span<const LorentzianSpec> dists,
                                         double v) {
  const auto m = static_cast<Eigen::Index>(dists.size());
  if (kbar.rows() != m || kbar.cols() != m)
    throw AnalyzerError("coupling matrix does not match the number of populations");

  ComplexMatrix scaled(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    scaled.row(i) = kbar.row(i) / marginal_inverse_g(dists[static_cast<std::size_t>(i)], v);

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(scaled, false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigen-solver failed at v = " << v;
    throw AnalyzerError(msg.str());
  }
  const double norm = scaled.norm();
  std::vector<complex> roots;
  for (Eigen::Index i = 0; i < m; ++i) {
    const complex mu = solver.eigenvalues()(i);
    if (std::abs(mu) <= 1e3 * std::numeric_limits<double>::epsilon() * norm) continue;
    roots.push_back(1.0 / mu);
  }
  std::sort(roots.begin(), roots.end(), [](complex a, complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return roots;
}

std::vector<complex> two_pop_quadratic_roots(const Eigen::Matrix2d& k,
                                             const LorentzianSpec& first,
                                             const LorentzianSpec& second,
                                             double v) {
  const complex a(first.delta, v + first.omega0);
  const complex b(second.delta, v + second.omega0);
  const double D = k(0, 0) * k(1, 1) - k(0, 1) * k(1, 0);
  const complex lin = -2.0 * (b * k(0, 0) + a * k(1, 1));
  const complex c0 = 4.0 * a * b;

  if (D == 0.0) {
    if (lin == 0.0) return {};
    return {-c0 / lin};
  }
  // Citardauq form: q = -(B + s sqrt(B^2 - 4AC)) / 2 with the sign chosen so
  // that no cancellation occurs; roots q/A and C/q.
  const complex disc = std::sqrt(lin * lin - 4.0 * D * c0);
  const double s = (std::conj(lin) * disc).real() >= 0.0 ? 1.0 : -1.0;
  const complex q = -0.5 * (lin + s * disc);
  std::vector<complex> roots{q / D, c0 / q};
  std::sort(roots.begin(), roots.end(), [](complex x, complex y) {
    return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
  });
  return roots;
}

std::vector<std::size_t> match_roots(std::span<const complex> prev,
                                     std::span<const complex> next) {
  std::vector<std::size_t> perm(prev.size(), npos);
  if (prev.size() == next.size() && prev.size() <= 4) {
    std::vector<std::size_t> trial(next.size());
    std::iota(trial.begin(), trial.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (std::size_t b = 0; b < prev.size(); ++b)
        cost += std::abs(next[trial[b]] - prev[b]);
      if (cost < best) {
        best = cost;
        perm = trial;
      }
    } while (std::next_permutation(trial.begin(), trial.end()));
    return perm;
  }

  // Greedy: repeatedly take the globally closest unpaired (prev, next) pair.
  std::vector<bool> used(next.size(), false);
  const std::size_t pairs = std::min(prev.size(), next.size());
  for (std::size_t round = 0; round < pairs; ++round) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = npos, bj = npos;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      if (perm[i] != npos || std::isnan(prev[i].real())) continue;
      for (std::size_t j = 0; j < next.size(); ++j) {
        if (used[j]) continue;
        const double d = std::abs(next[j] - prev[i]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == npos) break;
    perm[bi] = bj;
    used[bj] = true;
  }
  return perm;
}

BranchSet build_branches(const RealMatrix& k, const RealMatrix& alpha,
                         std::span<const LorentzianSpec> dists,
                         const ScanParams& scan) {
  require_valid(scan);
  check_dims(k, dists);
  const ComplexMatrix kbar = unit_coupling(k, alpha);

  BranchSet set;
  set.v_grid.resize(scan.n_points);
  const double h = scan.spacing();
  for (std::size_t i = 0; i < scan.n_points; ++i)
    set.v_grid[i] = i + 1 == scan.n_points ? scan.v_max
                                           : scan.v_min + h * static_cast<double>(i);

  std::vector<std::vector<complex>> columns(scan.n_points);
  for (std::size_t i = 0; i < scan.n_points; ++i)
    columns[i] = dispersion_roots_at(kbar, dists, set.v_grid[i]);

  const std::size_t branches = columns.front().size();
  set.roots = ComplexMatrix::Constant(static_cast<Eigen::Index>(branches),
                                      static_cast<Eigen::Index>(scan.n_points),
                                      complex(kNaN, kNaN));
  std::vector<complex> last(columns.front());
  for (std::size_t b = 0; b < branches; ++b) set.roots(static_cast<Eigen::Index>(b), 0) = last[b];

  for (std::size_t i = 1; i < scan.n_points; ++i) {
    const auto& col = columns[i];
    if (col.size() != branches)
      set.defects.push_back({i, set.v_grid[i], branches, col.size()});
    const auto perm = match_roots(last, col);
    for (std::size_t b = 0; b < branches; ++b) {
      if (perm[b] == npos) continue;
      last[b] = col[perm[b]];
      set.roots(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) = last[b];
    }
  }
  return set;
}

namespace {

struct Refined {
  double v;
  complex eta;
};

// Bisection on v for a sign change of Im(eta) along one branch. `left` holds
// every branch value at v_left in branch order.
Refined refine_crossing(const ComplexMatrix& kbar,
                        std::span<const LorentzianSpec> dists,
                        std::size_t branch, double v_left, double v_right,
                        std::vector<complex> left, double tolerance) {
  auto branch_value = [&](double v, std::vector<complex>& paired) {
    const auto roots = dispersion_roots_at(kbar, dists, v);
    const auto perm = match_roots(left, roots);
    paired = left;
    for (std::size_t b = 0; b < left.size(); ++b)
      if (perm[b] != npos) paired[b] = roots[perm[b]];
    return perm[branch] == npos ? complex(kNaN, kNaN) : paired[branch];
  };

  const int left_sign = sign_of(left[branch].imag());
  std::vector<complex> paired;
  for (int iter = 0; iter < 200 && v_right - v_left > tolerance; ++iter) {
    const double mid = 0.5 * (v_left + v_right);
    const complex eta = branch_value(mid, paired);
    if (std::isnan(eta.real())) break;
    const int s = sign_of(eta.imag());
    if (s == 0) return {mid, eta};
    if (s == left_sign) {
      v_left = mid;
      left = paired;
    } else {
      v_right = mid;
    }
  }
  const double mid = 0.5 * (v_left + v_right);
  return {mid, branch_value(mid, paired)};
}

}  // namespace

CriticalSet find_critical_couplings(const RealMatrix& k, const RealMatrix& alpha,
                                    std::span<const LorentzianSpec> dists,
                                    const ScanParams& scan) {
  const BranchSet set = build_branches(k, alpha, dists, scan);
  const ComplexMatrix kbar = unit_coupling(k, alpha);
  const std::size_t n = set.v_grid.size();
  const auto nb = static_cast<Eigen::Index>(set.branches());

  std::vector<CriticalSolution> found;
  auto accept = [&](std::size_t branch, double v, complex eta) {
    if (std::isnan(eta.real())) return;
    if (std::abs(eta.imag()) < scan.im_tolerance * std::max(1.0, std::abs(eta)))
      found.push_back({eta.real(), v, static_cast<int>(branch)});
  };

  for (Eigen::Index b = 0; b < nb; ++b) {
    const auto bi = static_cast<std::size_t>(b);
    for (std::size_t i = 0; i < n; ++i) {
      const complex here = set.roots(b, static_cast<Eigen::Index>(i));
      if (std::isnan(here.real())) continue;
      if (here.imag() == 0.0) {
        accept(bi, set.v_grid[i], here);
        continue;
      }
      if (i + 1 == n) break;
      const complex there = set.roots(b, static_cast<Eigen::Index>(i + 1));
      if (std::isnan(there.real()) || there.imag() == 0.0) continue;
      if (sign_of(here.imag()) == sign_of(there.imag())) continue;

      std::vector<complex> left(set.branches());
      for (Eigen::Index c = 0; c < nb; ++c)
        left[static_cast<std::size_t>(c)] = set.roots(c, static_cast<Eigen::Index>(i));
      const Refined r = refine_crossing(kbar, dists, bi, set.v_grid[i],
                                        set.v_grid[i + 1], std::move(left),
                                        scan.refine_tolerance);
      accept(bi, r.v, r.eta);
    }
  }

  // Merge repeated eta values, keeping the one with the lowest v.
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return a.eta_star < b.eta_star || (a.eta_star == b.eta_star && a.v_star < b.v_star);
  });
  std::vector<CriticalSolution> unique;
  for (const auto& s : found) {
    if (!unique.empty()) {
      auto& prev = unique.back();
      const double tol = 10.0 * scan.im_tolerance * std::max(1.0, std::abs(s.eta_star));
      if (std::abs(s.eta_star - prev.eta_star) < tol) {
        if (s.v_star < prev.v_star) prev = s;
        continue;
      }
    }
    unique.push_back(s);
  }

  CriticalSet result = CriticalSet::from_solutions(std::move(unique));
  const double h = scan.spacing();
  for (const auto& s : result.solutions) {
    if (s.v_star - scan.v_min < h || scan.v_max - s.v_star < h) {
      std::ostringstream msg;
      msg << "solution eta* = " << s.eta_star << " at v* = " << s.v_star
          << " lies within one grid cell of the scan window edge; roots outside "
             "[v_min, v_max] may be missing";
      result.warnings.push_back(msg.str());
    }
  }
  for (const auto& d : set.defects) {
    std::ostringstream msg;
    msg << "branch defect at v = " << d.v << ": expected " << d.expected_roots
        << " roots, found " << d.found_roots;
    result.warnings.push_back(msg.str());
  }
  return result;
}

complex evaluate_determinant(const RealMatrix& k, const RealMatrix& alpha,
                             std::span<const LorentzianSpec> dists, double eta,
                             double v) {
  check_dims(k, dists);
  ComplexMatrix m = unit_coupling(k, alpha) * eta;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    m(i, i) -= marginal_inverse_g(dists[static_cast<std::size_t>(i)], v);
  return m.determinant();
}

double residual_scale(std::span<const LorentzianSpec> dists, double v) {
  double scale = 1.0;
  for (const auto& d : dists) scale *= std::max(1.0, std::abs(marginal_inverse_g(d, v)));
  return scale;
}

std::vector<complex> growth_rate_at_zero_coupling(
    std::span<const LorentzianSpec> dists) {
  std::vector<complex> out;
  out.reserve(dists.size());
  for (const auto& d : dists) out.emplace_back(-d.delta, -d.omega0);
  return out;
}

}  // namespace popsync
