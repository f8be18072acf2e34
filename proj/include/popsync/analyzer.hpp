#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "popsync/model.hpp"

namespace popsync {

class AnalyzerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two identical Lorentzian populations; only trace and determinant of k
/// matter for the critical couplings.
struct IdenticalCaseInput {
  Eigen::Matrix2d k;
  double delta = 1.0;
  double omega0 = 0.0;
  double trace_T = 0.0;
  double det_D = 0.0;

  static IdenticalCaseInput from(const Eigen::Matrix2d& k, double delta,
                                 double omega0);
};

struct ScanParams {
  double v_min = -20.0;
  double v_max = 20.0;
  std::size_t n_points = 4001;
  double im_tolerance = 1e-8;      ///< relative to max(1, |eta|)
  double refine_tolerance = 1e-10; ///< final bracket width in v

  /// Window spanning 20 widths either side of every -omega0.
  static ScanParams default_for(std::span<const LorentzianSpec> dists);

  double spacing() const {
    return (v_max - v_min) / static_cast<double>(n_points - 1);
  }
};

/// Throws AnalyzerError if the window or tolerances are unusable.
void require_valid(const ScanParams& scan);

struct BranchDefect {
  std::size_t grid_index;
  double v;
  std::size_t expected_roots;
  std::size_t found_roots;
};

struct BranchSet {
  std::vector<double> v_grid;
  ComplexMatrix roots;  ///< branch x v; NaN where a branch has no root
  std::vector<BranchDefect> defects;

  std::size_t branches() const { return static_cast<std::size_t>(roots.rows()); }
};

/// Closed-form critical couplings for two identical populations, classified
/// by the trace T and determinant D of k:
///   T = 0, D >= 0          no solution
///   T = 0, D < 0           eta = +-2 delta / sqrt(-D),          v = -omega0
///   D = 0                  eta = 2 delta / T,                    v = -omega0
///   T^2 > 4D               eta = delta (T +- sqrt(T^2 - 4D)) / D, v = -omega0
///   T^2 <= 4D              eta = 4 delta / T,  v = -omega0 +- (delta/T) sqrt(4D - T^2)
/// In the last case the two v values share one eta and only the lower v is kept.
CriticalSet identical_critical(const IdenticalCaseInput& input);

/// c(v) = 1/g(iv) = 2 (delta + i (v + omega0)).
complex marginal_inverse_g(const LorentzianSpec& dist, double v);

/// Finite eta solving det(eta * kbar - diag(c(v))) = 0, where kbar is the
/// coupling at unit eta. Solved as the eigenvalues mu of diag(c)^{-1} kbar with
/// eta = 1/mu; zero mu (singular kbar) are infinite eta and are dropped.
/// Sorted by real part, then imaginary part.
std::vector<complex> dispersion_roots_at(const ComplexMatrix& kbar,
                                         std::span<const LorentzianSpec> dists,
                                         double v);

/// Roots of D eta^2 - 2 eta (b k00 + a k11) + 4ab = 0 with
/// a = delta_0 + i(v + omega_0), b = delta_1 + i(v + omega_1).
/// A singular k leaves the single root of the linear remainder.
std::vector<complex> two_pop_quadratic_roots(const Eigen::Matrix2d& k,
                                             const LorentzianSpec& first,
                                             const LorentzianSpec& second,
                                             double v);

/// Indices `perm` minimising sum |next[perm[b]] - prev[b]|. Exhaustive for up
/// to four roots, greedy nearest pairs beyond that or when sizes differ
/// (unpaired entries of prev get npos).
std::vector<std::size_t> match_roots(std::span<const complex> prev,
                                     std::span<const complex> next);

BranchSet build_branches(const RealMatrix& k, const RealMatrix& alpha,
                         std::span<const LorentzianSpec> dists,
                         const ScanParams& scan);

/// Real critical couplings: sign changes of Im(eta) along each tracked
/// branch, refined by bisection in v with the roots re-solved at every
/// midpoint.
CriticalSet find_critical_couplings(const RealMatrix& k, const RealMatrix& alpha,
                                    std::span<const LorentzianSpec> dists,
                                    const ScanParams& scan);

/// det(eta * k e^{-i alpha} - diag(c(v))).
complex evaluate_determinant(const RealMatrix& k, const RealMatrix& alpha,
                             std::span<const LorentzianSpec> dists, double eta,
                             double v);

/// prod max(1, |c(v)|), the natural size of the determinant at v.
double residual_scale(std::span<const LorentzianSpec> dists, double v);

/// Growth rates -delta - i omega0 of the uncoupled populations.
std::vector<complex> growth_rate_at_zero_coupling(
    std::span<const LorentzianSpec> dists);

}  // namespace popsync
