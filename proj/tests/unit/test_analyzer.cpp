#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "popsync/analyzer.hpp"
#include "popsync/distributions.hpp"
#include "support/cases.hpp"

using namespace popsync;
using namespace popsync::testing;

namespace {

const std::vector<LorentzianSpec> kPair{kFirst, kSecond};
const std::vector<LorentzianSpec> kIdentical{kFirst, kFirst};
const std::vector<LorentzianSpec> kTriple{kFirst, kSecond, kThird};

RealMatrix zeros(Eigen::Index m) { return RealMatrix::Zero(m, m); }

std::vector<double> etas(const CriticalSet& s) {
  std::vector<double> out;
  for (const auto& x : s.solutions) out.push_back(x.eta_star);
  return out;
}

CriticalSet scan(const RealMatrix& k, const std::vector<LorentzianSpec>& d,
                 std::size_t n_points = 4001) {
  auto params = ScanParams::default_for(d);
  params.n_points = n_points;
  return find_critical_couplings(k, zeros(k.rows()), d, params);
}

// Roots of a x^2 + b x + c with real coefficients, for the v = -omega0 oracle.
std::vector<double> real_quadratic(double a, double b, double c) {
  const double disc = std::sqrt(b * b - 4 * a * c);
  std::vector<double> r{(-b - disc) / (2 * a), (-b + disc) / (2 * a)};
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

TEST_CASE("identical closed form: table cases") {
  auto run = [](const char* name) {
    return identical_critical(IdenticalCaseInput::from(table_matrix(name), 1.0, 2.0));
  };
  const auto a = run("A");
  REQUIRE(a.solutions.size() == 1);
  CHECK(a.solutions[0].eta_star == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(a.solutions[0].v_star == doctest::Approx(-2.0 - std::sqrt(3.0)).epsilon(1e-14));
  CHECK(*a.relevant_positive == 4.0);

  const auto c = run("C");
  REQUIRE(c.solutions.size() == 2);
  CHECK(c.solutions[0].eta_star == doctest::Approx(2 * (2 - std::sqrt(2.0))).epsilon(1e-14));
  CHECK(c.solutions[1].eta_star == doctest::Approx(2 * (2 + std::sqrt(2.0))).epsilon(1e-14));
  CHECK(c.solutions[0].v_star == -2.0);
  CHECK(*c.relevant_positive == c.solutions[0].eta_star);
  CHECK_FALSE(c.relevant_negative);

  CHECK(run("H").empty());

  const auto g = run("G");
  REQUIRE(g.solutions.size() == 2);
  CHECK(g.solutions[0].eta_star == doctest::Approx(-2.0));
  CHECK(g.solutions[1].eta_star == doctest::Approx(2.0));
}

TEST_CASE("identical closed form: degenerate determinant and width scaling") {
  // D = 0, T = 3: eta = 2 delta / T
  const auto s = identical_critical(IdenticalCaseInput::from(mat2(1, 2, 1, 2), 0.5, -1.0));
  REQUIRE(s.solutions.size() == 1);
  CHECK(s.solutions[0].eta_star == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s.solutions[0].v_star == 1.0);
  // T = 0, D = 0: nothing.
  CHECK(identical_critical(IdenticalCaseInput::from(mat2(1, 1, -1, -1), 1.0, 0.0)).empty());
  // T^2 = 4D exactly: case 2 with a single v.
  const auto t = identical_critical(IdenticalCaseInput::from(mat2(1, 0, 0, 1), 1.0, 0.0));
  REQUIRE(t.solutions.size() == 1);
  CHECK(t.solutions[0].eta_star == 2.0);
  CHECK(t.solutions[0].v_star == 0.0);
}

TEST_CASE("dispersion roots of small pencils") {
  // Classic single population: eta = 2 delta.
  const std::vector<LorentzianSpec> one{{0.0, 1.0}};
  auto r = dispersion_roots_at(ComplexMatrix::Ones(1, 1), one, 0.0);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0] - complex(2.0, 0.0)) < 1e-14);

  const std::vector<LorentzianSpec> twin{{0.0, 1.0}, {0.0, 1.0}};
  r = dispersion_roots_at(ComplexMatrix::Identity(2, 2), twin, 0.0);
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[0] - 2.0) < 1e-14);
  CHECK(std::abs(r[1] - 2.0) < 1e-14);

  // Case C at v = -omega0 against the quadratic D eta^2 - 2 delta T eta + 4 delta^2.
  const ComplexMatrix kc = table_matrix("C").cast<complex>();
  r = dispersion_roots_at(kc, kIdentical, -2.0);
  const auto oracle = real_quadratic(0.5, -2.0 * 2.0, 4.0);
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[0] - oracle[0]) < 1e-12);
  CHECK(std::abs(r[1] - oracle[1]) < 1e-12);
  CHECK(oracle[0] == doctest::Approx(2 * (2 - std::sqrt(2.0))).epsilon(1e-14));
}

TEST_CASE("singular coupling drops the infinite root") {
  const ComplexMatrix k = mat2(1, 2, 1, 2).cast<complex>();
  const auto r = dispersion_roots_at(k, kPair, 0.3);
  REQUIRE(r.size() == 1);
  const auto q = two_pop_quadratic_roots(mat2(1, 2, 1, 2), kFirst, kSecond, 0.3);
  REQUIRE(q.size() == 1);
  CHECK(std::abs(r[0] - q[0]) < 1e-12);
  CHECK(std::abs(evaluate_determinant(mat2(1, 2, 1, 2), zeros(2), kPair, 0.0, 0.3)) > 0.0);
}

TEST_CASE("dimension errors are reported") {
  CHECK_THROWS_AS(dispersion_roots_at(ComplexMatrix::Ones(3, 3), kPair, 0.0), AnalyzerError);
  ScanParams bad;
  bad.v_min = 1.0;
  bad.v_max = 0.0;
  CHECK_THROWS_AS(require_valid(bad), AnalyzerError);
  bad = ScanParams{};
  bad.n_points = 2;
  CHECK_THROWS_AS(require_valid(bad), AnalyzerError);
}

TEST_CASE("quadratic roots agree with the pencil across the scan window") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::Matrix2d k;
    for (int i = 0; i < 4; ++i) k(i) = u(rng);
    const std::vector<LorentzianSpec> d{{u(rng), 0.2 + std::abs(u(rng))},
                                        {u(rng), 0.2 + std::abs(u(rng))}};
    const ComplexMatrix kbar = k.cast<complex>();
    for (double v = -8.0; v <= 8.0; v += 0.173) {
      auto a = dispersion_roots_at(kbar, d, v);
      auto b = two_pop_quadratic_roots(k, d[0], d[1], v);
      REQUIRE(a.size() == b.size());
      const auto perm = match_roots(a, b);
      for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i] - b[perm[i]]) < 1e-10 * std::max(1.0, std::abs(a[i])));
    }
  }
}

TEST_CASE("quadratic roots locate the case E critical points") {
  const Eigen::Matrix2d k = table_matrix("E");
  auto nearest_real = [](const std::vector<complex>& roots) {
    return *std::min_element(roots.begin(), roots.end(), [](complex a, complex b) {
      return std::abs(a.imag()) < std::abs(b.imag());
    });
  };
  const complex at_first = nearest_real(two_pop_quadratic_roots(k, kFirst, kSecond, -4.024));
  CHECK(std::abs(at_first.imag()) < 5e-3);
  CHECK(at_first.real() == doctest::Approx(0.515).epsilon(5e-3));
  const complex at_second = nearest_real(two_pop_quadratic_roots(k, kFirst, kSecond, -1.722));
  CHECK(std::abs(at_second.imag()) < 5e-3);
  CHECK(at_second.real() == doctest::Approx(-2.809).epsilon(5e-3));
}

TEST_CASE("root matching") {
  const std::vector<complex> prev{{0, 0}, {1, 0}, {2, 0}};
  const std::vector<complex> next{{2.1, 0}, {0.1, 0}, {0.9, 0}};
  CHECK(match_roots(prev, next) == std::vector<std::size_t>{1, 2, 0});
  // Greedy path with unequal sizes leaves one branch unpaired.
  const auto partial = match_roots(prev, std::vector<complex>{{1.9, 0}, {0.05, 0}});
  CHECK(partial[0] == 1);
  CHECK(partial[2] == 0);
  CHECK(partial[1] == static_cast<std::size_t>(-1));
}

TEST_CASE("branches: single population is a straight line") {
  const std::vector<LorentzianSpec> one{{1.0, 0.5}};
  ScanParams p;
  p.v_min = -5;
  p.v_max = 3;
  p.n_points = 81;
  const auto b = build_branches(RealMatrix::Constant(1, 1, 2.0), zeros(1), one, p);
  REQUIRE(b.branches() == 1);
  CHECK(b.defects.empty());
  for (std::size_t i = 0; i < b.v_grid.size(); ++i) {
    const complex expected = 2.0 * complex(0.5, b.v_grid[i] + 1.0) / 2.0;
    CHECK(std::abs(b.roots(0, static_cast<Eigen::Index>(i)) - expected) < 1e-13);
  }
}

TEST_CASE("branches are continuous where the principal square root jumps") {
  const Eigen::Matrix2d k = table_matrix("A");
  auto params = ScanParams::default_for(kPair);
  const auto b = build_branches(k, zeros(2), kPair, params);
  REQUIRE(b.branches() == 2);
  CHECK(b.defects.empty());

  // Step-to-step movement along tracked branches stays small...
  double worst_tracked = 0.0;
  for (Eigen::Index r = 0; r < 2; ++r)
    for (Eigen::Index i = 1; i < b.roots.cols(); ++i)
      worst_tracked = std::max(worst_tracked, std::abs(b.roots(r, i) - b.roots(r, i - 1)));
  CHECK(worst_tracked < 0.05);

  // ...while the "+sqrt" principal-branch formula jumps somewhere in the window.
  double worst_principal = 0.0;
  complex prev;
  for (std::size_t i = 0; i < b.v_grid.size(); ++i) {
    const double v = b.v_grid[i];
    const complex a(kFirst.delta, v + kFirst.omega0), bb(kSecond.delta, v + kSecond.omega0);
    const double D = k.determinant();
    const complex B = -2.0 * (bb * k(0, 0) + a * k(1, 1));
    const complex root = (-B + std::sqrt(B * B - 16.0 * D * a * bb)) / (2.0 * D);
    if (i > 0) worst_principal = std::max(worst_principal, std::abs(root - prev));
    prev = root;
  }
  CHECK(worst_principal > 1.0);

  // Every column is the full root set at that v.
  for (std::size_t i = 0; i < b.v_grid.size(); i += 250) {
    const auto roots = dispersion_roots_at(k.cast<complex>(), kPair, b.v_grid[i]);
    std::vector<complex> column{b.roots(0, static_cast<Eigen::Index>(i)),
                                b.roots(1, static_cast<Eigen::Index>(i))};
    const auto perm = match_roots(column, roots);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(column[j] - roots[perm[j]]) < 1e-14);
  }
}

TEST_CASE("identical populations: branch values at v = -omega0 match the table") {
  for (const auto& m : table_matrices()) {
    if (m.name == "A" || m.name == "B" || m.name == "H") continue;  // complex eigenvalues
    CAPTURE(m.name);
    ScanParams p = ScanParams::default_for(kIdentical);
    const auto b = build_branches(m.k, zeros(2), kIdentical, p);
    const std::size_t mid = 2000;  // v = -2 sits exactly on the default grid
    REQUIRE(b.v_grid[mid] == doctest::Approx(-2.0).epsilon(1e-13));
    auto closed = etas(identical_critical(IdenticalCaseInput::from(m.k, 1.0, 2.0)));
    std::vector<double> values{b.roots(0, mid).real(), b.roots(1, mid).real()};
    std::sort(values.begin(), values.end());
    REQUIRE(closed.size() == 2);
    CHECK(values[0] == doctest::Approx(closed[0]).epsilon(1e-10));
    CHECK(values[1] == doctest::Approx(closed[1]).epsilon(1e-10));
  }
}

TEST_CASE("heterogeneous two-population critical couplings") {
  const auto e = scan(table_matrix("E"), kPair);
  REQUIRE(e.solutions.size() == 2);
  CHECK(e.solutions[0].eta_star == doctest::Approx(-2.809).epsilon(2e-4));
  CHECK(e.solutions[0].v_star == doctest::Approx(-1.722).epsilon(5e-4));
  CHECK(e.solutions[1].eta_star == doctest::Approx(0.515).epsilon(1e-3));
  CHECK(e.solutions[1].v_star == doctest::Approx(-4.024).epsilon(2e-4));
  CHECK(*e.relevant_negative == e.solutions[0].eta_star);
  CHECK(*e.relevant_positive == e.solutions[1].eta_star);

  const auto a = scan(table_matrix("A"), kPair);
  REQUIRE(a.solutions.size() == 2);
  CHECK(a.solutions[0].eta_star == doctest::Approx(2.189).epsilon(5e-4));
  CHECK(a.solutions[1].eta_star == doctest::Approx(4.501).epsilon(5e-4));
  CHECK_FALSE(a.relevant_negative);

  const auto h = scan(table_matrix("H"), kPair);
  REQUIRE(h.solutions.size() == 2);
  CHECK(h.solutions[0].eta_star == doctest::Approx(-1.429).epsilon(5e-4));
  CHECK(h.solutions[1].eta_star == doctest::Approx(5.0).epsilon(5e-4));
}

TEST_CASE("three-population critical couplings") {
  const auto s = scan(three_population_k(), kTriple);
  REQUIRE(s.solutions.size() == 3);
  CHECK(s.solutions[0].eta_star == doctest::Approx(-0.891).epsilon(1e-3));
  CHECK(s.solutions[1].eta_star == doctest::Approx(-0.564).epsilon(1e-3));
  CHECK(s.solutions[2].eta_star == doctest::Approx(2.303).epsilon(1e-3));
  CHECK(*s.relevant_negative == s.solutions[1].eta_star);
  CHECK(*s.relevant_positive == s.solutions[2].eta_star);
  CHECK(s.warnings.empty());
}

TEST_CASE("every reported solution has a vanishing determinant") {
  std::vector<std::pair<RealMatrix, std::vector<LorentzianSpec>>> systems{
      {three_population_k(), kTriple}};
  for (const auto& m : table_matrices()) {
    systems.emplace_back(m.k, kPair);
    systems.emplace_back(m.k, kIdentical);
  }
  for (const auto& [k, d] : systems) {
    for (const auto& s : scan(k, d).solutions) {
      const double residual =
          std::abs(evaluate_determinant(k, zeros(k.rows()), d, s.eta_star, s.v_star));
      CHECK(residual < 1e-6 * residual_scale(d, s.v_star));
    }
  }
}

TEST_CASE("determinant examples") {
  CHECK(std::abs(evaluate_determinant(table_matrix("A"), zeros(2), kIdentical, 4.0,
                                      -2.0 - std::sqrt(3.0))) < 1e-9);
  // Rounded published values leave a small residual.
  const complex det = evaluate_determinant(table_matrix("E"), zeros(2), kPair, 0.515, -4.024);
  CHECK(std::abs(det) < 1e-2 * residual_scale(kPair, -4.024));
  // Zero coupling is never marginal.
  for (double v = -30; v <= 30; v += 0.5)
    CHECK(std::abs(evaluate_determinant(table_matrix("B"), zeros(2), kPair, 0.0, v)) > 0.5);
}

TEST_CASE("identical-population scan matches the closed form, including no solution") {
  for (const auto& m : table_matrices()) {
    CAPTURE(m.name);
    const auto closed = etas(identical_critical(IdenticalCaseInput::from(m.k, 1.0, 2.0)));
    const auto scanned = etas(scan(m.k, kIdentical));
    REQUIRE(closed.size() == scanned.size());
    for (std::size_t i = 0; i < closed.size(); ++i)
      CHECK(std::abs(closed[i] - scanned[i]) < 1e-6);
  }
}

TEST_CASE("doubling the scan resolution does not move the solutions") {
  for (const char* name : {"A", "E", "H"}) {
    const auto coarse = scan(table_matrix(name), kPair, 4001);
    const auto fine = scan(table_matrix(name), kPair, 8001);
    REQUIRE(coarse.solutions.size() == fine.solutions.size());
    for (std::size_t i = 0; i < coarse.solutions.size(); ++i) {
      CHECK(std::abs(coarse.solutions[i].v_star - fine.solutions[i].v_star) < 1e-9);
      CHECK(std::abs(coarse.solutions[i].eta_star - fine.solutions[i].eta_star) < 1e-9);
    }
  }
}

TEST_CASE("negating every centre frequency mirrors v*") {
  std::vector<LorentzianSpec> mirrored = kTriple;
  for (auto& d : mirrored) d.omega0 = -d.omega0;
  const auto a = scan(three_population_k(), kTriple);
  const auto b = scan(three_population_k(), mirrored);
  REQUIRE(a.solutions.size() == b.solutions.size());
  for (std::size_t i = 0; i < a.solutions.size(); ++i) {
    CHECK(a.solutions[i].eta_star == doctest::Approx(b.solutions[i].eta_star).epsilon(1e-9));
    CHECK(a.solutions[i].v_star == doctest::Approx(-b.solutions[i].v_star).epsilon(1e-9));
  }
}

TEST_CASE("solutions near the window edge raise a warning") {
  auto params = ScanParams::default_for(kPair);
  params.v_min = -4.03;  // v* = -4.024 sits inside the first grid cell
  params.n_points = 1001;
  const auto s = find_critical_couplings(table_matrix("E"), zeros(2), kPair, params);
  CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("growth rates at zero coupling") {
  const auto s = growth_rate_at_zero_coupling(kPair);
  CHECK(s[0] == complex(-1.0, -2.0));
  CHECK(s[1] == complex(-0.5, -4.0));
  for (const auto& x : growth_rate_at_zero_coupling(kTriple)) CHECK(x.real() < 0.0);
  // They are the roots of the determinant in s at eta = 0.
  for (std::size_t i = 0; i < kPair.size(); ++i)
    CHECK(std::abs(g_inverse_lorentzian(kPair[i], s[i])) < 1e-15);
}
