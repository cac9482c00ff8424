#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "zerostats/ensemble.hpp"
#include "zerostats/errors.hpp"
#include "zerostats/rng.hpp"
#include "zerostats/roots.hpp"

using namespace zerostats;

namespace {

bool same_multiset(std::vector<double> a, std::vector<double> b, double tol) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("real_roots on fixed polynomials") {
  CHECK(same_multiset(real_roots({-1, 0, 1}), {-1.0, 1.0}, 1e-12));   // t^2 - 1
  CHECK(same_multiset(real_roots({0, -1, 0, 1}), {-1, 0, 1}, 1e-12)); // t^3 - t
  CHECK(real_roots({1, 0, 1}).empty());                               // t^2 + 1
  CHECK(real_roots({5.0}).empty());
  CHECK_THROWS_AS(real_roots({0.0, 0.0, 0.0}), DegenerateInput);

  // roots straddling the unit circle: (t-0.5)(t-2)(t+3)
  // = t^3 + 0.5 t^2 - 6.5 t + 3
  CHECK(same_multiset(real_roots({3.0, -6.5, 0.5, 1.0}), {-3.0, 0.5, 2.0}, 1e-10));
}

TEST_CASE("Sturm and Companion back-ends agree on random Kac draws") {
  RngStream rng(31);
  const auto spec = EnsembleSpec::kac(12);
  RootConfig sturm, comp;
  comp.isolation = Isolation::Companion;
  for (int rep = 0; rep < 200; ++rep) {
    const auto c = sample_coefficients(spec, rng);
    const auto rs = real_roots(c, sturm);
    const auto rc = real_roots(c, comp);
    REQUIRE(rs.size() == rc.size());
    CHECK(same_multiset(rs, rc, 1e-9));
  }
}

TEST_CASE("refined roots satisfy the residual bound") {
  RngStream rng(77);
  const auto spec = EnsembleSpec::kac(24);
  for (int rep = 0; rep < 100; ++rep) {
    const auto c = sample_coefficients(spec, rng);
    double scale = 0.0;
    for (double x : c) scale = std::max(scale, std::abs(x));
    for (double r : real_roots(c)) {
      if (std::abs(r) <= 1.0) {
        const auto [f, df] = evaluate_with_derivative(c, r);
        CHECK(std::abs(f) / scale <= 1e-10 * (std::abs(df) / scale + 1.0));
      } else {
        // outside roots are refined in the reciprocal coordinate
        const auto rev = reversed_polynomial(c);
        const auto [f, df] = evaluate_with_derivative(rev, 1.0 / r);
        CHECK(std::abs(f) / scale <= 1e-10 * (std::abs(df) / scale + 1.0));
      }
    }
  }
}

TEST_CASE("count_in_interval on fixed polynomials") {
  CHECK(count_in_interval({-1, 0, 1}, -2, 2) == 2);    // t^2 - 1 on (-2,2)
  CHECK(count_in_interval({1, 0, 1}, -10, 10) == 0);   // t^2 + 1
  CHECK(count_in_interval({0, -1, 0, 1}, -0.5, 2) == 2);
  CHECK(count_in_interval({3.0, -6.5, 0.5, 1.0}, 1.0, 2.5) == 1);
  CHECK(count_in_interval({3.0, -6.5, 0.5, 1.0},
                          -std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()) == 3);
  CHECK_THROWS_AS(count_in_interval({1, 2, 3}, 1.0, 1.0), DomainError);
}

TEST_CASE("count matches filtered real_roots on random draws") {
  RngStream rng(13);
  const auto spec = EnsembleSpec::kac(15);
  for (int rep = 0; rep < 200; ++rep) {
    const auto c = sample_coefficients(spec, rng);
    const auto roots = real_roots(c);
    long inside = 0;
    for (double r : roots)
      if (r > -1.0 && r <= 1.0) ++inside;
    CHECK(count_in_interval(c, -1.0, 1.0) == inside);
  }
}

TEST_CASE("Sturm total count equals real_roots length over the Cauchy bound") {
  RngStream rng(3);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 4 + static_cast<int>(rng.uniform01() * 28);
    std::vector<double> c(static_cast<size_t>(n) + 1);
    for (auto& x : c) x = rng.gaussian();
    double cmax = 0.0;
    for (double x : c) cmax = std::max(cmax, std::abs(x));
    if (std::abs(c.back()) < 1e-12 * cmax) continue;
    double bound = 0.0;
    for (size_t k = 0; k + 1 < c.size(); ++k)
      bound = std::max(bound, std::abs(c[k] / c.back()));
    const double X = 1.0 + bound;
    CHECK(count_in_interval(c, -X, X) ==
          static_cast<long>(real_roots(c).size()));
  }
}

TEST_CASE("high-degree Kac draws: Sturm counts match the scan oracle") {
  RngStream rng(101);
  const auto spec = EnsembleSpec::kac(512);
  const double zmax = std::log(1024.0) / (2.0 * M_PI) + 1.75;
  std::vector<double> grid;
  for (double z = -zmax; z <= zmax; z += 5e-4) grid.push_back(std::tanh(M_PI * z));
  for (int rep = 0; rep < 25; ++rep) {
    const auto c = sample_coefficients(spec, rng);
    const auto rev = reversed_polynomial(c);
    const long scan_total = static_cast<long>(scan_roots(c, grid).size()) +
                            static_cast<long>(scan_roots(rev, grid).size());
    const long sturm_total = count_in_interval(
        c, -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity());
    CHECK(sturm_total == scan_total);
    CHECK(static_cast<long>(real_roots(c).size()) == sturm_total);
  }
}

TEST_CASE("scan_roots brackets and refines") {
  // (t - 0.3)(t + 0.7) = t^2 + 0.4 t - 0.21
  std::vector<double> grid;
  for (double t = -0.99; t <= 0.99; t += 0.01) grid.push_back(t);
  const auto r = scan_roots({-0.21, 0.4, 1.0}, grid);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(-0.7).epsilon(1e-10));
  CHECK(r[1] == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("straightening maps") {
  CHECK(straighten_kac_inside(0.0) == 0.0);
  CHECK(straighten_kac_inside(std::tanh(M_PI)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(straighten_kac_inside(0.5) ==
        doctest::Approx(std::log(3.0) / (2.0 * M_PI)).epsilon(1e-14));
  CHECK_THROWS_AS(straighten_kac_inside(1.0), DomainError);
  CHECK_THROWS_AS(straighten_kac_inside(-1.5), DomainError);

  CHECK(straighten_kac_outside(1.0 / std::tanh(M_PI)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(straighten_kac_outside(1e12)) < 1e-12);
  CHECK(straighten_kac_outside(2.0) ==
        doctest::Approx(std::log(3.0) / (2.0 * M_PI)).epsilon(1e-14));
  CHECK_THROWS_AS(straighten_kac_outside(0.5), DomainError);

  CHECK(straighten_so2(0.0, 7) == 0.0);
  CHECK(straighten_so2(1.0, 4) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(straighten_so2(1e16, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(straighten_so2(1.0, 0), DomainError);
}

TEST_CASE("straightening properties: odd, increasing, reciprocal link") {
  RngStream rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    const double tau = 0.999 * rng.uniform_pm1();
    CHECK(straighten_kac_inside(-tau) == -straighten_kac_inside(tau));
    if (tau != 0.0)
      CHECK(straighten_kac_outside(1.0 / tau) ==
            doctest::Approx(straighten_kac_inside(tau)).epsilon(1e-13));
  }
  for (double t = -0.9; t < 0.9; t += 0.05)
    CHECK(straighten_kac_inside(t) < straighten_kac_inside(t + 0.05));
}

TEST_CASE("straightened Kac inside zeros are nearly uniform at n = 512") {
  // bin counts of zeta over [-1,1] stay within 4-sigma Poisson bands
  RngStream rng(2024);
  const auto spec = EnsembleSpec::kac(512);
  std::vector<double> grid;
  for (double z = -1.01; z <= 1.01; z += 1e-3) grid.push_back(std::tanh(M_PI * z));
  const int nb = 10;
  std::vector<double> counts(nb, 0.0);
  const long T = 4000;
  for (long t = 0; t < T; ++t) {
    const auto c = sample_coefficients(spec, rng);
    for (double r : scan_roots(c, grid)) {
      const double z = straighten_kac_inside(r);
      if (z >= -1.0 && z < 1.0)
        counts[static_cast<size_t>((z + 1.0) / 0.2)] += 1.0;
    }
  }
  const double expected = 0.2 * T;  // unit intensity
  for (int b = 0; b < nb; ++b)
    CHECK(std::abs(counts[static_cast<size_t>(b)] - expected) <
          4.0 * std::sqrt(expected));
}
