#pragma once

#include <cstdint>
#include <vector>

#include "zerostats/ensemble.hpp"

namespace zerostats {

enum class Isolation { Sturm, Companion };

struct RootConfig {
  Isolation isolation = Isolation::Sturm;
  double refine_tol = 1e-12;  // absolute tolerance on root location
  int max_bisections = 200;
};

// Floating-point Sturm chain with per-step normalization. Remainders whose
// norm falls below 1e-13 of the (unit-norm) divisor terminate the chain
// (near-degenerate GCD); near-zero leading coefficients are trimmed so a
// degree drop never poisons later divisions.
//
// Valid for coefficient profiles of moderate dynamic range (Kac-like) up to
// degree ~512, verified against companion-matrix and scan oracles. Profiles
// spanning many decades (SO2 binomial variances at n >= ~100) overwhelm the
// chain; use scan_roots on a straightened grid there.
class SturmChain {
 public:
  explicit SturmChain(const std::vector<double>& coeffs);

  int degree() const { return degree_; }
  size_t length() const { return spans_.size(); }

  // Number of sign changes of the chain at t. Safe against overflow only for
  // |t| <= ~1 + eps at high degree; callers handle |t| > 1 via the chain of
  // the reversed polynomial.
  int sign_changes(double t) const;

  // Value of the (normalized) polynomial itself at t.
  double value(double t) const;

  const std::vector<double>& normalized_coefficients() const { return p0_; }

 private:
  struct Span {
    std::uint32_t offset;
    std::uint32_t len;
  };
  std::vector<double> data_;
  std::vector<Span> spans_;
  std::vector<double> p0_;
  int degree_ = 0;
};

// All real roots, each refined to cfg.refine_tol; distinct roots only.
// Sturm back-end isolates on [-1,1] for the polynomial and its reversal
// (reciprocal roots), so no evaluation ever leaves the unit box.
std::vector<double> real_roots(const std::vector<double>& coeffs,
                               const RootConfig& cfg = {});

// Exact count of real roots in (a, b] via Sturm sign changes; no floating
// refinement involved. Endpoints landing on a root are perturbed by tol.
// a = -inf / b = +inf are allowed.
int count_in_interval(const std::vector<double>& coeffs, double a, double b);

// Sign-scan bracketing: evaluates f on the given ascending grid, brackets
// every sign change and refines each bracket by bisection + Newton polish.
// Pairs of roots falling between adjacent grid points are missed; choose the
// grid from the root-density scale so that probability is negligible.
std::vector<double> scan_roots(const std::vector<double>& coeffs,
                               const std::vector<double>& grid,
                               double refine_tol = 1e-12);

namespace detail {
// sign of f(t) for any t, evaluating the reversed polynomial at 1/t when
// |t| > 1 so high degrees cannot overflow.
int sign_at(const std::vector<double>& coeffs, const std::vector<double>& rev,
            double t);
}  // namespace detail

// Straightening maps transporting zeros to unit limiting intensity.
double straighten_kac_inside(double tau);           // artanh(tau)/pi, |tau| < 1
double straighten_kac_outside(double tau);          // artanh(1/tau)/pi, |tau| > 1
double straighten_so2(double tau, int n);           // sqrt(n) arctan(tau)/pi

}  // namespace zerostats
