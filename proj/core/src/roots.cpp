#include "zerostats/roots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "zerostats/errors.hpp"

namespace zerostats {

namespace {

constexpr double kRemainderFloor = 1e-13;  // near-degenerate GCD guard
constexpr double kLeadTrim = 3e-14;        // degree-drop trim, post-normalization
constexpr double kUnitPad = 1e-8;          // half-open split between |t|<=1 and |t|>1

std::vector<double> trimmed(const std::vector<double>& coeffs) {
  size_t n = coeffs.size();
  while (n > 0 && coeffs[n - 1] == 0.0) --n;
  if (n == 0) throw DegenerateInput("polynomial is identically zero");
  return std::vector<double>(coeffs.begin(), coeffs.begin() + static_cast<long>(n));
}

double inf_norm(const double* p, size_t n) {
  double m = 0.0;
  for (size_t i = 0; i < n; ++i) m = std::max(m, std::abs(p[i]));
  return m;
}

double horner(const double* c, size_t n, double t) {
  double f = 0.0;
  for (size_t i = n; i-- > 0;) f = f * t + c[i];
  return f;
}

int sgn(double x) { return (x > 0) - (x < 0); }

}  // namespace

SturmChain::SturmChain(const std::vector<double>& coeffs) {
  std::vector<double> c = trimmed(coeffs);
  const double nc = inf_norm(c.data(), c.size());
  for (auto& x : c) x /= nc;
  degree_ = static_cast<int>(c.size()) - 1;
  p0_ = c;

  data_.reserve(c.size() * (c.size() + 1) / 2 + 2 * c.size());
  auto push = [&](const std::vector<double>& p) {
    spans_.push_back({static_cast<std::uint32_t>(data_.size()),
                      static_cast<std::uint32_t>(p.size())});
    data_.insert(data_.end(), p.begin(), p.end());
  };
  push(c);
  if (degree_ == 0) return;

  std::vector<double> d(c.size() - 1);
  for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
  double nd = inf_norm(d.data(), d.size());
  for (auto& x : d) x /= nd;
  push(d);

  std::vector<double> prev = c, cur = d, rem;
  while (cur.size() > 1) {
    // long division of prev by cur; only the remainder is kept
    rem = prev;
    const size_t dc = cur.size() - 1;
    const double lead = cur.back();
    for (size_t k = rem.size() - 1; k + 1 > dc; --k) {
      const double q = rem[k] / lead;
      if (q != 0.0) {
        for (size_t j = 0; j < dc; ++j) rem[k - dc + j] -= q * cur[j];
      }
      rem[k] = 0.0;
      if (k == dc) break;
    }
    rem.resize(dc);
    double nr = inf_norm(rem.data(), rem.size());
    if (nr <= kRemainderFloor) break;
    for (auto& x : rem) x = -x / nr;
    size_t len = rem.size();
    while (len > 0 && std::abs(rem[len - 1]) < kLeadTrim) --len;
    if (len == 0) break;
    rem.resize(len);
    push(rem);
    prev.swap(cur);
    cur.swap(rem);
  }
}

int SturmChain::sign_changes(double t) const {
  int v = 0, last = 0;
  for (const auto& s : spans_) {
    const int sg = sgn(horner(data_.data() + s.offset, s.len, t));
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++v;
    last = sg;
  }
  return v;
}

double SturmChain::value(double t) const {
  return horner(p0_.data(), p0_.size(), t);
}

namespace detail {

int sign_at(const std::vector<double>& coeffs, const std::vector<double>& rev,
            double t) {
  if (std::abs(t) <= 1.0)
    return sgn(horner(coeffs.data(), coeffs.size(), t));
  // f(t) = t^n g(1/t) with g the reversed polynomial
  const int n = static_cast<int>(coeffs.size()) - 1;
  const int s = sgn(horner(rev.data(), rev.size(), 1.0 / t));
  const int lead_sign = (t < 0.0 && (n % 2) != 0) ? -1 : 1;
  return s * lead_sign;
}

}  // namespace detail

namespace {

// Nudge x off a root of the chain polynomial so V(x) is well-defined.
double off_root(const SturmChain& ch, double x, double step) {
  for (int i = 0; i < 100 && ch.value(x) == 0.0; ++i) x += step;
  return x;
}

// Bisection + Newton refinement of a single sign-change bracket of p.
double refine_bracket(const std::vector<double>& p, double a, double b, int fa,
                      double tol, int max_iter) {
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const int fm = sgn(horner(p.data(), p.size(), m));
    if (fm == 0) return m;
    if (fm == fa)
      a = m;
    else
      b = m;
  }
  double x = 0.5 * (a + b);
  for (int i = 0; i < 3; ++i) {
    auto [f, df] = evaluate_with_derivative(p, x);
    if (df == 0.0) break;
    const double step = f / df;
    const double y = x - step;
    if (y <= a || y >= b) break;
    x = y;
    if (std::abs(step) < 0.25 * tol) break;
  }
  return x;
}

// V-bisection refinement for brackets without a sign change of p itself
// (even local multiplicity; vanishing measure for Gaussian draws).
double refine_by_count(const SturmChain& ch, double a, double b, int va,
                       double tol, int max_iter) {
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    if (ch.sign_changes(m) < va)
      b = m;
    else
      a = m;
  }
  return 0.5 * (a + b);
}

// All distinct roots of the chain polynomial inside [lo, hi], |lo|,|hi| <= ~1.
void isolate_unit(const SturmChain& ch, double lo, double hi, double tol,
                  int max_iter, std::vector<double>& out) {
  if (ch.degree() == 0) return;
  lo = off_root(ch, lo, tol);
  hi = off_root(ch, hi, -tol);
  struct Node {
    double a, b;
    int va, vb;
  };
  std::vector<Node> stack;
  stack.push_back({lo, hi, ch.sign_changes(lo), ch.sign_changes(hi)});
  const auto& p = ch.normalized_coefficients();
  while (!stack.empty()) {
    Node nd = stack.back();
    stack.pop_back();
    const int k = nd.va - nd.vb;
    if (k <= 0) continue;
    if (k == 1) {
      const int fa = sgn(horner(p.data(), p.size(), nd.a));
      const int fb = sgn(horner(p.data(), p.size(), nd.b));
      if (fa != 0 && fb != 0 && fa != fb)
        out.push_back(refine_bracket(p, nd.a, nd.b, fa, tol, max_iter));
      else
        out.push_back(refine_by_count(ch, nd.a, nd.b, nd.va, tol, max_iter));
      continue;
    }
    if (nd.b - nd.a < tol) {
      // cluster below resolution: report once (distinct-roots contract)
      out.push_back(0.5 * (nd.a + nd.b));
      continue;
    }
    double m = off_root(ch, 0.5 * (nd.a + nd.b), 0.25 * tol);
    if (m <= nd.a || m >= nd.b) {
      out.push_back(0.5 * (nd.a + nd.b));
      continue;
    }
    const int vm = ch.sign_changes(m);
    stack.push_back({nd.a, m, nd.va, vm});
    stack.push_back({m, nd.b, vm, nd.vb});
  }
}

std::vector<double> companion_roots(const std::vector<double>& coeffs, double tol) {
  std::vector<double> c = trimmed(coeffs);
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return {};
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) C(0, i) = -c[static_cast<size_t>(n - 1 - i)] / c.back();
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, /*computeEigenvectors=*/false);
  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    const auto lam = es.eigenvalues()[i];
    if (std::abs(lam.imag()) > 1e-8 * (1.0 + std::abs(lam.real()))) continue;
    double x = lam.real();
    for (int it = 0; it < 8; ++it) {
      auto [f, df] = evaluate_with_derivative(c, x);
      if (df == 0.0) break;
      const double step = f / df;
      x -= step;
      if (std::abs(step) < 0.25 * tol) break;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  // distinct roots only
  std::vector<double> uniq;
  for (double r : roots) {
    if (uniq.empty() || r - uniq.back() > 10 * tol * (1.0 + std::abs(r)))
      uniq.push_back(r);
  }
  return uniq;
}

}  // namespace

std::vector<double> real_roots(const std::vector<double>& coeffs,
                               const RootConfig& cfg) {
  if (cfg.refine_tol <= 0) throw DomainError("real_roots: refine_tol must be > 0");
  if (cfg.isolation == Isolation::Companion)
    return companion_roots(coeffs, cfg.refine_tol);

  std::vector<double> c = trimmed(coeffs);
  if (c.size() == 1) return {};
  std::vector<double> out;

  SturmChain chain(c);
  isolate_unit(chain, -1.0 - kUnitPad, 1.0 + kUnitPad, cfg.refine_tol,
               cfg.max_bisections, out);

  // reciprocal roots |tau| > 1 via the reversed polynomial on [-1, 1]
  std::vector<double> rev = reversed_polynomial(c);
  const std::vector<double> rt = trimmed(rev);
  if (rt.size() > 1) {
    SturmChain rchain(rt);
    std::vector<double> rroots;
    const double edge = 1.0 / (1.0 + kUnitPad);
    isolate_unit(rchain, -edge, -1e-300, cfg.refine_tol, cfg.max_bisections, rroots);
    isolate_unit(rchain, 1e-300, edge, cfg.refine_tol, cfg.max_bisections, rroots);
    for (double r : rroots) out.push_back(1.0 / r);
  }

  std::sort(out.begin(), out.end());
  return out;
}

int count_in_interval(const std::vector<double>& coeffs, double a, double b) {
  if (!(a < b)) throw DomainError("count_in_interval: need a < b");
  std::vector<double> c = trimmed(coeffs);
  if (c.size() == 1) return 0;

  SturmChain chain(c);
  const double lo = -1.0 - kUnitPad, hi = 1.0 + kUnitPad;
  const double tol = 1e-12;

  auto V = [&](const SturmChain& ch, double x) {
    return ch.sign_changes(off_root(ch, x, tol));
  };

  int total = 0;
  // inside piece: (a,b] intersected with [lo, hi]
  {
    const double x1 = std::max(a, lo), x2 = std::min(b, hi);
    if (x1 < x2) total += V(chain, x1) - V(chain, x2);
  }
  std::vector<double> rev = reversed_polynomial(c);
  const std::vector<double> rt = trimmed(rev);
  if (rt.size() > 1) {
    SturmChain rchain(rt);
    const double edge = 1.0 / (1.0 + kUnitPad);
    // left outside piece: (a, min(b, lo)] maps to r in [1/min(b,lo), 1/a)
    if (a < lo) {
      const double b2 = std::min(b, lo);
      const double r1 = 1.0 / b2;
      const double r2 = (std::isinf(a)) ? -1e-300 : 1.0 / a;
      if (r1 < r2) total += V(rchain, std::max(r1, -edge)) - V(rchain, r2);
    }
    // right outside piece: (max(a, hi), b] maps to r in [1/b, 1/max(a,hi))
    if (b > hi) {
      const double a2 = std::max(a, hi);
      const double r1 = (std::isinf(b)) ? 1e-300 : 1.0 / b;
      const double r2 = 1.0 / a2;
      if (r1 < r2) total += V(rchain, r1) - V(rchain, std::min(r2, edge));
    }
  }
  return total;
}

std::vector<double> scan_roots(const std::vector<double>& coeffs,
                               const std::vector<double>& grid,
                               double refine_tol) {
  if (grid.size() < 2) return {};
  std::vector<double> c = trimmed(coeffs);
  if (c.size() == 1) return {};
  const std::vector<double> rev = reversed_polynomial(c);

  std::vector<double> out;
  double prev_t = grid[0];
  int prev_s = detail::sign_at(c, rev, prev_t);
  for (size_t i = 1; i < grid.size(); ++i) {
    const double t = grid[i];
    int s = detail::sign_at(c, rev, t);
    if (s == 0) {
      out.push_back(t);
      prev_t = t;
      prev_s = -prev_s;  // treat exact zero as a crossing
      continue;
    }
    if (prev_s != 0 && s != prev_s) {
      // refine in whichever coordinate keeps evaluation inside the unit box
      double a = prev_t, b = t;
      if (std::abs(a) <= 1.0 && std::abs(b) <= 1.0) {
        out.push_back(refine_bracket(c, a, b, prev_s, refine_tol, 200));
      } else if (std::abs(a) >= 1.0 && std::abs(b) >= 1.0 && a * b > 0.0) {
        // both outside: bracket [1/b, 1/a] for the reversed polynomial
        double ra = 1.0 / b, rb = 1.0 / a;
        const int fa = sgn(horner(rev.data(), rev.size(), ra));
        if (fa != 0 && fa != sgn(horner(rev.data(), rev.size(), rb))) {
          const double r = refine_bracket(rev, ra, rb, fa, refine_tol, 200);
          out.push_back(r != 0.0 ? 1.0 / r : 0.0);
        } else {
          out.push_back(0.5 * (a + b));
        }
      } else {
        // straddles |t|=1: plain bisection using safe sign evaluation
        int fa = prev_s;
        for (int it = 0; it < 200 && (b - a) > refine_tol; ++it) {
          const double m = 0.5 * (a + b);
          const int fm = detail::sign_at(c, rev, m);
          if (fm == 0) break;
          if (fm == fa)
            a = m;
          else
            b = m;
        }
        out.push_back(0.5 * (a + b));
      }
    }
    prev_t = t;
    prev_s = s;
  }
  return out;
}

double straighten_kac_inside(double tau) {
  if (!(std::abs(tau) < 1.0))
    throw DomainError("straighten_kac_inside: |tau| must be < 1");
  return std::atanh(tau) / M_PI;
}

double straighten_kac_outside(double tau) {
  if (!(std::abs(tau) > 1.0))
    throw DomainError("straighten_kac_outside: |tau| must be > 1");
  return std::atanh(1.0 / tau) / M_PI;
}

double straighten_so2(double tau, int n) {
  if (n < 1) throw DomainError("straighten_so2: n must be >= 1");
  return std::sqrt(static_cast<double>(n)) * std::atan(tau) / M_PI;
}

}  // namespace zerostats
