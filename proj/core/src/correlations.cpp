#include "zerostats/correlations.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "zerostats/covariance.hpp"
#include "zerostats/errors.hpp"
#include "zerostats/quadrature.hpp"

namespace zerostats {

namespace {

void check_distinct(const std::vector<double>& s) {
  for (size_t i = 0; i < s.size(); ++i)
    for (size_t j = i + 1; j < s.size(); ++j)
      if (s[i] == s[j]) throw DegenerateConfig("repeated separation point");
}

// Taylor coefficients in x = u^2 of the four cancellation-prone pieces of the
// SO2 k2 formula, exact rational forms:
//   f1 = -expm1(-u^2) - u^2 e^{-u^2/2}        (leading x^3/24)
//   f2 = e^{-u^2} + u^2 - 1                   (leading x^2/2)
//   f3 = -expm1(-u^2) - u^2 e^{-u^2}          (leading x^2/2)
//   g  = f3 - e^{-u^2/2} f2                   (leading x^3/12)
struct So2Series {
  static constexpr int kOrder = 18;
  std::array<double, kOrder + 1> f1{}, f2{}, f3{}, g{};

  So2Series() {
    std::array<double, kOrder + 1> inv_fact{};
    inv_fact[0] = 1.0;
    for (int k = 1; k <= kOrder; ++k) inv_fact[k] = inv_fact[k - 1] / k;
    for (int k = 2; k <= kOrder; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      f2[k] = sign * inv_fact[k];
      f3[k] = sign * (k - 1) * inv_fact[k];
    }
    for (int k = 3; k <= kOrder; ++k) {
      const double sign = (k % 2 == 0) ? -1.0 : 1.0;
      f1[k] = sign * (inv_fact[k] - std::ldexp(inv_fact[k - 1], 1 - k));
      double conv = 0.0;  // sum_j 2^{-j}/(j! (k-j)!)
      for (int j = 0; j <= k - 2; ++j)
        conv += std::ldexp(inv_fact[j] * inv_fact[k - j], -j);
      g[k] = ((k % 2 == 0) ? 1.0 : -1.0) * ((k - 1) * inv_fact[k] - conv);
    }
  }

  static double eval(const std::array<double, kOrder + 1>& c, double x) {
    double v = 0.0;
    for (int k = kOrder; k >= 2; --k) v = v * x + c[k];
    return v * x * x;
  }
};

double so2_excess_tail(double u2) {
  // k2 - 1 = e^{-u^2} (u^4/2 - 2u^2 + 1) + O(e^{-2u^2} u^8)
  return std::exp(-u2) * (0.5 * u2 * u2 - 2.0 * u2 + 1.0);
}

double so2_k2_core(double u) {
  static const So2Series series;
  const double u2 = u * u;
  if (u2 >= 25.0) return 1.0 + so2_excess_tail(u2);

  const double P = -std::expm1(-u2);
  const double sq_e = std::exp(-0.5 * u2);
  double f1, f2, f3, g;
  if (u < 1.0) {
    const double x = u2;
    f1 = So2Series::eval(series.f1, x);
    f2 = So2Series::eval(series.f2, x);
    f3 = So2Series::eval(series.f3, x);
    g = So2Series::eval(series.g, x);
  } else {
    const double e = sq_e * sq_e;
    f1 = P - u2 * sq_e;
    f2 = e + u2 - 1.0;
    f3 = P - u2 * e;
    g = f3 - sq_e * f2;
  }
  const double det = f1 * (P + u2 * sq_e);
  const double delta = sq_e * f2 / f3;
  const double q2 = g * (f3 + sq_e * f2) / (f3 * f3);  // 1 - delta^2
  const double q = std::sqrt(q2);
  // arcsin(delta) = pi/2 - arcsin(q) keeps precision as delta -> 1
  const double factor =
      delta > 0.7 ? 1.0 + delta * (M_PI_2 - std::asin(q)) / q
                  : 1.0 + delta * std::asin(delta) / q;
  return std::sqrt(det) / P * factor;
}

}  // namespace

double kac_k2(double s) {
  const double u = M_PI * std::abs(s);
  const double th = std::tanh(u);
  const double sech = 1.0 / std::cosh(u);  // underflows cleanly for huge u
  return th * th + th * sech * std::asin(sech);
}

double so2_k2(double s) {
  const double u = M_PI * std::abs(s);
  if (u < 1e-7) return 0.25 * M_PI * u;  // linear law at the origin
  return so2_k2_core(u);
}

double so2_k2_minus_one(double s) {
  const double u = M_PI * std::abs(s);
  if (u * u >= 25.0) return so2_excess_tail(u * u);
  return so2_k2(s) - 1.0;
}

McEstimate kac_km(const std::vector<double>& s, const MomentMethod& method,
                  RngStream& rng) {
  const int m = static_cast<int>(s.size());
  if (m < 1) throw DegenerateConfig("kac_km: need at least one point");
  check_distinct(s);
  Eigen::MatrixXd gamma(m, m);
  double factor = 1.0;
  for (int i = 0; i < m; ++i) {
    gamma(i, i) = 1.0;
    for (int j = i + 1; j < m; ++j) {
      const double u = M_PI * (s[static_cast<size_t>(i)] - s[static_cast<size_t>(j)]);
      gamma(i, j) = gamma(j, i) = 1.0 / std::cosh(u);
      const double t = std::tanh(u);
      factor *= t * t * t * t;
    }
  }
  const McEstimate I = abs_moment_m(gamma, method, rng);
  const double scale = factor * std::exp(-m * std::log(2.0));
  return {scale * I.value, scale * I.stderr_value, I.trials};
}

McEstimate kac_Km_limit(const std::vector<double>& t, const MomentMethod& method,
                        RngStream& rng) {
  const int m = static_cast<int>(t.size());
  if (m < 1) throw DegenerateConfig("kac_Km_limit: need at least one point");
  check_distinct(t);
  for (double x : t)
    if (!(std::abs(x) < 1.0))
      throw DomainError("kac_Km_limit: points must lie in (-1,1)");
  const double logdet = kac_log_det_closed(t);
  const Eigen::MatrixXd omega = kac_omega_closed(t);
  const McEstimate I = abs_moment_m(omega, method, rng);
  const double scale = std::exp(-m * std::log(2.0 * M_PI) - 0.5 * logdet);
  return {scale * I.value, scale * I.stderr_value, I.trials};
}

double kac_K2_closed(double t1, double t2) {
  if (t1 == t2) throw DegenerateConfig("kac_K2_closed: points must be distinct");
  if (!(std::abs(t1) < 1.0) || !(std::abs(t2) < 1.0))
    throw DomainError("kac_K2_closed: points must lie in (-1,1)");
  const double q = 1.0 - t1 * t2;
  const double w1 = 1.0 - t1 * t1, w2 = 1.0 - t2 * t2;
  const double r = std::sqrt(w1 * w2);
  const double arg = std::min(1.0, r / q);
  const double d = t1 - t2;
  return d * d / (M_PI * M_PI * q * q * w1 * w2) +
         std::abs(d) / (M_PI * M_PI * q * q * r) * std::asin(arg);
}

McEstimate so2_km(const std::vector<double>& s, const MomentMethod& method,
                  RngStream& rng) {
  const int m = static_cast<int>(s.size());
  if (m < 1) throw DegenerateConfig("so2_km: need at least one point");
  check_distinct(s);
  const BlockCovariance cov = so2_scaled_covariance(s);
  const double logdet = logdet_cholesky(cov.entries);
  const Eigen::MatrixXd inv = inverse_spd(cov.entries);
  Eigen::MatrixXd omega(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) omega(i, j) = inv(2 * i + 1, 2 * j + 1);
  const McEstimate I = abs_moment_m(omega, method, rng);
  const double scale = std::exp(-m * std::log(2.0) - 0.5 * logdet);
  return {scale * I.value, scale * I.stderr_value, I.trials};
}

double so2_variance_constant(double quad_tol) {
  if (!(quad_tol > 0.0)) throw DomainError("so2_variance_constant: tol must be > 0");
  // truncate where |1 - k2| drops below quad_tol * 1e-3
  const double cutoff = quad_tol * 1e-3;
  double s_hi = 1.5;
  while (s_hi < 12.0 && std::abs(so2_k2_minus_one(s_hi)) > cutoff) s_hi += 0.25;
  const double tol = std::min(quad_tol, 1e-12);
  const double integral = integrate_split(
      [](double s) { return -so2_k2_minus_one(s); },
      {0.0, 0.125, 0.25, 0.5, 1.0, s_hi}, tol, 20);
  return 1.0 - 2.0 * integral;
}

double expected_count(const EnsembleSpec& spec, double a, double b) {
  if (a == b) return 0.0;
  if (!(a < b)) throw DomainError("expected_count: need a <= b");
  const double tha = std::isinf(a) ? -M_PI_2 : std::atan(a);
  const double thb = std::isinf(b) ? M_PI_2 : std::atan(b);
  std::vector<double> knots{tha};
  for (double k : {-M_PI_4, 0.0, M_PI_4})
    if (k > tha && k < thb) knots.push_back(k);
  knots.push_back(thb);
  return integrate_split(
      [&](double th) {
        const double c = std::cos(th);
        return density(spec, std::tan(th)) / (c * c);
      },
      knots, 1e-11, 22);
}

}  // namespace zerostats
