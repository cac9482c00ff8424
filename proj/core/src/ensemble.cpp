#include "zerostats/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zerostats/errors.hpp"

namespace zerostats {

EnsembleSpec::EnsembleSpec(EnsembleKind kind, int degree, std::vector<double> variances)
    : kind_(kind), degree_(degree), variances_(std::move(variances)) {
  if (degree_ < 1) throw DomainError("EnsembleSpec: degree must be >= 1");
  if (static_cast<int>(variances_.size()) != degree_ + 1)
    throw DomainError("EnsembleSpec: need degree+1 variances");
  for (double v : variances_) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("EnsembleSpec: variances must be positive and finite");
  }
}

EnsembleSpec EnsembleSpec::kac(int degree) {
  return EnsembleSpec(EnsembleKind::Kac, degree,
                      std::vector<double>(static_cast<size_t>(degree) + 1, 1.0));
}

EnsembleSpec EnsembleSpec::so2(int degree) {
  std::vector<double> v(static_cast<size_t>(degree) + 1);
  for (int j = 0; j <= degree; ++j) v[static_cast<size_t>(j)] = binomial(degree, j);
  return EnsembleSpec(EnsembleKind::SO2, degree, std::move(v));
}

EnsembleSpec EnsembleSpec::custom(std::vector<double> variances) {
  if (variances.size() < 2) throw DomainError("EnsembleSpec: need at least degree 1");
  const int degree = static_cast<int>(variances.size()) - 1;
  return EnsembleSpec(EnsembleKind::Custom, degree, std::move(variances));
}

bool EnsembleSpec::palindromic_profile(double rel_tol) const {
  const auto& v = variances_;
  const size_t n = v.size();
  for (size_t j = 0; j < n; ++j) {
    const double a = v[j], b = v[n - 1 - j];
    if (std::abs(a - b) > rel_tol * std::max(std::abs(a), std::abs(b))) return false;
  }
  return true;
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) throw DomainError("log_binomial: k out of range");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) throw DomainError("binomial: k out of range");
  if (n <= 60) {
    // exact in 64-bit integers up to n=60
    k = std::min(k, n - k);
    std::uint64_t num = 1, den = 1;
    for (int i = 1; i <= k; ++i) {
      num *= static_cast<std::uint64_t>(n - k + i);
      den *= static_cast<std::uint64_t>(i);
      const std::uint64_t g = std::__gcd(num, den);
      num /= g;
      den /= g;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  }
  return std::exp(log_binomial(n, k));
}

std::vector<double> sample_coefficients(const EnsembleSpec& spec, RngStream& rng) {
  const auto& var = spec.variances();
  std::vector<double> c(var.size());
  for (size_t j = 0; j < var.size(); ++j) c[j] = std::sqrt(var[j]) * rng.gaussian();
  return c;
}

std::pair<double, double> evaluate_with_derivative(const std::vector<double>& coeffs,
                                                   double t) {
  if (coeffs.empty()) throw DegenerateInput("evaluate_with_derivative: empty coefficients");
  double f = 0.0, df = 0.0;
  for (size_t i = coeffs.size(); i-- > 0;) {
    df = df * t + f;
    f = f * t + coeffs[i];
  }
  return {f, df};
}

std::vector<double> reversed_polynomial(std::vector<double> coeffs) {
  std::reverse(coeffs.begin(), coeffs.end());
  return coeffs;
}

}  // namespace zerostats
