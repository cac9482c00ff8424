#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "zerostats/rng.hpp"

namespace zerostats {

enum class EnsembleKind { Kac, SO2, Custom };

// A Gaussian random-polynomial ensemble: degree n plus the variance profile
// sigma_j^2 of the independent zero-mean normal coefficients. The profile is
// materialized for every kind so named and custom ensembles share all
// downstream code paths.
class EnsembleSpec {
 public:
  static EnsembleSpec kac(int degree);
  static EnsembleSpec so2(int degree);
  static EnsembleSpec custom(std::vector<double> variances);

  EnsembleKind kind() const { return kind_; }
  int degree() const { return degree_; }
  const std::vector<double>& variances() const { return variances_; }

  // True when sigma_j^2 == sigma_{n-j}^2 for all j; holds for Kac and SO2,
  // and makes the coefficient vector reversal-invariant in distribution.
  bool palindromic_profile(double rel_tol = 1e-12) const;

 private:
  EnsembleSpec(EnsembleKind kind, int degree, std::vector<double> variances);

  EnsembleKind kind_;
  int degree_;
  std::vector<double> variances_;
};

// Binomial coefficient as a double; exact integer arithmetic for n <= 60,
// log-gamma above that (SO2 experiments want n up to ~1e4).
double binomial(int n, int k);
double log_binomial(int n, int k);

// One independent N(0, sigma_j^2) draw per coefficient.
std::vector<double> sample_coefficients(const EnsembleSpec& spec, RngStream& rng);

// Fused Horner pass returning (f(t), f'(t)). Coefficients ascending.
std::pair<double, double> evaluate_with_derivative(const std::vector<double>& coeffs,
                                                   double t);

// Coefficient list in reversed order; nonzero roots map to reciprocals.
std::vector<double> reversed_polynomial(std::vector<double> coeffs);

// One coefficient draw together with its extracted, sorted real roots
// (roots filled in by the roots module).
struct PolySample {
  std::vector<double> coefficients;
  std::vector<double> real_roots;
};

}  // namespace zerostats
