#pragma once

#include <vector>

#include "zerostats/ensemble.hpp"
#include "zerostats/gaussmoment.hpp"
#include "zerostats/rng.hpp"

namespace zerostats {

enum class CurveEnsemble { Kac, SO2 };
enum class CurveSource { ClosedForm, MomentIntegral, MonteCarlo };

// A two-point correlation curve on a grid of separations, exact or estimated.
struct CorrelationCurve {
  std::vector<double> separations;
  std::vector<double> values;
  std::vector<double> stderrs;  // empty for exact curves
  CurveEnsemble ensemble = CurveEnsemble::Kac;
  CurveSource source = CurveSource::ClosedForm;
};

// Limit two-point correlation of straightened Kac zeros,
//   k2(s) = tanh^2(pi s) + |tanh(pi s)| sech(pi s) arcsin(sech(pi s)).
double kac_k2(double s);

// Limit m-point correlation of straightened Kac zeros via the sech-kernel
// moment integral. The |y| weight rescaling leaves a residual
// prod_{i<j} tanh^4 pi(s_i - s_j) in front of 2^{-m} I(Gamma_m).
McEstimate kac_km(const std::vector<double>& s, const MomentMethod& method,
                  RngStream& rng);

// Limit m-point correlation K_m of raw Kac zeros at points in (-1,1),
// assembled from the closed determinant and inverse-submatrix forms.
McEstimate kac_Km_limit(const std::vector<double>& t, const MomentMethod& method,
                        RngStream& rng);

// Closed form of K_2(t1, t2).
double kac_K2_closed(double t1, double t2);

// Limit two-point correlation of straightened SO2 zeros. Evaluated through
// cancellation-free factorizations (series below u = pi|s| < 1, expm1-based
// forms above, asymptotic expansion once e^{-u^2} is below double noise).
double so2_k2(double s);

// k2(s) - 1 at full relative precision in the tail (where k2 rounds to 1).
double so2_k2_minus_one(double s);

// Limit m-point correlation of straightened SO2 zeros via the scaled
// covariance, its inverse's even-index submatrix and the moment integral.
McEstimate so2_km(const std::vector<double>& s, const MomentMethod& method,
                  RngStream& rng);

// The count-variance constant C = 1 - int_R (1 - k2(0,s)) ds.
double so2_variance_constant(double quad_tol = 1e-10);

// E xi(a,b) = int_a^b density; a = -inf / b = +inf allowed.
double expected_count(const EnsembleSpec& spec, double a, double b);

}  // namespace zerostats
