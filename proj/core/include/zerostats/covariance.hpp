#pragma once

#include <Eigen/Dense>
#include <vector>

#include "zerostats/ensemble.hpp"

namespace zerostats {

enum class CovFlavor { KacFinite, KacLimit, SO2Finite, SO2Scaled };

// 2m x 2m symmetric covariance of (f(t_1), f'(t_1), ..., f(t_m), f'(t_m))
// (or of the normalized SO2 pair (g, g'/sqrt(n)) in the SO2Finite flavor, or
// of the scaled limit process in SO2Scaled). Fully determines the Gaussian
// densities the correlation integrals are built on.
struct BlockCovariance {
  int m = 0;
  CovFlavor flavor = CovFlavor::KacLimit;
  int n = 0;  // finite flavors only
  std::vector<double> points;
  Eigen::MatrixXd entries;
};

// The three one-point moment sums A(t) = sum sigma_j^2 t^{2j},
// B(t) = sum j sigma_j^2 t^{2j-1}, C(t) = sum j^2 sigma_j^2 t^{2j-2}.
// Closed geometric forms for the Kac profile away from |t| = 1.
struct AbcSums {
  double A, B, C;
};
AbcSums abc_sums(const EnsembleSpec& spec, double t);

// Density of real zeros:  sqrt(AC - B^2) / (pi A).
double density(const EnsembleSpec& spec, double t);

// Limit density 1/(pi |1 - t^2|) of Kac zeros; throws SingularPoint at +-1.
double kac_limit_density(double t);

// Finite-n covariance at m pairwise-distinct points; requires n >= 2m-1.
BlockCovariance finite_covariance(const EnsembleSpec& spec,
                                  const std::vector<double>& points);

// Limit 2x2 block for |t_i|, |t_j| < 1.
Eigen::Matrix2d kac_limit_block(double ti, double tj);

// Limit covariance assembled from kac_limit_block.
BlockCovariance kac_limit_covariance(const std::vector<double>& points);

// Closed-form determinant of the limit covariance:
//   prod_{i<j}(t_i-t_j)^8 / [prod_i (1-t_i^2)^4 prod_{i<j}(1-t_i t_j)^8],
// evaluated in log space.
double kac_det_closed(const std::vector<double>& points);
double kac_log_det_closed(const std::vector<double>& points);

// Closed form of the even-index submatrix of the inverse limit covariance.
Eigen::MatrixXd kac_omega_closed(const std::vector<double>& points);

// Finite-n SO2 covariance of (g(theta_i), g'(theta_i)/sqrt(n)) with
// E g(a)g(b) = cos^n(a-b); requires theta_i - theta_j != 0 mod pi.
BlockCovariance so2_finite_covariance(const std::vector<double>& thetas, int n);

// Scaled-limit SO2 covariance with blocks
//   e^{-pi^2 d^2/2} [[1, pi d], [-pi d, 1 - pi^2 d^2]],  d = s_i - s_j.
BlockCovariance so2_scaled_covariance(const std::vector<double>& s);

// Cholesky with pivot threshold pd_tol * max diagonal; throws NotSymmetric.
bool is_positive_definite(const Eigen::MatrixXd& matrix, double pd_tol = 1e-13);

// Numeric oracles used by the verification suites.
double det_lu(const Eigen::MatrixXd& matrix);           // pivoted LU, long double
Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& m);  // Cholesky solve
double logdet_cholesky(const Eigen::MatrixXd& m);       // throws NotPositiveDefinite

}  // namespace zerostats
