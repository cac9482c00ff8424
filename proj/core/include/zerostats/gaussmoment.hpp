#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "zerostats/rng.hpp"

namespace zerostats {

enum class MomentKind { ClosedForm2D, Quadrature, MonteCarlo };

struct MomentMethod {
  MomentKind kind = MomentKind::MonteCarlo;
  long mc_samples = 200000;  // total draws; antithetic pairs share one draw
  double quad_tol = 1e-9;
  int workers = 1;
};

// (value, standard error, trial count) for any Monte-Carlo quantity;
// deterministic paths carry stderr 0.
struct McEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
  long trials = 0;
};

// Closed form of the absolute 2D Gaussian moment
//   int int |y1 y2| exp(-(A y1^2 + 2 B y1 y2 + C y2^2)/2) dy1 dy2
//     = 4/(AC - B^2) (1 + delta arcsin(delta)/sqrt(1-delta^2)),
//   delta = B/sqrt(AC).
double abs_moment_2d(double A, double B, double C);

// I(Omega) = int |y_1 ... y_m| exp(-(Y, Omega Y)/2) dY for symmetric
// positive-definite Omega. MonteCarlo samples Y from N(0, Omega^{-1}) via
// Cholesky, with antithetic +-Y pairing; Quadrature (m <= 3) integrates
// octant-by-octant over a truncated box; ClosedForm2D requires m = 2.
McEstimate abs_moment_m(const Eigen::MatrixXd& omega, const MomentMethod& method,
                        RngStream& rng);

}  // namespace zerostats
