#include "zerostats/gaussmoment.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <thread>
#include <vector>

#include "zerostats/covariance.hpp"
#include "zerostats/errors.hpp"
#include "zerostats/quadrature.hpp"

namespace zerostats {

double abs_moment_2d(double A, double B, double C) {
  if (!(A > 0.0) || !(C > 0.0) || !(A * C - B * B > 0.0))
    throw NotPositiveDefinite("abs_moment_2d: form must be positive definite");
  const double delta = B / std::sqrt(A * C);
  const double one_minus_d2 = (A * C - B * B) / (A * C);  // cancellation-free
  return 4.0 / (A * C - B * B) *
         (1.0 + delta / std::sqrt(one_minus_d2) * std::asin(delta));
}

namespace {

void check_spd_input(const Eigen::MatrixXd& omega) {
  if (omega.rows() != omega.cols())
    throw NotSymmetric("abs_moment_m: matrix not square");
  const double scale = std::max(omega.cwiseAbs().maxCoeff(), 1.0);
  if ((omega - omega.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw NotSymmetric("abs_moment_m: matrix not symmetric");
}

struct Accum {
  double sum = 0.0, sumsq = 0.0;
  long count = 0;
};

Accum mc_worker(const Eigen::MatrixXd& ltr, long pairs, RngStream rng) {
  const int m = static_cast<int>(ltr.rows());
  Accum acc;
  Eigen::VectorXd z(m), y(m);
  for (long i = 0; i < pairs; ++i) {
    for (int k = 0; k < m; ++k) z[k] = rng.gaussian();
    // Y = L^{-T} z  =>  cov(Y) = Omega^{-1}
    y = ltr.triangularView<Eigen::Upper>().solve(z);
    double w = 1.0;
    for (int k = 0; k < m; ++k) w *= y[k];
    w = std::abs(w);
    // antithetic mate -Y contributes the identical value (even integrand),
    // so the pair average is w itself; one pair = one statistical sample
    acc.sum += w;
    acc.sumsq += w * w;
    acc.count += 1;
  }
  return acc;
}

McEstimate mc_moment(const Eigen::MatrixXd& omega, const MomentMethod& method,
                     RngStream& rng) {
  if (method.mc_samples < 10000)
    throw DomainError("abs_moment_m: mc_samples must be >= 1e4");
  const int m = static_cast<int>(omega.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(omega);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("abs_moment_m: matrix not positive definite");
  Eigen::MatrixXd ltr = llt.matrixU();

  const long pairs = method.mc_samples / 2;
  const int workers = std::max(1, method.workers);
  std::vector<Accum> parts(static_cast<size_t>(workers));
  if (workers == 1) {
    parts[0] = mc_worker(ltr, pairs, rng);
  } else {
    // deterministic for fixed (stream state, workers): substreams derived
    // from one draw, fixed trial partition, ordered merge
    const std::uint64_t base = rng.next_u64();
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      const long lo = pairs * w / workers, hi = pairs * (w + 1) / workers;
      threads.emplace_back([&, w, lo, hi]() {
        parts[static_cast<size_t>(w)] =
            mc_worker(ltr, hi - lo, RngStream::derive(base, static_cast<std::uint64_t>(w)));
      });
    }
    for (auto& t : threads) t.join();
  }
  Accum total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sumsq += p.sumsq;
    total.count += p.count;
  }

  const double mean = total.sum / static_cast<double>(total.count);
  const double var =
      std::max(0.0, (total.sumsq - total.sum * mean) / static_cast<double>(total.count - 1));
  const double se_mean = std::sqrt(var / static_cast<double>(total.count));

  double logdet = 0.0;
  for (int i = 0; i < m; ++i) logdet += 2.0 * std::log(ltr(i, i));
  const double norm = std::exp(0.5 * m * std::log(2.0 * M_PI) - 0.5 * logdet);
  return {norm * mean, norm * se_mean, total.count};
}

// Octant decomposition: the integrand is even under Y -> -Y, so
//   I = 2 * sum over sign patterns with sigma_1 = +1 of the [0,R]^m integral
// of prod y_k exp(-(Y, D Omega D Y)/2), D = diag(sigma). Each octant
// integrand is smooth (the |.| kinks lie on the removed coordinate planes).
double quad_moment(const Eigen::MatrixXd& omega, double tol) {
  const int m = static_cast<int>(omega.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(omega);
  const double lmin = es.eigenvalues().minCoeff();
  if (!(lmin > 0.0))
    throw NotPositiveDefinite("abs_moment_m: matrix not positive definite");
  const double teff = std::min(tol, 1e-9);
  const double R = std::sqrt((2.0 * std::log(1.0 / teff) + 60.0) / lmin);
  const double inner_tol = teff * 1e-2;

  double total = 0.0;
  const int patterns = 1 << (m - 1);
  for (int p = 0; p < patterns; ++p) {
    Eigen::VectorXd sg(m);
    sg[0] = 1.0;
    for (int k = 1; k < m; ++k) sg[k] = (p >> (k - 1)) & 1 ? -1.0 : 1.0;
    Eigen::MatrixXd w = sg.asDiagonal() * omega * sg.asDiagonal();
    double part = 0.0;
    if (m == 1) {
      part = integrate([&](double y) { return y * std::exp(-0.5 * w(0, 0) * y * y); },
                       0.0, R, inner_tol);
    } else if (m == 2) {
      part = integrate(
          [&](double y1) {
            const double inner = integrate(
                [&](double y2) {
                  const double q = w(0, 0) * y1 * y1 + 2.0 * w(0, 1) * y1 * y2 +
                                   w(1, 1) * y2 * y2;
                  return y2 * std::exp(-0.5 * q);
                },
                0.0, R, inner_tol, 13);
            return y1 * inner;
          },
          0.0, R, inner_tol, 13);
    } else {
      part = integrate(
          [&](double y1) {
            const double mid = integrate(
                [&](double y2) {
                  const double in = integrate(
                      [&](double y3) {
                        const double q = w(0, 0) * y1 * y1 + w(1, 1) * y2 * y2 +
                                         w(2, 2) * y3 * y3 +
                                         2.0 * (w(0, 1) * y1 * y2 + w(0, 2) * y1 * y3 +
                                                w(1, 2) * y2 * y3);
                        return y3 * std::exp(-0.5 * q);
                      },
                      0.0, R, inner_tol, 10);
                  return y2 * in;
                },
                0.0, R, inner_tol, 10);
            return y1 * mid;
          },
          0.0, R, inner_tol, 10);
    }
    total += part;
  }
  return 2.0 * total;
}

}  // namespace

McEstimate abs_moment_m(const Eigen::MatrixXd& omega, const MomentMethod& method,
                        RngStream& rng) {
  check_spd_input(omega);
  const int m = static_cast<int>(omega.rows());
  if (m < 1) throw DomainError("abs_moment_m: empty matrix");

  switch (method.kind) {
    case MomentKind::ClosedForm2D: {
      if (m != 2)
        throw MethodMismatch("abs_moment_m: ClosedForm2D requires m = 2");
      return {abs_moment_2d(omega(0, 0), omega(0, 1), omega(1, 1)), 0.0, 0};
    }
    case MomentKind::Quadrature: {
      if (method.quad_tol <= 0.0) throw DomainError("abs_moment_m: quad_tol must be > 0");
      if (m > 3)
        throw MethodMismatch("abs_moment_m: Quadrature supports m <= 3");
      if (m == 1) {
        if (!(omega(0, 0) > 0.0))
          throw NotPositiveDefinite("abs_moment_m: matrix not positive definite");
        return {2.0 / omega(0, 0), 0.0, 0};
      }
      return {quad_moment(omega, method.quad_tol), 0.0, 0};
    }
    case MomentKind::MonteCarlo:
      return mc_moment(omega, method, rng);
  }
  throw MethodMismatch("abs_moment_m: unknown method");
}

}  // namespace zerostats
