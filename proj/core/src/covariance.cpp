#include "zerostats/covariance.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "zerostats/errors.hpp"

namespace zerostats {

namespace {

constexpr double kGeomGuard = 1e-6;  // |1 - t_i t_j| below this: direct sums

void check_distinct(const std::vector<double>& pts) {
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      if (pts[i] == pts[j]) throw DegenerateConfig("repeated evaluation point");
}

// Moment sums of a variance profile at x = t_i t_j:
//   G = sum sigma_k^2 x^k, Gp = G', Gpp = G''.
struct GSums {
  double G, Gp, Gpp;
};

GSums direct_gsums(const std::vector<double>& var, double x) {
  double g = 0.0, gp = 0.0, gpp = 0.0;
  for (size_t k = var.size(); k-- > 0;) g = g * x + var[k];
  for (size_t k = var.size(); k-- > 1;) gp = gp * x + var[k] * static_cast<double>(k);
  for (size_t k = var.size(); k-- > 2;)
    gpp = gpp * x + var[k] * static_cast<double>(k) * static_cast<double>(k - 1);
  return {g, gp, gpp};
}

GSums kac_gsums(int n, double x) {
  if (std::abs(1.0 - x) < kGeomGuard) {
    return direct_gsums(std::vector<double>(static_cast<size_t>(n) + 1, 1.0), x);
  }
  const double nn = static_cast<double>(n);
  const double np1 = nn + 1.0;
  const double xnm1 = std::pow(x, n - 1);  // x^{n-1}
  const double xn = xnm1 * x;
  const double xn1 = xn * x;
  const double om = 1.0 - x;
  const double u = 1.0 - np1 * xn + nn * xn1;
  const double G = (1.0 - xn1) / om;
  const double Gp = u / (om * om);
  const double Gpp = (-nn * np1 * xnm1 * om * om + 2.0 * u) / (om * om * om);
  return {G, Gp, Gpp};
}

GSums gsums(const EnsembleSpec& spec, double x) {
  if (spec.kind() == EnsembleKind::Kac) return kac_gsums(spec.degree(), x);
  return direct_gsums(spec.variances(), x);
}

}  // namespace

AbcSums abc_sums(const EnsembleSpec& spec, double t) {
  const auto s = gsums(spec, t * t);
  return {s.G, t * s.Gp, s.Gp + t * t * s.Gpp};
}

double density(const EnsembleSpec& spec, double t) {
  if (spec.kind() == EnsembleKind::SO2) {
    // exact for all n and t
    return std::sqrt(static_cast<double>(spec.degree())) / (M_PI * (1.0 + t * t));
  }
  if (std::abs(t) > 1.0 && spec.palindromic_profile()) {
    // reversal invariance: p(t) = p(1/t)/t^2; keeps the sums in |t| <= 1
    return density(spec, 1.0 / t) / (t * t);
  }
  if (std::abs(t) > 1.0) {
    EnsembleSpec rev = EnsembleSpec::custom(
        std::vector<double>(spec.variances().rbegin(), spec.variances().rend()));
    return density(rev, 1.0 / t) / (t * t);
  }
  const auto [A, B, C] = abc_sums(spec, t);
  const double disc = std::max(0.0, A * C - B * B);
  return std::sqrt(disc) / (M_PI * A);
}

double kac_limit_density(double t) {
  const double d = 1.0 - t * t;
  if (d == 0.0) throw SingularPoint("kac_limit_density: pole at t = +-1");
  return 1.0 / (M_PI * std::abs(d));
}

BlockCovariance finite_covariance(const EnsembleSpec& spec,
                                  const std::vector<double>& points) {
  const int m = static_cast<int>(points.size());
  if (m < 1) throw DegenerateConfig("finite_covariance: need at least one point");
  check_distinct(points);
  if (spec.degree() < 2 * m - 1)
    throw DegenerateConfig("finite_covariance: need n >= 2m-1");

  BlockCovariance out;
  out.m = m;
  out.flavor = spec.kind() == EnsembleKind::SO2 ? CovFlavor::SO2Finite
                                                : CovFlavor::KacFinite;
  out.n = spec.degree();
  out.points = points;
  out.entries.resize(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double ti = points[static_cast<size_t>(i)];
      const double tj = points[static_cast<size_t>(j)];
      const auto s = gsums(spec, ti * tj);
      const double ff = s.G;
      const double f_df = ti * s.Gp;   // E f(t_i) f'(t_j)
      const double df_f = tj * s.Gp;   // E f'(t_i) f(t_j)
      const double dfdf = s.Gp + ti * tj * s.Gpp;
      out.entries(2 * i, 2 * j) = ff;
      out.entries(2 * i, 2 * j + 1) = f_df;
      out.entries(2 * i + 1, 2 * j) = df_f;
      out.entries(2 * i + 1, 2 * j + 1) = dfdf;
      if (j != i) {
        out.entries(2 * j, 2 * i) = ff;
        out.entries(2 * j, 2 * i + 1) = df_f;
        out.entries(2 * j + 1, 2 * i) = f_df;
        out.entries(2 * j + 1, 2 * i + 1) = dfdf;
      }
    }
  }
  return out;
}

Eigen::Matrix2d kac_limit_block(double ti, double tj) {
  if (!(std::abs(ti) < 1.0) || !(std::abs(tj) < 1.0))
    throw DomainError("kac_limit_block: points must lie in (-1,1)");
  const double x = ti * tj;
  const double om = 1.0 - x;
  Eigen::Matrix2d b;
  b(0, 0) = 1.0 / om;
  b(0, 1) = ti / (om * om);
  b(1, 0) = tj / (om * om);
  b(1, 1) = (1.0 + x) / (om * om * om);
  return b;
}

BlockCovariance kac_limit_covariance(const std::vector<double>& points) {
  const int m = static_cast<int>(points.size());
  if (m < 1) throw DegenerateConfig("kac_limit_covariance: need at least one point");
  check_distinct(points);
  BlockCovariance out;
  out.m = m;
  out.flavor = CovFlavor::KacLimit;
  out.points = points;
  out.entries.resize(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      out.entries.block<2, 2>(2 * i, 2 * j) =
          kac_limit_block(points[static_cast<size_t>(i)], points[static_cast<size_t>(j)]);
  return out;
}

double kac_log_det_closed(const std::vector<double>& points) {
  const int m = static_cast<int>(points.size());
  check_distinct(points);
  double log_num = 0.0, log_den = 0.0;
  for (int i = 0; i < m; ++i) {
    const double ti = points[static_cast<size_t>(i)];
    if (!(std::abs(ti) < 1.0))
      throw DomainError("kac_det_closed: points must lie in (-1,1)");
    log_den += 4.0 * std::log(1.0 - ti * ti);
    for (int j = i + 1; j < m; ++j) {
      const double tj = points[static_cast<size_t>(j)];
      log_num += 8.0 * std::log(std::abs(ti - tj));
      log_den += 8.0 * std::log(1.0 - ti * tj);
    }
  }
  return log_num - log_den;
}

double kac_det_closed(const std::vector<double>& points) {
  return std::exp(kac_log_det_closed(points));
}

Eigen::MatrixXd kac_omega_closed(const std::vector<double>& points) {
  const int m = static_cast<int>(points.size());
  check_distinct(points);
  for (double t : points)
    if (!(std::abs(t) < 1.0))
      throw DomainError("kac_omega_closed: points must lie in (-1,1)");
  Eigen::MatrixXd w(m, m);
  for (int i = 0; i < m; ++i) {
    const double ti = points[static_cast<size_t>(i)];
    double lg = 3.0 * std::log(1.0 - ti * ti);
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double tj = points[static_cast<size_t>(j)];
      lg += 4.0 * std::log(1.0 - ti * tj) - 4.0 * std::log(std::abs(ti - tj));
    }
    w(i, i) = std::exp(lg);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const double ti = points[static_cast<size_t>(i)];
      const double tj = points[static_cast<size_t>(j)];
      double lg = 2.0 * std::log(1.0 - ti * ti) + 2.0 * std::log(1.0 - tj * tj) -
                  std::log(1.0 - ti * tj);
      for (int k = 0; k < m; ++k) {
        const double tk = points[static_cast<size_t>(k)];
        if (k != i)
          lg += 2.0 * std::log(1.0 - ti * tk) - 2.0 * std::log(std::abs(ti - tk));
        if (k != j)
          lg += 2.0 * std::log(1.0 - tj * tk) - 2.0 * std::log(std::abs(tj - tk));
      }
      w(i, j) = std::exp(lg);
    }
  }
  return w;
}

BlockCovariance so2_finite_covariance(const std::vector<double>& thetas, int n) {
  const int m = static_cast<int>(thetas.size());
  if (m < 1) throw DegenerateConfig("so2_finite_covariance: need at least one point");
  if (n < 2 * m - 1) throw DegenerateConfig("so2_finite_covariance: need n >= 2m-1");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double d = thetas[static_cast<size_t>(i)] - thetas[static_cast<size_t>(j)];
      if (std::abs(std::remainder(d, M_PI)) < 1e-14)
        throw DegenerateConfig("so2_finite_covariance: theta_i - theta_j = 0 mod pi");
    }

  BlockCovariance out;
  out.m = m;
  out.flavor = CovFlavor::SO2Finite;
  out.n = n;
  out.points = thetas;
  out.entries.resize(2 * m, 2 * m);
  const double sn = std::sqrt(static_cast<double>(n));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) {
        out.entries.block<2, 2>(2 * i, 2 * j) = Eigen::Matrix2d::Identity();
        continue;
      }
      const double d = thetas[static_cast<size_t>(i)] - thetas[static_cast<size_t>(j)];
      const double cn = std::pow(std::cos(d), n);
      const double tn = std::tan(d);
      Eigen::Matrix2d b;
      b(0, 0) = 1.0;
      b(0, 1) = sn * tn;
      b(1, 0) = -sn * tn;
      b(1, 1) = -static_cast<double>(n) * tn * tn + 1.0 / (std::cos(d) * std::cos(d));
      out.entries.block<2, 2>(2 * i, 2 * j) = cn * b;
    }
  }
  return out;
}

BlockCovariance so2_scaled_covariance(const std::vector<double>& s) {
  const int m = static_cast<int>(s.size());
  if (m < 1) throw DegenerateConfig("so2_scaled_covariance: need at least one point");
  check_distinct(s);
  BlockCovariance out;
  out.m = m;
  out.flavor = CovFlavor::SO2Scaled;
  out.points = s;
  out.entries.resize(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double u = M_PI * (s[static_cast<size_t>(i)] - s[static_cast<size_t>(j)]);
      const double e = std::exp(-0.5 * u * u);
      Eigen::Matrix2d b;
      b(0, 0) = 1.0;
      b(0, 1) = u;
      b(1, 0) = -u;
      b(1, 1) = 1.0 - u * u;
      out.entries.block<2, 2>(2 * i, 2 * j) = e * b;
    }
  }
  return out;
}

bool is_positive_definite(const Eigen::MatrixXd& matrix, double pd_tol) {
  if (matrix.rows() != matrix.cols())
    throw NotSymmetric("is_positive_definite: matrix not square");
  const double scale = matrix.cwiseAbs().maxCoeff();
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
    throw NotSymmetric("is_positive_definite: matrix not symmetric");

  const Eigen::Index n = matrix.rows();
  Eigen::MatrixXd a = matrix;
  const double floor_pivot = pd_tol * matrix.diagonal().maxCoeff();
  for (Eigen::Index k = 0; k < n; ++k) {
    double pivot = a(k, k);
    for (Eigen::Index j = 0; j < k; ++j) pivot -= a(k, j) * a(k, j);
    if (!(pivot > floor_pivot)) return false;
    const double l = std::sqrt(pivot);
    a(k, k) = l;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      double v = a(i, k);
      for (Eigen::Index j = 0; j < k; ++j) v -= a(i, j) * a(k, j);
      a(i, k) = v / l;
    }
  }
  return true;
}

double det_lu(const Eigen::MatrixXd& matrix) {
  using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  MatrixXld m = matrix.cast<long double>();
  Eigen::PartialPivLU<MatrixXld> lu(m);
  return static_cast<double>(lu.determinant());
}

Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("inverse_spd: Cholesky failed");
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

double logdet_cholesky(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("logdet_cholesky: Cholesky failed");
  const auto& L = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::log(L(i, i));
  return 2.0 * s;
}

}  // namespace zerostats
