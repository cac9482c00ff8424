// zerostats: exact and Monte-Carlo statistics of real zeros of Gaussian
// random polynomials (Kac and SO2 ensembles). Emits CSV with '#' metadata
// lines; exit codes: 0 ok, 1 verification failure, 2 bad flags, 3 not enough
// statistics.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "zerostats/correlations.hpp"
#include "zerostats/covariance.hpp"
#include "zerostats/errors.hpp"
#include "zerostats/gaussmoment.hpp"
#include "zerostats/montecarlo.hpp"
#include "zerostats/roots.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;

  void open(const std::string& path) {
    if (path.empty()) return;
    file = std::make_unique<std::ofstream>(path);
    if (!file->good()) throw zerostats::DomainError("cannot open output file: " + path);
    os = file.get();
  }
  template <typename T>
  Output& operator<<(const T& v) {
    *os << v;
    return *this;
  }
};

void write_meta(Output& out, const std::string& cmd, std::uint64_t seed, int workers) {
  out << "# zerostats " << kVersion << "\n";
  out << "# command: " << cmd << "\n";
  out << "# seed: " << seed << " workers: " << workers << "\n";
}

zerostats::EnsembleSpec make_spec(const std::string& name, int n) {
  if (name == "kac") return zerostats::EnsembleSpec::kac(n);
  if (name == "so2") return zerostats::EnsembleSpec::so2(n);
  throw zerostats::DomainError("unknown ensemble: " + name);
}

int run_density(const std::string& ensemble, int n, double tmin, double tmax,
                int steps, bool mc, long trials, std::uint64_t seed, int workers,
                const std::string& outpath, const std::string& cmdline) {
  if (steps <= 0 || !(tmin < tmax)) return 2;
  auto spec = make_spec(ensemble, n);
  Output out;
  out.open(outpath);
  write_meta(out, cmdline, seed, workers);
  const double w = (tmax - tmin) / steps;
  std::vector<double> centers(static_cast<size_t>(steps));
  for (int i = 0; i < steps; ++i) centers[static_cast<size_t>(i)] = tmin + (i + 0.5) * w;

  std::vector<std::pair<double, zerostats::McEstimate>> est;
  if (mc) {
    zerostats::McConfig cfg;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.bin_width = w;
    est = zerostats::estimate_density(spec, centers, cfg);
  }
  out << (mc ? "t,exact_density,mc_estimate,mc_stderr\n" : "t,exact_density\n");
  for (int i = 0; i < steps; ++i) {
    const double t = centers[static_cast<size_t>(i)];
    out << fmt(t) << "," << fmt(zerostats::density(spec, t));
    if (mc)
      out << "," << fmt(est[static_cast<size_t>(i)].second.value) << ","
          << fmt(est[static_cast<size_t>(i)].second.stderr_value);
    out << "\n";
  }
  return 0;
}

int run_k2(const std::string& ensemble, double smax, double step, bool mc, int n,
           long trials, double window, double bin, std::uint64_t seed, int workers,
           const std::string& outpath, const std::string& cmdline) {
  if (!(step > 0.0) || step > smax) return 2;
  Output out;
  out.open(outpath);
  write_meta(out, cmdline, seed, workers);
  const bool so2 = ensemble == "so2";
  if (!so2 && ensemble != "kac") return 2;

  auto exact = [&](double s) { return so2 ? zerostats::so2_k2(s) : zerostats::kac_k2(s); };
  if (!mc) {
    out << "s,k2_exact\n";
    for (double s = step; s <= smax + 1e-12; s += step)
      out << fmt(s) << "," << fmt(exact(s)) << "\n";
    return 0;
  }
  auto spec = make_spec(ensemble, n);
  zerostats::McConfig cfg;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.workers = workers;
  cfg.bin_width = bin > 0 ? bin : step;
  cfg.central_window = window;
  cfg.smax = smax;
  const auto curve = zerostats::estimate_k2(
      spec, so2 ? zerostats::Straightening::SO2 : zerostats::Straightening::KacInside, cfg);
  out << "s,k2_exact,k2_mc,stderr\n";
  for (size_t i = 0; i < curve.separations.size(); ++i) {
    const double s = curve.separations[i];
    out << fmt(s) << "," << fmt(exact(s)) << "," << fmt(curve.values[i]) << ","
        << fmt(curve.stderrs[i]) << "\n";
  }
  return 0;
}

int run_km(const std::string& ensemble, const std::vector<double>& points,
           const std::string& method, long samples, std::uint64_t seed, int workers,
           const std::string& outpath, const std::string& cmdline) {
  if (points.empty()) return 2;
  Output out;
  out.open(outpath);
  write_meta(out, cmdline, seed, workers);
  zerostats::MomentMethod mm;
  if (method == "mc") {
    mm.kind = zerostats::MomentKind::MonteCarlo;
    mm.mc_samples = samples;
    mm.workers = workers;
  } else if (method == "quad") {
    mm.kind = zerostats::MomentKind::Quadrature;
  } else if (method == "closed") {
    mm.kind = zerostats::MomentKind::ClosedForm2D;
  } else {
    return 2;
  }
  zerostats::RngStream rng(seed);
  const auto est = ensemble == "so2" ? zerostats::so2_km(points, mm, rng)
                                     : zerostats::kac_km(points, mm, rng);
  out << "value,stderr\n";
  out << fmt(est.value) << "," << fmt(est.stderr_value) << "\n";
  return 0;
}

struct VerifyRow {
  std::string id;
  double err;
  double tol;
  bool pass;
};

void det_omega_suite(bool det, int m_max, long trials, std::uint64_t seed, double tol,
                     std::vector<VerifyRow>& rows) {
  zerostats::RngStream rng(seed);
  for (int m = 1; m <= m_max; ++m) {
    double worst = 0.0;
    for (long t = 0; t < trials; ++t) {
      std::vector<double> pts;
      int guard = 0;
      while (static_cast<int>(pts.size()) < m && guard < 100000) {
        ++guard;
        const double x = 0.9 * rng.uniform_pm1();
        bool ok = true;
        for (double p : pts)
          if (std::abs(p - x) < 0.15) ok = false;
        if (ok) pts.push_back(x);
      }
      const auto cov = zerostats::kac_limit_covariance(pts);
      if (det) {
        const double closed = zerostats::kac_det_closed(pts);
        const double numeric = zerostats::det_lu(cov.entries);
        worst = std::max(worst, std::abs(closed - numeric) / std::abs(closed));
      } else {
        const auto closed = zerostats::kac_omega_closed(pts);
        const auto inv = zerostats::inverse_spd(cov.entries);
        double scale = closed.cwiseAbs().maxCoeff();
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            worst = std::max(worst,
                             std::abs(closed(i, j) - inv(2 * i + 1, 2 * j + 1)) / scale);
      }
    }
    rows.push_back({(det ? "det_m" : "omega_m") + std::to_string(m), worst, tol,
                    worst <= tol});
  }
}

void moment_suite(long trials, std::uint64_t seed, double tol,
                  std::vector<VerifyRow>& rows) {
  zerostats::RngStream rng(seed);
  zerostats::MomentMethod quad;
  quad.kind = zerostats::MomentKind::Quadrature;
  quad.quad_tol = 1e-9;
  double worst = 0.0;
  for (long t = 0; t < trials; ++t) {
    const double A = 0.5 + 2.5 * rng.uniform01();
    const double C = 0.5 + 2.5 * rng.uniform01();
    const double B = 0.95 * rng.uniform_pm1() * std::sqrt(A * C);
    const double closed = zerostats::abs_moment_2d(A, B, C);
    Eigen::MatrixXd om(2, 2);
    om << A, B, B, C;
    const double numeric = zerostats::abs_moment_m(om, quad, rng).value;
    worst = std::max(worst, std::abs(closed - numeric) / closed);
  }
  rows.push_back({"moment_2d", worst, tol, worst <= tol});
}

void asymptotics_suite(std::vector<VerifyRow>& rows) {
  // small-s slopes fitted through the origin on a small-separation grid
  auto fitted_slope = [](auto&& f) {
    double num = 0.0, den = 0.0;
    for (double s = 2e-4; s <= 2e-3; s += 2e-4) {
      num += f(s) * s;
      den += s * s;
    }
    return num / den;
  };
  const double kac_slope = fitted_slope(zerostats::kac_k2);
  const double kac_target = M_PI * M_PI / 2.0;
  double err = std::abs(kac_slope - kac_target) / kac_target;
  rows.push_back({"kac_k2_slope", err, 5e-3, err <= 5e-3});

  const double so2_slope = fitted_slope(zerostats::so2_k2);
  const double so2_target = M_PI * M_PI / 4.0;
  err = std::abs(so2_slope - so2_target) / so2_target;
  rows.push_back({"so2_k2_slope", err, 5e-3, err <= 5e-3});

  const double kac_tail =
      (1.0 - zerostats::kac_k2(1.5)) / ((16.0 / 3.0) * std::exp(-4.0 * M_PI * 1.5));
  err = std::abs(kac_tail - 1.0);
  rows.push_back({"kac_k2_tail", err, 0.05, err <= 0.05});

  const double u = M_PI * 2.5;
  const double so2_tail = zerostats::so2_k2_minus_one(2.5) /
                          (0.5 * std::pow(u, 4) * std::exp(-u * u));
  err = std::abs(so2_tail - 1.0);
  rows.push_back({"so2_k2_tail", err, 0.1, err <= 0.1});
}

void positivity_suite(long trials, std::uint64_t seed, std::vector<VerifyRow>& rows) {
  zerostats::RngStream rng(seed);
  long bad = 0;
  for (long t = 0; t < trials; ++t) {
    const int m = 1 + static_cast<int>(rng.uniform01() * 5.0);
    std::vector<double> pts;
    while (static_cast<int>(pts.size()) < m) {
      const double x = 0.95 * rng.uniform_pm1();
      bool ok = true;
      for (double p : pts)
        if (std::abs(p - x) < 1e-3) ok = false;
      if (ok) pts.push_back(x);
    }
    const int n = 2 * m - 1 + static_cast<int>(rng.uniform01() * 40.0);
    const auto spec = zerostats::EnsembleSpec::kac(n);
    if (!zerostats::is_positive_definite(zerostats::finite_covariance(spec, pts).entries))
      ++bad;
  }
  rows.push_back({"positivity_finite", static_cast<double>(bad), 0.0, bad == 0});

  bad = 0;
  for (long t = 0; t < trials; ++t) {
    const int m = 1 + static_cast<int>(rng.uniform01() * 5.0);
    std::vector<double> s;
    while (static_cast<int>(s.size()) < m) {
      const double x = 6.0 * rng.uniform_pm1();
      bool ok = true;
      for (double p : s)
        if (std::abs(p - x) < 1e-3) ok = false;
      if (ok) s.push_back(x);
    }
    if (!zerostats::is_positive_definite(zerostats::so2_scaled_covariance(s).entries))
      ++bad;
  }
  rows.push_back({"positivity_so2_scaled", static_cast<double>(bad), 0.0, bad == 0});

  // precondition control: a repeated point must be rejected
  bool rejected = false;
  try {
    zerostats::so2_scaled_covariance({0.5, 0.5});
  } catch (const zerostats::DegenerateConfig&) {
    rejected = true;
  }
  rows.push_back({"positivity_precondition", rejected ? 0.0 : 1.0, 0.0, rejected});
}

int run_verify(const std::string& suite, int m_max, long trials, std::uint64_t seed,
               double tol, const std::string& outpath, const std::string& cmdline) {
  if (!(tol > 0.0) || m_max < 1 || trials < 1) return 2;
  if (suite != "det" && suite != "omega" && suite != "moment" &&
      suite != "asymptotics" && suite != "positivity" && suite != "all")
    return 2;
  std::vector<VerifyRow> rows;
  if (suite == "det" || suite == "all") det_omega_suite(true, m_max, trials, seed, tol, rows);
  if (suite == "omega" || suite == "all")
    det_omega_suite(false, m_max, trials, seed + 1, tol, rows);
  if (suite == "moment" || suite == "all")
    moment_suite(std::min<long>(trials, 200), seed + 2, std::max(tol, 1e-7), rows);
  if (suite == "asymptotics" || suite == "all") asymptotics_suite(rows);
  if (suite == "positivity" || suite == "all") positivity_suite(trials, seed + 3, rows);

  Output out;
  out.open(outpath);
  write_meta(out, cmdline, seed, 1);
  out << "check_id,max_rel_err,tol,pass\n";
  bool all_pass = true;
  for (const auto& r : rows) {
    out << r.id << "," << fmt(r.err) << "," << fmt(r.tol) << ","
        << (r.pass ? "1" : "0") << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

int run_variance(const std::string& ensemble, int n, double a, double b, long trials,
                 std::uint64_t seed, int workers, const std::string& outpath,
                 const std::string& cmdline) {
  if (!(a < b)) return 2;
  auto spec = make_spec(ensemble, n);
  zerostats::McConfig cfg;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.workers = workers;
  const auto st = zerostats::estimate_count_variance(spec, a, b, cfg);
  const double predicted_mean = zerostats::expected_count(spec, a, b);
  double predicted_var;
  if (ensemble == "so2") {
    const double lo = std::isinf(a) ? -M_PI_2 : std::atan(a);
    const double hi = std::isinf(b) ? M_PI_2 : std::atan(b);
    predicted_var = zerostats::so2_variance_constant() *
                    std::sqrt(static_cast<double>(n)) * (hi - lo) / M_PI;
  } else {
    // full-line asymptotic law for the unit-variance ensemble
    predicted_var = (4.0 / M_PI) * (1.0 - 2.0 / M_PI) * std::log(static_cast<double>(n));
  }
  Output out;
  out.open(outpath);
  write_meta(out, cmdline, seed, workers);
  out << "mean,variance,predicted_mean,predicted_variance\n";
  out << fmt(st.mean) << "," << fmt(st.variance) << "," << fmt(predicted_mean) << ","
      << fmt(predicted_var) << "\n";
  return 0;
}

int run_const_c(double tol, const std::string& outpath, const std::string& cmdline) {
  if (!(tol > 0.0)) return 2;
  Output out;
  out.open(outpath);
  write_meta(out, cmdline, 0, 1);
  out << "C\n" << fmt(zerostats::so2_variance_constant(tol)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statistics of real zeros of Gaussian random polynomials"};
  app.require_subcommand(1);
  app.set_config("--config");

  std::string cmdline;
  for (int i = 0; i < argc; ++i) {
    if (i) cmdline += ' ';
    cmdline += argv[i];
  }

  std::string ensemble = "kac", outpath, method = "mc", suite = "all";
  int n = 100, steps = 200, m_max = 5, workers = 1;
  long trials = 10000, samples = 200000;
  double tmin = -3.0, tmax = 3.0, smax = 2.0, step = 0.01, a = -1.0, b = 1.0;
  double tol = 1e-8, window = 0.0, bin = 0.0;
  std::uint64_t seed = 1;
  bool mc = false;
  std::vector<double> points;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", outpath, "output path (default stdout)");
    c->add_option("--seed", seed, "random seed");
    c->add_option("--workers", workers, "worker threads");
  };

  auto* cd = app.add_subcommand("density", "density of real zeros on a t-grid");
  cd->add_option("--ensemble", ensemble)->check(CLI::IsMember({"kac", "so2"}));
  cd->add_option("--n", n);
  cd->add_option("--tmin", tmin);
  cd->add_option("--tmax", tmax);
  cd->add_option("--steps", steps);
  cd->add_flag("--mc", mc, "add a Monte-Carlo histogram column");
  cd->add_option("--trials", trials);
  add_common(cd);

  auto* ck = app.add_subcommand("k2", "two-point correlation of straightened zeros");
  ck->add_option("--ensemble", ensemble)->check(CLI::IsMember({"kac", "so2"}));
  ck->add_option("--smax", smax);
  ck->add_option("--step", step);
  ck->add_flag("--mc", mc, "add an empirical curve");
  ck->add_option("--n", n);
  ck->add_option("--trials", trials);
  ck->add_option("--window", window, "central straightened window");
  ck->add_option("--bin", bin, "pair-histogram bin width");
  add_common(ck);

  auto* cm = app.add_subcommand("km", "m-point correlation at given separations");
  cm->add_option("--ensemble", ensemble)->check(CLI::IsMember({"kac", "so2"}));
  cm->add_option("--points", points)->delimiter(',')->required();
  cm->add_option("--method", method)->check(CLI::IsMember({"mc", "quad", "closed"}));
  cm->add_option("--samples", samples);
  add_common(cm);

  auto* cv = app.add_subcommand("verify", "closed-form vs numeric-oracle checks");
  cv->add_option("--suite", suite)
      ->check(CLI::IsMember({"det", "omega", "moment", "asymptotics", "positivity", "all"}));
  cv->add_option("--m-max", m_max);
  cv->add_option("--trials", trials);
  cv->add_option("--tol", tol);
  add_common(cv);

  auto* cva = app.add_subcommand("variance", "zero-count mean and variance on (a,b]");
  cva->add_option("--ensemble", ensemble)->check(CLI::IsMember({"kac", "so2"}));
  cva->add_option("--n", n);
  cva->add_option("--a", a);
  cva->add_option("--b", b);
  cva->add_option("--trials", trials);
  add_common(cva);

  auto* cc = app.add_subcommand("const-c", "count-variance constant C");
  cc->add_option("--tol", tol);
  cc->add_option("--out", outpath);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (cd->parsed())
      return run_density(ensemble, n, tmin, tmax, steps, mc, trials, seed, workers,
                         outpath, cmdline);
    if (ck->parsed())
      return run_k2(ensemble, smax, step, mc, n, trials, window, bin, seed, workers,
                    outpath, cmdline);
    if (cm->parsed())
      return run_km(ensemble, points, method, samples, seed, workers, outpath, cmdline);
    if (cv->parsed()) return run_verify(suite, m_max, trials, seed, tol, outpath, cmdline);
    if (cva->parsed())
      return run_variance(ensemble, n, a, b, trials, seed, workers, outpath, cmdline);
    if (cc->parsed()) return run_const_c(tol, outpath, cmdline);
  } catch (const zerostats::InsufficientStatistics& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const zerostats::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
