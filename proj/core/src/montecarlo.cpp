#include "zerostats/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "zerostats/errors.hpp"
#include "zerostats/roots.hpp"

namespace zerostats {

namespace {

void check_cfg(const McConfig& cfg) {
  if (cfg.trials < 1) throw DomainError("McConfig: trials must be >= 1");
  if (!(cfg.bin_width > 0.0)) throw DomainError("McConfig: bin_width must be > 0");
  if (cfg.workers < 1) throw DomainError("McConfig: workers must be >= 1");
  if (!(cfg.scan_step > 0.0)) throw DomainError("McConfig: scan_step must be > 0");
}

double default_window(const EnsembleSpec& spec) {
  const double n = spec.degree();
  if (spec.kind() == EnsembleKind::SO2) return std::min(std::sqrt(n) / 4.0, 5.0);
  return std::log(n) / (4.0 * M_PI);
}

// Ascending t-grid whose image under the straightening map is uniform.
std::vector<double> kac_inside_grid(double zlo, double zhi, double step) {
  std::vector<double> g;
  const long k = std::lround(std::floor((zhi - zlo) / step)) + 1;
  g.reserve(static_cast<size_t>(k) + 1);
  for (long i = 0; i <= k; ++i) g.push_back(std::tanh(M_PI * (zlo + step * i)));
  return g;
}

std::vector<double> so2_grid(double zlo, double zhi, double step, int n) {
  const double sn = std::sqrt(static_cast<double>(n));
  std::vector<double> g;
  const long k = std::lround(std::floor((zhi - zlo) / step)) + 1;
  g.reserve(static_cast<size_t>(k) + 1);
  for (long i = 0; i <= k; ++i) g.push_back(std::tan(M_PI * (zlo + step * i) / sn));
  return g;
}

// Count sign changes of f along an ascending grid (no refinement).
long count_sign_flips(const std::vector<double>& c, const std::vector<double>& rev,
                      const std::vector<double>& grid) {
  long flips = 0;
  int last = 0;
  for (double t : grid) {
    const int s = detail::sign_at(c, rev, t);
    if (s == 0) {  // grid point is a root: count it, resume fresh
      ++flips;
      last = 0;
      continue;
    }
    if (last != 0 && s != last) ++flips;
    last = s;
  }
  return flips;
}

// Straightened zeros of one sampled polynomial inside |zeta| <= window.
// KacOutside works on the reversed polynomial: its roots r in (-1,1) are the
// reciprocals of the |tau| > 1 zeros and artanh(r)/pi is their straightening.
std::vector<double> window_zeros(const std::vector<double>& coeffs,
                                 const EnsembleSpec& spec, Straightening mode,
                                 double window, double scan_step) {
  const int n = spec.degree();
  std::vector<double> zetas;
  if (mode == Straightening::SO2) {
    const auto grid = so2_grid(-window - scan_step, window + scan_step, scan_step, n);
    for (double t : scan_roots(coeffs, grid)) {
      const double z = straighten_so2(t, n);
      if (std::abs(z) <= window) zetas.push_back(z);
    }
  } else {
    const std::vector<double>* work = &coeffs;
    std::vector<double> rev;
    if (mode == Straightening::KacOutside) {
      rev = reversed_polynomial(coeffs);
      work = &rev;
    }
    const auto grid = kac_inside_grid(-window - scan_step, window + scan_step, scan_step);
    for (double t : scan_roots(*work, grid)) {
      if (1.0 - std::abs(t) <= 1e-9) continue;  // singular straightening band
      const double z = straighten_kac_inside(t);
      if (std::abs(z) <= window) zetas.push_back(z);
    }
  }
  std::sort(zetas.begin(), zetas.end());
  return zetas;
}

// Overlap of the triangular separation kernel (half-width w, center d >= 0)
// with the interval [lo, hi].
double tri_overlap(double d, double w, double lo, double hi) {
  auto cdf = [&](double x) {
    if (x <= d - w) return 0.0;
    if (x >= d + w) return 1.0;
    if (x <= d) {
      const double y = (x - d + w) / w;
      return 0.5 * y * y;
    }
    const double y = (d + w - x) / w;
    return 1.0 - 0.5 * y * y;
  };
  return cdf(hi) - cdf(lo);
}

template <typename PerTrial>
void run_trials(const EnsembleSpec& spec, const McConfig& cfg, PerTrial&& body) {
  // contiguous trial partition + ordered merge keeps results bit-for-bit
  // deterministic for fixed (seed, workers)
  if (cfg.workers == 1) {
    RngStream stream = RngStream::derive(cfg.seed, 0);
    for (long t = 0; t < cfg.trials; ++t) body(0, sample_coefficients(spec, stream));
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < cfg.workers; ++w) {
    const long lo = cfg.trials * w / cfg.workers;
    const long hi = cfg.trials * (w + 1) / cfg.workers;
    pool.emplace_back([&, w, lo, hi]() {
      RngStream stream = RngStream::derive(cfg.seed, static_cast<std::uint64_t>(w));
      for (long t = lo; t < hi; ++t) body(w, sample_coefficients(spec, stream));
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<std::pair<double, McEstimate>> estimate_density(
    const EnsembleSpec& spec, const std::vector<double>& grid, const McConfig& cfg) {
  check_cfg(cfg);
  if (grid.empty()) return {};
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw DomainError("estimate_density: grid must be sorted");

  const int n = spec.degree();
  const double w = cfg.bin_width;
  const size_t nb = grid.size();
  const bool sturm_ok = spec.kind() != EnsembleKind::SO2 && n <= 400;

  std::vector<std::vector<double>> counts(static_cast<size_t>(cfg.workers),
                                          std::vector<double>(nb, 0.0));

  const double tmin = grid.front() - 0.5 * w, tmax = grid.back() + 0.5 * w;
  run_trials(spec, cfg, [&](int worker, const std::vector<double>& c) {
    std::vector<double> roots;
    if (sturm_ok) {
      roots = real_roots(c);
    } else if (spec.kind() == EnsembleKind::SO2) {
      const double sn = std::sqrt(static_cast<double>(n));
      const double zlo = std::max(-0.5 * sn, straighten_so2(tmin, n));
      const double zhi = std::min(0.5 * sn, straighten_so2(tmax, n));
      roots = scan_roots(c, so2_grid(zlo, zhi, cfg.scan_step, n));
    } else {
      // large-degree Kac-like: straightened grids inside and (reversed) outside
      const double zmax = std::log(2.0 * n) / (2.0 * M_PI) + 1.75;
      const auto g = kac_inside_grid(-zmax, zmax, cfg.scan_step);
      roots = scan_roots(c, g);
      for (double r : scan_roots(reversed_polynomial(c), g))
        if (r != 0.0) roots.push_back(1.0 / r);
    }
    auto& cnt = counts[static_cast<size_t>(worker)];
    for (double r : roots) {
      // bins are [center - w/2, center + w/2)
      const auto it = std::lower_bound(grid.begin(), grid.end(), r - 0.5 * w);
      const size_t idx = static_cast<size_t>(it - grid.begin());
      if (idx < nb && r >= grid[idx] - 0.5 * w && r < grid[idx] + 0.5 * w)
        cnt[idx] += 1.0;
    }
  });

  std::vector<std::pair<double, McEstimate>> out;
  out.reserve(nb);
  const double norm = 1.0 / (static_cast<double>(cfg.trials) * w);
  for (size_t b = 0; b < nb; ++b) {
    double total = 0.0;
    for (int wk = 0; wk < cfg.workers; ++wk) total += counts[static_cast<size_t>(wk)][b];
    out.push_back({grid[b], {total * norm, std::sqrt(total) * norm, cfg.trials}});
  }
  return out;
}

CorrelationCurve estimate_k2(const EnsembleSpec& spec, Straightening mode,
                             const McConfig& cfg) {
  check_cfg(cfg);
  if (spec.kind() == EnsembleKind::SO2 && mode != Straightening::SO2)
    throw DomainError("estimate_k2: Kac straightenings need a Kac-type ensemble");
  if (spec.kind() != EnsembleKind::SO2 && mode == Straightening::SO2)
    throw DomainError("estimate_k2: SO2 straightening needs the SO2 ensemble");

  const int n = spec.degree();
  double W = cfg.central_window > 0.0 ? cfg.central_window : default_window(spec);
  if (mode == Straightening::SO2)
    W = std::min(W, std::sqrt(static_cast<double>(n)) / 4.0);

  const double bw = cfg.bin_width;
  double smax = cfg.smax > 0.0 ? cfg.smax : 2.0 * W - bw;
  smax = std::min(smax, 2.0 * W - bw);
  const int nb = static_cast<int>(std::floor(smax / bw + 1e-9));
  if (nb < 1) throw DomainError("estimate_k2: window too small for one bin");

  // expected zeros in the window must support pair statistics
  const double mean_in_window = 2.0 * W;  // unit straightened intensity
  if (mean_in_window < 1.0)
    throw InsufficientStatistics("estimate_k2: central window holds < 1 zero on average");

  const double wf = bw / 4.0;  // fine profile cells
  const int nf = static_cast<int>(std::ceil(2.0 * W / wf));

  struct Part {
    std::vector<double> dd_sum, dd_sq;
    std::vector<double> H;
    std::vector<double> M;
    std::vector<double> dd_trial;
  };
  std::vector<Part> parts(static_cast<size_t>(cfg.workers));
  for (auto& p : parts) {
    p.dd_sum.assign(static_cast<size_t>(nb), 0.0);
    p.dd_sq.assign(static_cast<size_t>(nb), 0.0);
    p.H.assign(static_cast<size_t>(nf), 0.0);
    p.M.assign(static_cast<size_t>(nf) * static_cast<size_t>(nf), 0.0);
    p.dd_trial.assign(static_cast<size_t>(nb), 0.0);
  }

  run_trials(spec, cfg, [&](int worker, const std::vector<double>& c) {
    auto& p = parts[static_cast<size_t>(worker)];
    const auto z = window_zeros(c, spec, mode, W, cfg.scan_step);
    std::fill(p.dd_trial.begin(), p.dd_trial.end(), 0.0);
    std::vector<int> cell(z.size());
    for (size_t i = 0; i < z.size(); ++i) {
      int k = static_cast<int>((z[i] + W) / wf);
      cell[i] = std::clamp(k, 0, nf - 1);
      p.H[static_cast<size_t>(cell[i])] += 1.0;
    }
    for (size_t i = 0; i < z.size(); ++i) {
      for (size_t j = 0; j < z.size(); ++j) {
        p.M[static_cast<size_t>(cell[i]) * static_cast<size_t>(nf) +
            static_cast<size_t>(cell[j])] += 1.0;
        if (j <= i) continue;
        const double sep = z[j] - z[i];
        const int b = static_cast<int>(std::ceil(sep / bw)) - 1;
        if (b >= 0 && b < nb) p.dd_trial[static_cast<size_t>(b)] += 2.0;
      }
    }
    for (int b = 0; b < nb; ++b) {
      p.dd_sum[static_cast<size_t>(b)] += p.dd_trial[static_cast<size_t>(b)];
      p.dd_sq[static_cast<size_t>(b)] +=
          p.dd_trial[static_cast<size_t>(b)] * p.dd_trial[static_cast<size_t>(b)];
    }
  });

  std::vector<double> dd_sum(static_cast<size_t>(nb), 0.0), dd_sq(static_cast<size_t>(nb), 0.0);
  std::vector<double> H(static_cast<size_t>(nf), 0.0);
  std::vector<double> M(static_cast<size_t>(nf) * static_cast<size_t>(nf), 0.0);
  for (const auto& p : parts) {
    for (int b = 0; b < nb; ++b) {
      dd_sum[static_cast<size_t>(b)] += p.dd_sum[static_cast<size_t>(b)];
      dd_sq[static_cast<size_t>(b)] += p.dd_sq[static_cast<size_t>(b)];
    }
    for (int k = 0; k < nf; ++k) H[static_cast<size_t>(k)] += p.H[static_cast<size_t>(k)];
    for (size_t k = 0; k < M.size(); ++k) M[k] += p.M[k];
  }

  // cross-trial pair rate: profile autocorrelation minus same-trial products,
  // smeared over bins with the exact triangular cell-pair separation kernel
  std::vector<double> rr(static_cast<size_t>(nb), 0.0);
  for (int k = 0; k < nf; ++k) {
    for (int l = 0; l < nf; ++l) {
      const double cross = H[static_cast<size_t>(k)] * H[static_cast<size_t>(l)] -
                           M[static_cast<size_t>(k) * static_cast<size_t>(nf) +
                             static_cast<size_t>(l)];
      if (cross == 0.0) continue;
      const double d = std::abs(k - l) * wf;
      const int b0 = std::max(0, static_cast<int>((d - wf) / bw) - 1);
      const int b1 = std::min(nb - 1, static_cast<int>((d + wf) / bw) + 1);
      for (int b = b0; b <= b1; ++b) {
        const double frac = tri_overlap(d, wf, b * bw, (b + 1) * bw);
        if (frac > 0.0) rr[static_cast<size_t>(b)] += cross * frac;
      }
    }
  }

  const double T = static_cast<double>(cfg.trials);
  CorrelationCurve curve;
  curve.ensemble = mode == Straightening::SO2 ? CurveEnsemble::SO2 : CurveEnsemble::Kac;
  curve.source = CurveSource::MonteCarlo;
  for (int b = 0; b < nb; ++b) {
    if (dd_sum[static_cast<size_t>(b)] < 10.0)
      throw InsufficientStatistics("estimate_k2: bin with fewer than 10 pairs");
    const double r = rr[static_cast<size_t>(b)] / (T * (T - 1.0));  // per trial pair
    const double mean = dd_sum[static_cast<size_t>(b)] / T;
    const double var =
        std::max(0.0, (dd_sq[static_cast<size_t>(b)] / T - mean * mean) * T / (T - 1.0));
    curve.separations.push_back((b + 0.5) * bw);
    curve.values.push_back(mean / r);
    curve.stderrs.push_back(std::sqrt(var / T) / r);
  }
  return curve;
}

CountStatistic estimate_count_variance(const EnsembleSpec& spec, double a, double b,
                                       const McConfig& cfg) {
  check_cfg(cfg);
  if (!(a < b)) throw DomainError("estimate_count_variance: need a < b");
  const int n = spec.degree();
  const bool sturm_ok = spec.kind() != EnsembleKind::SO2 && n <= 400;

  // precompute scan grids once (shared, read-only across workers)
  std::vector<double> grid, rgrid;
  if (!sturm_ok) {
    if (spec.kind() == EnsembleKind::SO2) {
      const double sn = std::sqrt(static_cast<double>(n));
      const double zlo = std::isinf(a) ? -0.5 * sn : std::max(-0.5 * sn, straighten_so2(a, n));
      const double zhi = std::isinf(b) ? 0.5 * sn : std::min(0.5 * sn, straighten_so2(b, n));
      grid = so2_grid(zlo, zhi, cfg.scan_step, n);
    } else {
      const double zmax = std::log(2.0 * n) / (2.0 * M_PI) + 1.75;
      auto zeta_in = [&](double t) { return std::atanh(std::clamp(t, -1.0, 1.0)) / M_PI; };
      // inside piece of (a,b]
      const double il = std::clamp(a, -1.0, 1.0), ih = std::clamp(b, -1.0, 1.0);
      if (il < ih)
        grid = kac_inside_grid(std::max(-zmax, zeta_in(il)), std::min(zmax, zeta_in(ih)),
                               cfg.scan_step);
      // outside pieces map to the reversed polynomial on r = 1/tau
      auto add_rev = [&](double rlo, double rhi) {
        const double zl = std::max(-zmax, std::atanh(rlo) / M_PI);
        const double zh = std::min(zmax, std::atanh(rhi) / M_PI);
        if (zl < zh) {
          auto g = kac_inside_grid(zl, zh, cfg.scan_step);
          rgrid.insert(rgrid.end(), g.begin(), g.end());
        }
      };
      if (a < -1.0) {
        const double b2 = std::min(b, -1.0);
        add_rev(1.0 / b2, std::isinf(a) ? -1e-300 : 1.0 / a);
      }
      if (b > 1.0) {
        const double a2 = std::max(a, 1.0);
        add_rev(std::isinf(b) ? 1e-300 : 1.0 / b, 1.0 / a2);
      }
    }
  }

  std::vector<long double> sums(static_cast<size_t>(cfg.workers), 0.0L);
  std::vector<long double> sqs(static_cast<size_t>(cfg.workers), 0.0L);
  run_trials(spec, cfg, [&](int worker, const std::vector<double>& c) {
    long k = 0;
    if (sturm_ok) {
      k = count_in_interval(c, a, b);
    } else {
      const auto rev = reversed_polynomial(c);
      if (!grid.empty()) k += count_sign_flips(c, rev, grid);
      if (!rgrid.empty()) k += count_sign_flips(rev, c, rgrid);
    }
    sums[static_cast<size_t>(worker)] += k;
    sqs[static_cast<size_t>(worker)] += static_cast<long double>(k) * k;
  });

  long double sum = 0.0L, sq = 0.0L;
  for (int w = 0; w < cfg.workers; ++w) {
    sum += sums[static_cast<size_t>(w)];
    sq += sqs[static_cast<size_t>(w)];
  }
  const double T = static_cast<double>(cfg.trials);
  CountStatistic st;
  st.a = a;
  st.b = b;
  st.trials = cfg.trials;
  st.mean = static_cast<double>(sum) / T;
  st.variance = cfg.trials > 1
                    ? std::max(0.0, static_cast<double>((sq - sum * (sum / T)) /
                                                        (static_cast<long double>(T) - 1.0L)))
                    : 0.0;
  return st;
}

McEstimate estimate_cross_factorization(const EnsembleSpec& spec, double t_in,
                                        double t_out, double window,
                                        const McConfig& cfg) {
  check_cfg(cfg);
  if (!(window > 0.0)) throw DomainError("estimate_cross_factorization: window must be > 0");
  auto classify = [&](double t) {
    const double lo = t - 0.5 * window, hi = t + 0.5 * window;
    if (std::max(std::abs(lo), std::abs(hi)) < 1.0) return +1;  // inside
    if (std::min(std::abs(lo), std::abs(hi)) > 1.0 && lo * hi > 0.0) return -1;
    throw DomainError("estimate_cross_factorization: window touches +-1");
  };
  const int side_in = classify(t_in);
  const int side_out = classify(t_out);
  if (std::abs(t_in - t_out) < window)
    throw DegenerateConfig("estimate_cross_factorization: windows overlap");

  const int pts = 120;
  auto window_grid = [&](double t, int side) {
    std::vector<double> g(pts + 1);
    if (side > 0) {
      const double lo = t - 0.5 * window;
      for (int i = 0; i <= pts; ++i) g[static_cast<size_t>(i)] = lo + window * i / pts;
    } else {
      // reversed-polynomial coordinate
      const double rlo = 1.0 / (t + 0.5 * window), rhi = 1.0 / (t - 0.5 * window);
      const double a = std::min(rlo, rhi), b = std::max(rlo, rhi);
      for (int i = 0; i <= pts; ++i) g[static_cast<size_t>(i)] = a + (b - a) * i / pts;
    }
    return g;
  };
  const auto gin = window_grid(t_in, side_in);
  const auto gout = window_grid(t_out, side_out);

  struct Sums {
    long double x = 0, y = 0, z = 0, xx = 0, yy = 0, zz = 0, xy = 0, xz = 0, yz = 0;
  };
  std::vector<Sums> parts(static_cast<size_t>(cfg.workers));
  run_trials(spec, cfg, [&](int worker, const std::vector<double>& c) {
    const auto rev = reversed_polynomial(c);
    const double x = static_cast<double>(
        side_in > 0 ? count_sign_flips(c, rev, gin) : count_sign_flips(rev, c, gin));
    const double y = static_cast<double>(
        side_out > 0 ? count_sign_flips(c, rev, gout) : count_sign_flips(rev, c, gout));
    const double z = x * y;
    auto& s = parts[static_cast<size_t>(worker)];
    s.x += x;
    s.y += y;
    s.z += z;
    s.xx += x * x;
    s.yy += y * y;
    s.zz += z * z;
    s.xy += x * y;
    s.xz += x * z;
    s.yz += y * z;
  });
  Sums s;
  for (const auto& p : parts) {
    s.x += p.x;
    s.y += p.y;
    s.z += p.z;
    s.xx += p.xx;
    s.yy += p.yy;
    s.zz += p.zz;
    s.xy += p.xy;
    s.xz += p.xz;
    s.yz += p.yz;
  }
  const double T = static_cast<double>(cfg.trials);
  const double mx = static_cast<double>(s.x) / T;
  const double my = static_cast<double>(s.y) / T;
  const double mz = static_cast<double>(s.z) / T;
  if (static_cast<double>(s.z) < 10.0)
    throw InsufficientStatistics("estimate_cross_factorization: fewer than 10 joint events");

  const double ratio = mz / (mx * my);
  // delta method on R = mz/(mx my) with the empirical covariance of the means
  const double vx = (static_cast<double>(s.xx) / T - mx * mx) / T;
  const double vy = (static_cast<double>(s.yy) / T - my * my) / T;
  const double vz = (static_cast<double>(s.zz) / T - mz * mz) / T;
  const double cxy = (static_cast<double>(s.xy) / T - mx * my) / T;
  const double cxz = (static_cast<double>(s.xz) / T - mx * mz) / T;
  const double cyz = (static_cast<double>(s.yz) / T - my * mz) / T;
  const double rel2 = vz / (mz * mz) + vx / (mx * mx) + vy / (my * my) -
                      2.0 * cxz / (mz * mx) - 2.0 * cyz / (mz * my) +
                      2.0 * cxy / (mx * my);
  const double se = std::abs(ratio) * std::sqrt(std::max(0.0, rel2));
  return {ratio, se, cfg.trials};
}

}  // namespace zerostats
