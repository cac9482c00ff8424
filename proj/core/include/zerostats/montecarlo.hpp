#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "zerostats/correlations.hpp"
#include "zerostats/ensemble.hpp"
#include "zerostats/gaussmoment.hpp"

namespace zerostats {

struct McConfig {
  long trials = 10000;
  std::uint64_t seed = 1;
  int workers = 1;
  double bin_width = 0.05;
  // Straightened zeros restricted to |zeta| <= central_window; 0 picks the
  // ensemble default: ln(n)/(4 pi) for Kac, min(sqrt(n)/4, 5) for SO2.
  double central_window = 0.0;
  double smax = 0.0;       // pair-curve extent; 0 -> 2*window - bin_width
  double scan_step = 1e-3; // straightened-grid resolution for root scans
};

struct CountStatistic {
  double a = 0.0, b = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  long trials = 0;
};

enum class Straightening { KacInside, KacOutside, SO2 };

// Histogram density of real roots per unit t at the given bin centers, with
// Poisson standard errors.
std::vector<std::pair<double, McEstimate>> estimate_density(
    const EnsembleSpec& spec, const std::vector<double>& grid, const McConfig& cfg);

// Empirical pair correlation of straightened zeros in the central window.
// Same-trial pair counts are normalized by the cross-trial intensity-profile
// autocorrelation, which removes one-point finite-n bias; standard errors
// come from the across-trial spread of per-trial bin contributions.
CorrelationCurve estimate_k2(const EnsembleSpec& spec, Straightening mode,
                             const McConfig& cfg);

// Sample mean and variance of exact zero counts in (a, b].
CountStatistic estimate_count_variance(const EnsembleSpec& spec, double a, double b,
                                       const McConfig& cfg);

// E[xi(I_in) xi(I_out)] / (E xi(I_in) E xi(I_out)) for windows of the given
// width centered at t_in and t_out.
McEstimate estimate_cross_factorization(const EnsembleSpec& spec, double t_in,
                                        double t_out, double window,
                                        const McConfig& cfg);

}  // namespace zerostats
