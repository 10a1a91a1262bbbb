#pragma once

// Closed-aperture Z-scan: the thin-sample, small-aperture transmittance
//
//   T(x) = 1 + 4x / ((x^2+9)(x^2+1)) dphi0 - 2(x^2+3) / ((x^2+9)(x^2+1)) dpsi0,
//   x = (z - z_center) / z0,
//
// scaled by a far-field baseline. The aperture's linear transmittance is
// assumed small and is not modelled.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlo/fit.hpp"

namespace nlo {

struct ZscanPoint {
  double z;              // m
  double transmittance;  // normalised
};

struct ZscanMeta {
  std::string label;
  double fluence = 0.0;     // J/m^2, 0 when unknown
  double wavelength = 0.0;  // m, 0 when unknown
};

struct ZscanTrace {
  std::vector<ZscanPoint> points;
  ZscanMeta meta;
};

/// At least 10 points, strictly increasing z, positive transmittance.
void validate(const ZscanTrace& trace);

struct ZscanParams {
  double dphi0 = 0.0;
  double dpsi0 = 0.0;
  double z0 = 1.0;  // m
  double z_center = 0.0;
  double baseline = 1.0;
};

void validate(const ZscanParams& params);

struct ZscanFitResult {
  ZscanParams params;
  ZscanParams sigma;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  ConditionFlag condition = ConditionFlag::ok;
  std::vector<std::string> warnings;
};

double refractive_kernel(double x);
double absorptive_kernel(double x);

double closed_aperture_transmittance(double x, double dphi0, double dpsi0);

/// baseline * T((z - z_center) / z0).
double zscan_model(const ZscanParams& params, double z);

/// Samples the model on z_grid with multiplicative noise (1 + noise_rel g),
/// g drawn from NormalStream(seed).
ZscanTrace simulate_zscan(const ZscanParams& params, std::span<const double> z_grid,
                          double noise_rel, std::uint64_t seed);

/// Heuristic starting point for fit_zscan. Throws DegenerateError on a trace
/// without distinct extrema.
ZscanParams initial_guess_zscan(const ZscanTrace& trace);

/// Fits all five parameters. dpsi0 is held non-negative, z0 and z_center are
/// kept within the scanned range.
ZscanFitResult fit_zscan(const ZscanTrace& trace, std::optional<ZscanParams> init = {},
                         const FitOptions& options = {});

struct PeakValley {
  double t_peak = 0.0;
  double t_valley = 0.0;
  double dT_pv = 0.0;
  std::optional<double> z_peak;  // empty when the peak is the asymptote
  double z_valley = 0.0;
  std::optional<double> dz_pv;
};

/// Extrema of the model by a 4001-point grid search on x in [-10, 10] with a
/// parabolic refinement. When no interior maximum exists (pure absorption) the
/// peak is the far-field baseline.
PeakValley peak_valley_metrics(const ZscanParams& params);

struct ZscanCoefficients {
  double n2 = 0.0;    // m^2/W
  double beta = 0.0;  // m/W
  double sigma_n2 = 0.0;
  double sigma_beta = 0.0;
};

/// n2 = dphi0 / (k I L_eff), beta = 2 dpsi0 / (I L_eff).
ZscanCoefficients nlo_coefficients_from_zscan(const ZscanFitResult& fit, double intensity,
                                              double l_eff, double k);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace nlo
