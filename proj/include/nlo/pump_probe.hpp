#pragma once

// Transient reflectivity at normal incidence: dR/R = 4 dn / (n0^2 - 1), with
// dn = n2 I (optical Kerr) + kappa beta I^2 (free carriers from two-photon
// absorption, Drude model).

#include <optional>
#include <string>
#include <vector>

#include "nlo/fit.hpp"
#include "nlo/optics.hpp"

namespace nlo {

struct DelayPoint {
  double delay;       // s
  double dr_over_r;
};

struct PumpProbeMeta {
  std::string label;
  double pump_fluence = 0.0;  // J/m^2, 0 when unknown
  std::string probe_power;
};

struct PumpProbeTrace {
  std::vector<DelayPoint> points;
  PumpProbeMeta meta;
};

/// At least 10 points with strictly increasing delay.
void validate(const PumpProbeTrace& trace);

struct PeakFit {
  double amplitude = 0.0;
  double t0 = 0.0;
  double fwhm = 0.0;
  double baseline = 0.0;
  double sigma_amplitude = 0.0;
  double sigma_t0 = 0.0;
  double sigma_fwhm = 0.0;
  double sigma_baseline = 0.0;
  double residual_norm = 0.0;
  bool converged = false;
};

enum class FluenceAbscissa { intensity, fluence };

struct FluencePoint {
  double intensity;  // W/m^2, or J/m^2 when the series abscissa is fluence
  double abs_dr_over_r;
};

struct FluenceSeries {
  std::vector<FluencePoint> points;
  std::string label;
  FluenceAbscissa abscissa = FluenceAbscissa::intensity;
};

/// At least 3 points, positive distinct abscissas, non-negative ordinates.
void validate(const FluenceSeries& series);

/// Converts a fluence-abscissa series to peak intensity; intensity series pass
/// through unchanged.
FluenceSeries to_intensity_series(const FluenceSeries& series, double pulse_fwhm,
                                  PulseProfile profile);

struct FluenceCoefficients {
  double n2 = 0.0;      // signed, m^2/W
  double n2_abs = 0.0;
  double beta = 0.0;    // m/W
  double sigma_n2 = 0.0;
  double sigma_beta = 0.0;
  double kappa_used = 0.0;  // m^3/W
};

struct FluenceFitResult {
  double a = 0.0;  // m^2/W
  double b = 0.0;  // m^4/W^2
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  double covariance_ab = 0.0;
  double residual_norm = 0.0;
  bool converged = false;
  std::optional<FluenceCoefficients> derived;
};

/// 4 / (n0^2 - 1).
double reflectivity_coefficient(double n0);

double reflectivity_from_index_change(double dn, double n0);

/// Index change per unit beta I^2: drude_index_change per carrier times the
/// TPA carriers per unit beta I^2, i.e. -e^2 tau / (2 n0 m* eps0 w^2 2 hbar w).
double kappa_coefficient(double omega, double pulse_fwhm, double n0, double m_star_ratio);

/// |4 / (n0^2 - 1)| |n2 I + kappa beta I^2|.
double pump_probe_peak_model(double intensity, double n2, double beta, double kappa, double n0);

/// baseline + amplitude exp(-4 ln2 (t - t0)^2 / fwhm^2).
double gaussian_peak(const PeakFit& peak, double t);

/// Least-squares Gaussian on a baseline; the amplitude sign is free.
/// Throws DegenerateError on a flat trace.
PeakFit fit_gaussian_peak(const PumpProbeTrace& trace, const FitOptions& options = {});

/// sqrt(signal^2 - known^2), the Gaussian quadrature rule.
double deconvolve_fwhm(double fwhm_signal, double fwhm_known);

/// Linear least squares for |dR/R| = a I + b I^2.
FluenceFitResult fit_fluence_series(const FluenceSeries& series);

/// n2 = a / (4 / (n0^2 - 1)), beta = |b| / ((4 / (n0^2 - 1)) |kappa|).
FluenceCoefficients nlo_coefficients_from_fluence(const FluenceFitResult& fit, double n0,
                                                  double kappa);

}  // namespace nlo
