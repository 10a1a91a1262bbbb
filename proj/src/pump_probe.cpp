#include "nlo/pump_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlo/constants.hpp"
#include "nlo/errors.hpp"

namespace nlo {

namespace {

constexpr double kFourLn2 = 4.0 * std::numbers::ln2;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Linear interpolation of the time where y - baseline crosses `level`
// (same sign as the peak) between samples i and j.
double crossing(const PumpProbeTrace& trace, std::size_t i, std::size_t j, double baseline,
                double level) {
  const double yi = std::abs(trace.points[i].dr_over_r - baseline);
  const double yj = std::abs(trace.points[j].dr_over_r - baseline);
  const double ti = trace.points[i].delay;
  const double tj = trace.points[j].delay;
  if (yi == yj) return 0.5 * (ti + tj);
  return ti + (level - yi) * (tj - ti) / (yj - yi);
}

}  // namespace

void validate(const PumpProbeTrace& trace) {
  if (trace.points.size() < 10)
    throw DomainError("pump-probe trace needs at least 10 points, got " +
                      std::to_string(trace.points.size()));
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    const auto& p = trace.points[i];
    if (!std::isfinite(p.delay) || !std::isfinite(p.dr_over_r))
      throw DomainError("pump-probe point " + std::to_string(i) + " is not finite");
    if (i > 0 && !(p.delay > trace.points[i - 1].delay))
      throw DomainError("pump-probe delays must be strictly increasing (point " +
                        std::to_string(i) + ")");
  }
}

void validate(const FluenceSeries& series) {
  if (series.points.size() < 3)
    throw DomainError("fluence series needs at least 3 points");
  std::vector<double> xs;
  for (const auto& p : series.points) {
    if (!(p.intensity > 0.0) || !std::isfinite(p.intensity))
      throw DomainError("fluence series abscissas must be positive and finite");
    if (!(p.abs_dr_over_r >= 0.0) || !std::isfinite(p.abs_dr_over_r))
      throw DomainError("fluence series ordinates must be non-negative and finite");
    xs.push_back(p.intensity);
  }
  std::sort(xs.begin(), xs.end());
  if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
    throw DomainError("fluence series abscissas must be distinct");
}

FluenceSeries to_intensity_series(const FluenceSeries& series, double pulse_fwhm,
                                  PulseProfile profile) {
  FluenceSeries out = series;
  if (series.abscissa == FluenceAbscissa::fluence) {
    for (auto& p : out.points) p.intensity = peak_intensity(p.intensity, pulse_fwhm, profile);
    out.abscissa = FluenceAbscissa::intensity;
  }
  return out;
}

double reflectivity_coefficient(double n0) {
  if (!(n0 > 1.0)) throw DomainError("n0 must exceed 1");
  return 4.0 / (n0 * n0 - 1.0);
}

double reflectivity_from_index_change(double dn, double n0) {
  return reflectivity_coefficient(n0) * dn;
}

double kappa_coefficient(double omega, double pulse_fwhm, double n0, double m_star_ratio) {
  // Index change per carrier times carriers per unit beta I^2.
  const double per_carrier = drude_index_change(1.0, omega, n0, m_star_ratio);
  return per_carrier * pulse_fwhm / (2.0 * constants.hbar * omega);
}

double pump_probe_peak_model(double intensity, double n2, double beta, double kappa, double n0) {
  if (!(intensity >= 0.0)) throw DomainError("intensity must be non-negative");
  const double dn = n2 * intensity + kappa * beta * intensity * intensity;
  return std::abs(reflectivity_coefficient(n0)) * std::abs(dn);
}

double gaussian_peak(const PeakFit& peak, double t) {
  const double d = (t - peak.t0) / peak.fwhm;
  return peak.baseline + peak.amplitude * std::exp(-kFourLn2 * d * d);
}

PeakFit fit_gaussian_peak(const PumpProbeTrace& trace, const FitOptions& options) {
  validate(trace);
  const auto& pts = trace.points;
  const std::size_t n = pts.size();

  const std::size_t outer = std::max<std::size_t>(1, n / 10);
  std::vector<double> edge;
  for (std::size_t i = 0; i < outer; ++i) {
    edge.push_back(pts[i].dr_over_r);
    edge.push_back(pts[n - 1 - i].dr_over_r);
  }
  const double baseline = median(std::move(edge));

  std::size_t i_ext = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(pts[i].dr_over_r - baseline) > std::abs(pts[i_ext].dr_over_r - baseline))
      i_ext = i;
  const double amplitude = pts[i_ext].dr_over_r - baseline;
  if (amplitude == 0.0) throw DegenerateError("pump-probe trace is flat; no peak to fit");

  const double half = 0.5 * std::abs(amplitude);
  double left = pts.front().delay;
  double right = pts.back().delay;
  for (std::size_t i = i_ext; i > 0; --i) {
    if (std::abs(pts[i - 1].dr_over_r - baseline) < half) {
      left = crossing(trace, i - 1, i, baseline, half);
      break;
    }
  }
  for (std::size_t i = i_ext; i + 1 < n; ++i) {
    if (std::abs(pts[i + 1].dr_over_r - baseline) < half) {
      right = crossing(trace, i, i + 1, baseline, half);
      break;
    }
  }

  // Scaled problem: time in units of the scan half-width, signal in units of
  // the initial peak height.
  const double t_scale = 0.5 * (pts.back().delay - pts.front().delay);
  const double y_scale = std::abs(amplitude);
  const double spacing = (pts.back().delay - pts.front().delay) / static_cast<double>(n - 1);
  constexpr double inf = std::numeric_limits<double>::infinity();

  FitProblem problem;
  problem.model = [](std::span<const double> p, double u) {
    const double d = (u - p[1]) / p[2];
    return p[3] + p[0] * std::exp(-kFourLn2 * d * d);
  };
  for (const auto& p : pts) problem.data.push_back({p.delay / t_scale, p.dr_over_r / y_scale, 1.0});
  problem.bounds = {{-inf, inf},
                    {pts.front().delay / t_scale, pts.back().delay / t_scale},
                    {0.1 * spacing / t_scale, 4.0},
                    {-inf, inf}};
  problem.theta0 = {amplitude / y_scale, pts[i_ext].delay / t_scale,
                    std::clamp((right - left) / t_scale, problem.bounds[2].lower, problem.bounds[2].upper),
                    baseline / y_scale};

  const FitResult fit = fit_least_squares(problem, options);
  PeakFit out;
  out.amplitude = fit.theta[0] * y_scale;
  out.t0 = fit.theta[1] * t_scale;
  out.fwhm = fit.theta[2] * t_scale;
  out.baseline = fit.theta[3] * y_scale;
  out.sigma_amplitude = fit.sigma[0] * y_scale;
  out.sigma_t0 = fit.sigma[1] * t_scale;
  out.sigma_fwhm = fit.sigma[2] * t_scale;
  out.sigma_baseline = fit.sigma[3] * y_scale;
  out.residual_norm = fit.residual_norm * y_scale * y_scale;
  out.converged = fit.converged;
  return out;
}

double deconvolve_fwhm(double fwhm_signal, double fwhm_known) {
  if (!(fwhm_known > 0.0) || !(fwhm_signal > fwhm_known))
    throw DomainError("deconvolution needs fwhm_signal > fwhm_known > 0");
  return std::sqrt(fwhm_signal * fwhm_signal - fwhm_known * fwhm_known);
}

FluenceFitResult fit_fluence_series(const FluenceSeries& series) {
  validate(series);
  if (series.abscissa != FluenceAbscissa::intensity)
    throw DomainError("fluence series must be converted to intensity before fitting");

  double i_scale = 0.0;
  double y_scale = 0.0;
  for (const auto& p : series.points) {
    i_scale = std::max(i_scale, p.intensity);
    y_scale = std::max(y_scale, p.abs_dr_over_r);
  }
  if (y_scale == 0.0) y_scale = 1.0;

  const auto n = static_cast<Eigen::Index>(series.points.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  FitProblem problem;
  problem.model = [](std::span<const double> p, double u) { return p[0] * u + p[1] * u * u; };
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = series.points[static_cast<std::size_t>(i)];
    const double u = p.intensity / i_scale;
    design(i, 0) = u;
    design(i, 1) = u * u;
    rhs(i) = p.abs_dr_over_r / y_scale;
    problem.data.push_back({u, rhs(i), 1.0});
  }
  const Eigen::Vector2d closed = design.colPivHouseholderQr().solve(rhs);
  if (!closed.allFinite()) throw DegenerateError("fluence design matrix is singular");
  problem.theta0 = {closed(0), closed(1)};

  const FitResult fit = fit_least_squares(problem);
  FluenceFitResult out;
  out.a = fit.theta[0] * y_scale / i_scale;
  out.b = fit.theta[1] * y_scale / (i_scale * i_scale);
  out.sigma_a = fit.sigma[0] * y_scale / i_scale;
  out.sigma_b = fit.sigma[1] * y_scale / (i_scale * i_scale);
  out.covariance_ab = fit.covariance(0, 1) * y_scale * y_scale / (i_scale * i_scale * i_scale);
  out.residual_norm = fit.residual_norm * y_scale * y_scale;
  out.converged = fit.converged;
  return out;
}

FluenceCoefficients nlo_coefficients_from_fluence(const FluenceFitResult& fit, double n0,
                                                  double kappa) {
  if (kappa == 0.0 || !std::isfinite(kappa)) throw DomainError("kappa must be non-zero");
  const double f = reflectivity_coefficient(n0);
  FluenceCoefficients out;
  out.n2 = fit.a / f;
  out.n2_abs = std::abs(out.n2);
  out.beta = std::abs(fit.b) / (f * std::abs(kappa));
  out.sigma_n2 = fit.sigma_a / f;
  out.sigma_beta = fit.sigma_b / (f * std::abs(kappa));
  out.kappa_used = kappa;
  return out;
}

}  // namespace nlo
