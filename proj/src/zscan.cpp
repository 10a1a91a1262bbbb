#include "nlo/zscan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlo/errors.hpp"
#include "nlo/kernels.hpp"
#include "nlo/random.hpp"

namespace nlo {

namespace {

// Extremum of the refractive kernel sits at x^2 = (sqrt(208) - 10) / 6, which
// puts the peak-valley separation at 1.717 z0 and the swing at 0.406 dphi0.
constexpr double kPeakValleySeparation = 1.717;
constexpr double kPeakValleySwing = 0.406;
// Absorptive kernel at the same x: 2(x^2+3)/((x^2+9)(x^2+1)).
constexpr double kAbsorptionAtExtrema = 0.442;

constexpr std::size_t kExtremumGridPoints = 4001;
constexpr double kExtremumGridHalfWidth = 10.0;

double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Vertex of the parabola through (x-h, fm), (x, f0), (x+h, fp).
double parabolic_vertex(double x, double h, double fm, double f0, double fp) {
  const double curvature = fm - 2.0 * f0 + fp;
  if (curvature == 0.0) return x;
  const double offset = 0.5 * h * (fm - fp) / curvature;
  return x + std::clamp(offset, -h, h);
}

}  // namespace

void validate(const ZscanTrace& trace) {
  if (trace.points.size() < 10)
    throw DomainError("Z-scan trace needs at least 10 points, got " +
                      std::to_string(trace.points.size()));
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    const auto& p = trace.points[i];
    if (!std::isfinite(p.z) || !std::isfinite(p.transmittance))
      throw DomainError("Z-scan point " + std::to_string(i) + " is not finite");
    if (!(p.transmittance > 0.0))
      throw DomainError("Z-scan point " + std::to_string(i) + " has non-positive transmittance");
    if (i > 0 && !(p.z > trace.points[i - 1].z))
      throw DomainError("Z-scan positions must be strictly increasing (point " +
                        std::to_string(i) + ")");
  }
}

void validate(const ZscanParams& params) {
  const bool finite = std::isfinite(params.dphi0) && std::isfinite(params.dpsi0) &&
                      std::isfinite(params.z0) && std::isfinite(params.z_center) &&
                      std::isfinite(params.baseline);
  if (!finite) throw DomainError("Z-scan parameters must be finite");
  if (!(params.z0 > 0.0)) throw DomainError("z0 must be positive");
  if (!(params.baseline > 0.0)) throw DomainError("baseline must be positive");
  if (params.dpsi0 < 0.0) throw DomainError("dpsi0 must be non-negative");
}

double refractive_kernel(double x) {
  const double x2 = x * x;
  return 4.0 * x / ((x2 + 9.0) * (x2 + 1.0));
}

double absorptive_kernel(double x) {
  const double x2 = x * x;
  return 2.0 * (x2 + 3.0) / ((x2 + 9.0) * (x2 + 1.0));
}

double closed_aperture_transmittance(double x, double dphi0, double dpsi0) {
  return 1.0 + refractive_kernel(x) * dphi0 - absorptive_kernel(x) * dpsi0;
}

double zscan_model(const ZscanParams& params, double z) {
  const double x = (z - params.z_center) / params.z0;
  return params.baseline * closed_aperture_transmittance(x, params.dphi0, params.dpsi0);
}

ZscanTrace simulate_zscan(const ZscanParams& params, std::span<const double> z_grid,
                          double noise_rel, std::uint64_t seed) {
  validate(params);
  if (!(noise_rel >= 0.0)) throw DomainError("noise_rel must be non-negative");
  for (std::size_t i = 1; i < z_grid.size(); ++i)
    if (!(z_grid[i] > z_grid[i - 1])) throw DomainError("z grid must be strictly increasing");

  ZscanTrace trace;
  trace.points.reserve(z_grid.size());
  NormalStream noise(seed);
  for (double z : z_grid) {
    double t = zscan_model(params, z);
    if (noise_rel > 0.0) t *= 1.0 + noise_rel * noise.next();
    trace.points.push_back({z, t});
  }
  return trace;
}

ZscanParams initial_guess_zscan(const ZscanTrace& trace) {
  validate(trace);
  const auto& pts = trace.points;
  const std::size_t n = pts.size();
  const std::size_t outer = std::max<std::size_t>(1, n / 10);
  std::vector<double> edge;
  for (std::size_t i = 0; i < outer; ++i) {
    edge.push_back(pts[i].transmittance);
    edge.push_back(pts[n - 1 - i].transmittance);
  }
  const double baseline = median(std::move(edge));

  const auto by_t = [](const ZscanPoint& a, const ZscanPoint& b) {
    return a.transmittance < b.transmittance;
  };
  const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), by_t);
  const double swing = hi->transmittance - lo->transmittance;
  if (!(swing > 1e-12 * std::abs(baseline)))
    throw DegenerateError("Z-scan trace has no distinct peak and valley");

  ZscanParams guess;
  guess.baseline = baseline;
  guess.z_center = 0.5 * (hi->z + lo->z);
  guess.z0 = std::abs(hi->z - lo->z) / kPeakValleySeparation;
  const double sign = hi->z > lo->z ? 1.0 : -1.0;
  guess.dphi0 = sign * swing / (kPeakValleySwing * baseline);
  const double depth = (2.0 * baseline - hi->transmittance - lo->transmittance) / (2.0 * baseline);
  guess.dpsi0 = std::max(0.0, depth) / kAbsorptionAtExtrema;
  return guess;
}

ZscanFitResult fit_zscan(const ZscanTrace& trace, std::optional<ZscanParams> init,
                         const FitOptions& options) {
  validate(trace);
  ZscanParams start = init ? *init : initial_guess_zscan(trace);

  // Work in units of the scan half-width so all parameters are O(1).
  const double z_first = trace.points.front().z;
  const double z_last = trace.points.back().z;
  const double scale = 0.5 * (z_last - z_first);
  std::vector<double> spacing;
  for (std::size_t i = 1; i < trace.points.size(); ++i)
    spacing.push_back(trace.points[i].z - trace.points[i - 1].z);
  const double min_z0 = 0.5 * median(spacing) / scale;
  const double max_z0 = 2.0;

  constexpr double inf = std::numeric_limits<double>::infinity();
  FitProblem problem;
  problem.model = [](std::span<const double> t, double u) {
    const double x = (u - t[3]) / t[2];
    return t[4] * closed_aperture_transmittance(x, t[0], t[1]);
  };
  for (const auto& p : trace.points) problem.data.push_back({p.z / scale, p.transmittance, 1.0});
  problem.bounds = {{-inf, inf},
                    {0.0, inf},
                    {min_z0, max_z0},
                    {z_first / scale, z_last / scale},
                    {1e-9, inf}};
  problem.theta0 = {start.dphi0, start.dpsi0, start.z0 / scale, start.z_center / scale,
                    start.baseline};
  for (std::size_t j = 0; j < problem.theta0.size(); ++j)
    problem.theta0[j] = std::clamp(problem.theta0[j], problem.bounds[j].lower, problem.bounds[j].upper);

  const FitResult fit = fit_least_squares(problem, options);
  ZscanFitResult out;
  out.params = {fit.theta[0], fit.theta[1], fit.theta[2] * scale, fit.theta[3] * scale,
                fit.theta[4]};
  out.sigma = {fit.sigma[0], fit.sigma[1], fit.sigma[2] * scale, fit.sigma[3] * scale,
               fit.sigma[4]};
  out.residual_norm = fit.residual_norm;
  out.iterations = fit.iterations;
  out.converged = fit.converged;
  out.condition = fit.condition;
  if (std::abs(out.params.dphi0) > 1.0)
    out.warnings.push_back("|dphi0| > 1: outside the small-signal range of the transmittance model");
  if (!fit.converged) out.warnings.push_back("fit did not converge");
  if (fit.condition == ConditionFlag::near_singular)
    out.warnings.push_back("near-singular normal equations; sigmas use a pseudo-inverse");
  return out;
}

PeakValley peak_valley_metrics(const ZscanParams& params) {
  validate(params);
  if (params.dphi0 == 0.0 && params.dpsi0 == 0.0)
    throw DegenerateError("dphi0 and dpsi0 are both zero; the trace is flat");

  const std::vector<double> x =
      linspace(-kExtremumGridHalfWidth, kExtremumGridHalfWidth, kExtremumGridPoints);
  const double h = x[1] - x[0];
  auto t_at = [&](double xv) {
    return closed_aperture_transmittance(xv, params.dphi0, params.dpsi0);
  };
  // Parabolic vertex on the grid, then twice more on stencils shrunk by 8
  // around the previous vertex.
  auto refine = [&](std::size_t i) {
    double xv = parabolic_vertex(x[i], h, t_at(x[i - 1]), t_at(x[i]), t_at(x[i + 1]));
    for (double hs = h / 8.0; hs > h / 100.0; hs /= 8.0)
      xv = parabolic_vertex(xv, hs, t_at(xv - hs), t_at(xv), t_at(xv + hs));
    return xv;
  };
  auto interior = [&](std::size_t i) { return i > 0 && i + 1 < x.size(); };

  const auto ext = kernels::grid_extrema(params.dphi0, params.dpsi0, x);

  std::optional<std::size_t> i_peak;
  if (interior(ext.i_max)) {
    i_peak = ext.i_max;
  } else {
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
      const double ti = t_at(x[i]);
      if (ti >= t_at(x[i - 1]) && ti > t_at(x[i + 1]) && (!i_peak || ti > t_at(x[*i_peak])))
        i_peak = i;
    }
  }

  PeakValley out;
  double x_valley = x[ext.i_min];
  if (interior(ext.i_min)) x_valley = refine(ext.i_min);
  out.t_valley = params.baseline * t_at(x_valley);
  out.z_valley = params.z_center + x_valley * params.z0;
  if (i_peak) {
    const double x_peak = refine(*i_peak);
    out.t_peak = params.baseline * t_at(x_peak);
    out.z_peak = params.z_center + x_peak * params.z0;
    out.dz_pv = std::abs(x_peak - x_valley) * params.z0;
  } else {
    out.t_peak = params.baseline;
  }
  out.dT_pv = out.t_peak - out.t_valley;
  return out;
}

ZscanCoefficients nlo_coefficients_from_zscan(const ZscanFitResult& fit, double intensity,
                                              double l_eff, double k) {
  if (!(intensity > 0.0) || !(l_eff > 0.0) || !(k > 0.0))
    throw DomainError("intensity, effective length and wave vector must be positive");
  const double il = intensity * l_eff;
  ZscanCoefficients out;
  out.n2 = fit.params.dphi0 / (k * il);
  out.beta = 2.0 * fit.params.dpsi0 / il;
  out.sigma_n2 = fit.sigma.dphi0 / (k * il);
  out.sigma_beta = 2.0 * fit.sigma.dpsi0 / il;
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

}  // namespace nlo
