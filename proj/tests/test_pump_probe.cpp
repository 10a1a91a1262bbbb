#include <doctest.h>

#include <cmath>
#include <random>

#include "nlo/constants.hpp"
#include "nlo/errors.hpp"
#include "nlo/pump_probe.hpp"
#include "nlo/random.hpp"
#include "nlo/zscan.hpp"

using namespace nlo;

namespace {

constexpr double fs = 1e-15;
constexpr double omega800 = 2.356e15;

PumpProbeTrace gaussian_trace(double amplitude, double fwhm, double noise_rel, std::uint64_t seed) {
  PeakFit truth;
  truth.amplitude = amplitude;
  truth.fwhm = fwhm;
  NormalStream g(seed);
  PumpProbeTrace trace;
  for (double t : linspace(-200 * fs, 200 * fs, 81))
    trace.points.push_back({t, gaussian_peak(truth, t) + noise_rel * std::abs(amplitude) * g.next()});
  return trace;
}

// FWHM of the numerical convolution of two unit Gaussians of the given widths.
double convolved_fwhm(double w1, double w2) {
  const double h = 0.05 * fs;
  const int n = 8000;
  auto g = [](double t, double w) { return std::exp(-4 * std::log(2.0) * t * t / (w * w)); };
  std::vector<double> a(2 * n + 1), b(4 * n + 1);
  for (int j = -n; j <= n; ++j) a[j + n] = g(j * h, w1);
  for (int k = -2 * n; k <= 2 * n; ++k) b[k + 2 * n] = g(k * h, w2);
  auto conv = [&](int i) {
    double s = 0.0;
    for (int j = -n; j <= n; ++j) s += a[j + n] * b[i - j + 2 * n];
    return s;
  };
  const double half = 0.5 * conv(0);
  int i = 0;
  double previous = conv(0), current = previous;
  while (current > half) {
    previous = current;
    current = conv(++i);
  }
  const double frac = (previous - half) / (previous - current);
  return 2.0 * ((i - 1) + frac) * h;
}

}  // namespace

TEST_CASE("reflectivity_from_index_change") {
  CHECK(reflectivity_from_index_change(1.0, 2.4) == doctest::Approx(0.8403).epsilon(1e-4));
  CHECK(reflectivity_from_index_change(0.0, 3.1) == 0.0);
  CHECK(reflectivity_from_index_change(-2.09e-3, 2.4) == doctest::Approx(-1.756e-3).epsilon(1e-3));
  CHECK(reflectivity_from_index_change(-2.09564e-4, 2.4) == doctest::Approx(-1.76104e-4).epsilon(1e-5));
  CHECK_THROWS_AS(reflectivity_from_index_change(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(reflectivity_from_index_change(1.0, 0.5), DomainError);
  for (double s : {-3.0, 0.5, 7.0})
    CHECK(reflectivity_from_index_change(s * 1e-4, 2.4) == doctest::Approx(s * reflectivity_from_index_change(1e-4, 2.4)).epsilon(1e-15));
}

TEST_CASE("pump_probe_peak_model matches the manual Drude composition") {
  const double kappa = kappa_coefficient(omega800, 50 * fs, 2.4, 0.57);
  CHECK(kappa < 0.0);
  CHECK(pump_probe_peak_model(0.0, 4e-20, 1e-13, kappa, 2.4) == 0.0);

  const double i0 = 4.0e15, beta = 9.93e-14;
  const double model = pump_probe_peak_model(i0, 0.0, beta, kappa, 2.4);
  CHECK(model == doctest::Approx(0.8403 * std::abs(kappa) * beta * i0 * i0).epsilon(1e-4));

  for (double i : {1e14, 1e15, 4e15, 8e15}) {
    for (double n2 : {-2.4e-19, 0.0, 4.16e-20}) {
      for (double b : {0.0, 9.93e-14, 1.6e-13}) {
        const double carriers = tpa_carrier_density(b, i, 50 * fs, omega800);
        const double dn = n2 * i + drude_index_change(carriers, omega800, 2.4, 0.57);
        const double manual = std::abs(reflectivity_from_index_change(dn, 2.4));
        const double m = pump_probe_peak_model(i, n2, b, kappa, 2.4);
        if (manual == 0.0)
          CHECK(m == 0.0);
        else
          CHECK(m == doctest::Approx(manual).epsilon(1e-12));
      }
    }
  }

  // Kerr-only signal is linear in intensity.
  const double one = pump_probe_peak_model(1e15, 4e-20, 0.0, kappa, 2.4);
  for (double s : {2.0, 3.0, 10.0})
    CHECK(pump_probe_peak_model(s * 1e15, 4e-20, 0.0, kappa, 2.4) == doctest::Approx(s * one).epsilon(1e-14));
}

TEST_CASE("fit_gaussian_peak round trip") {
  const auto r = fit_gaussian_peak(gaussian_trace(-1e-4, 50 * fs, 0.0, 0));
  CHECK(r.converged);
  CHECK(r.amplitude == doctest::Approx(-1e-4).epsilon(1e-3));
  CHECK(r.fwhm == doctest::Approx(50 * fs).epsilon(1e-3));
  CHECK(std::abs(r.t0) < 0.05 * fs);
  CHECK(std::abs(r.baseline) < 1e-9);

  PumpProbeTrace shifted;
  PeakFit truth{3e-5, 20 * fs, 80 * fs, 1e-6};
  for (double t : linspace(-300 * fs, 300 * fs, 61)) shifted.points.push_back({t, gaussian_peak(truth, t)});
  const auto s = fit_gaussian_peak(shifted);
  CHECK(s.amplitude == doctest::Approx(3e-5).epsilon(1e-3));
  CHECK(s.t0 == doctest::Approx(20 * fs).epsilon(1e-3));
  CHECK(s.fwhm == doctest::Approx(80 * fs).epsilon(1e-3));
}

TEST_CASE("fit_gaussian_peak on a null signal") {
  CHECK_THROWS_AS(fit_gaussian_peak(gaussian_trace(0.0, 50 * fs, 0.0, 0)), DegenerateError);

  // Noise only: any amplitude found must be consistent with zero.
  PumpProbeTrace noise;
  NormalStream g(9);
  for (double t : linspace(-200 * fs, 200 * fs, 81)) noise.points.push_back({t, 1e-6 * g.next()});
  const auto r = fit_gaussian_peak(noise);
  CHECK(std::abs(r.amplitude) < 3.0 * r.sigma_amplitude + 1e-6 * 5);
}

TEST_CASE("fit_gaussian_peak at 5% noise") {
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto r = fit_gaussian_peak(gaussian_trace(-1e-4, 50 * fs, 0.05, seed));
    within += std::abs(r.fwhm - 50 * fs) <= 5 * fs;
  }
  CHECK(within >= 95);
}

TEST_CASE("deconvolve_fwhm") {
  CHECK(deconvolve_fwhm(50 * fs, 40 * fs) == doctest::Approx(30 * fs).epsilon(1e-12));
  CHECK(deconvolve_fwhm(std::sqrt(2.0) * 45 * fs, 45 * fs) == doctest::Approx(45 * fs).epsilon(1e-12));
  CHECK_THROWS_AS(deconvolve_fwhm(40 * fs, 40 * fs), DomainError);
  CHECK_THROWS_AS(deconvolve_fwhm(30 * fs, 40 * fs), DomainError);
  CHECK_THROWS_AS(deconvolve_fwhm(30 * fs, 0.0), DomainError);

  for (auto [w1, w2] : {std::pair{30 * fs, 40 * fs}, {50 * fs, 35 * fs}}) {
    const double measured = convolved_fwhm(w1, w2);
    CHECK(measured == doctest::Approx(std::hypot(w1, w2)).epsilon(1e-3));
    CHECK(deconvolve_fwhm(measured, w2) == doctest::Approx(w1).epsilon(1e-3));
  }
}

TEST_CASE("fit_fluence_series") {
  FluenceSeries exact;
  for (double i : {1e15, 2e15, 3e15}) exact.points.push_back({i, 2e-19 * i + 1e-35 * i * i});
  const auto r = fit_fluence_series(exact);
  CHECK(r.a == doctest::Approx(2e-19).epsilon(1e-10));
  CHECK(r.b == doctest::Approx(1e-35).epsilon(1e-10));

  FluenceSeries zeros;
  for (double i : {1e15, 2e15, 3e15, 4e15}) zeros.points.push_back({i, 0.0});
  const auto z = fit_fluence_series(zeros);
  CHECK(z.a == 0.0);
  CHECK(z.b == 0.0);

  // Negative curvature is allowed.
  FluenceSeries bent;
  for (double i : {1e15, 2e15, 3e15, 4e15}) bent.points.push_back({i, 3e-19 * i - 2e-35 * i * i});
  const auto rb = fit_fluence_series(bent);
  CHECK(rb.b == doctest::Approx(-2e-35).epsilon(1e-9));

  FluenceSeries two;
  two.points = {{1e15, 1e-4}, {2e15, 2e-4}};
  CHECK_THROWS_AS(fit_fluence_series(two), DomainError);
  FluenceSeries repeated;
  repeated.points = {{1e15, 1e-4}, {1e15, 1e-4}, {1e15, 1e-4}};
  CHECK_THROWS_AS(fit_fluence_series(repeated), DomainError);
}

TEST_CASE("fluence series at 2% noise recovers a within 5%") {
  const double kappa = kappa_coefficient(omega800, 50 * fs, 2.4, 0.57);
  const double n2 = -24.2e-20, beta = 1.01e-12;
  const double a_true = 0.8403 * 24.2e-20;
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    NormalStream g(seed);
    FluenceSeries s;
    for (double f : linspace(50.0, 300.0, 25)) {
      const double i = f / (50 * fs);
      s.points.push_back({i, pump_probe_peak_model(i, n2, beta, kappa, 2.4) * (1.0 + 0.02 * g.next())});
    }
    const auto r = fit_fluence_series(s);
    within += std::abs(r.a - a_true) <= 0.05 * a_true;
  }
  CHECK(within >= 48);
}

TEST_CASE("refitting the fitted curve is idempotent") {
  NormalStream g(3);
  FluenceSeries s;
  for (double i : linspace(2e15, 8e15, 13)) s.points.push_back({i, (2e-19 * i + 1.7e-35 * i * i) * (1 + 0.02 * g.next())});
  const auto first = fit_fluence_series(s);
  FluenceSeries forward = s;
  for (auto& p : forward.points) p.abs_dr_over_r = first.a * p.intensity + first.b * p.intensity * p.intensity;
  const auto second = fit_fluence_series(forward);
  CHECK(second.residual_norm <= first.residual_norm);
  CHECK(second.a == doctest::Approx(first.a).epsilon(1e-9));
  CHECK(second.b == doctest::Approx(first.b).epsilon(1e-9));
}

TEST_CASE("nlo_coefficients_from_fluence") {
  const double kappa = kappa_coefficient(omega800, 50 * fs, 2.4, 0.57);
  FluenceFitResult r;
  r.a = 2.034e-19;
  auto c = nlo_coefficients_from_fluence(r, 2.4, kappa);
  CHECK(c.n2_abs == doctest::Approx(24.2e-20).epsilon(2e-3));
  r.a = 6.13e-21;
  c = nlo_coefficients_from_fluence(r, 2.4, kappa);
  CHECK(c.n2_abs == doctest::Approx(0.73e-20).epsilon(2e-3));
  r.a = 0.0;
  r.b = 0.0;
  c = nlo_coefficients_from_fluence(r, 2.4, kappa);
  CHECK(c.n2 == 0.0);
  CHECK(c.beta == 0.0);

  r.a = -2.034e-19;
  c = nlo_coefficients_from_fluence(r, 2.4, kappa);
  CHECK(c.n2 < 0.0);
  CHECK(c.n2_abs == -c.n2);

  CHECK_THROWS_AS(nlo_coefficients_from_fluence(r, 2.4, 0.0), DomainError);

  // Building (a, b) from known coefficients and inverting is the identity.
  for (double n2 : {-2.42e-19, 7.3e-21}) {
    for (double beta : {0.0, 1.6e-13}) {
      FluenceFitResult built;
      built.a = reflectivity_coefficient(2.4) * n2;
      built.b = reflectivity_coefficient(2.4) * kappa * beta;
      built.sigma_a = 1e-21;
      const auto back = nlo_coefficients_from_fluence(built, 2.4, kappa);
      CHECK(back.n2 == doctest::Approx(n2).epsilon(1e-10));
      CHECK(back.beta == doctest::Approx(beta).epsilon(1e-10));
      CHECK(back.sigma_n2 == doctest::Approx(1e-21 / reflectivity_coefficient(2.4)).epsilon(1e-12));
      CHECK(back.kappa_used == kappa);
    }
  }
}

TEST_CASE("kappa matches the per-carrier Drude change times TPA yield") {
  const double tau = 50 * fs;
  const double per_carrier = drude_index_change(1.0, omega800, 2.4, 0.57);
  const double carriers_per_beta_i2 = tau / (2 * constants.hbar * omega800);
  CHECK(kappa_coefficient(omega800, tau, 2.4, 0.57) == doctest::Approx(per_carrier * carriers_per_beta_i2).epsilon(1e-14));
  CHECK(kappa_coefficient(omega800, tau, 2.4, 0.57) == doctest::Approx(-2.108e-23).epsilon(2e-3));
}

TEST_CASE("fluence abscissa conversion") {
  FluenceSeries s;
  s.abscissa = FluenceAbscissa::fluence;
  s.points = {{100.0, 1e-4}, {200.0, 2e-4}, {300.0, 3e-4}};
  const auto i = to_intensity_series(s, 50 * fs, PulseProfile::flat_top);
  CHECK(i.abscissa == FluenceAbscissa::intensity);
  CHECK(i.points[1].intensity == doctest::Approx(4e15).epsilon(1e-14));
  CHECK(i.points[1].abs_dr_over_r == 2e-4);
  CHECK_THROWS_AS(fit_fluence_series(s), DomainError);
}
