#include <doctest.h>

#include <cmath>

#include "nlo/errors.hpp"
#include "nlo/optics.hpp"

using namespace nlo;

namespace {

MaterialSpec diamond() {
  MaterialSpec m;
  m.n0 = 2.4;
  m.alpha = 10.0;
  m.length = 3e-4;
  m.sellmeier = diamond_sellmeier();
  m.label = "diamond";
  return m;
}

// Material whose index steps by `gap` between lambda/2 and lambda: a single
// weak resonance far in the UV tuned by bisection on B.
MaterialSpec with_gap(double gap, double wavelength) {
  MaterialSpec m;
  m.n0 = 2.4;
  m.length = 3e-4;
  const double base = 2.4 * 2.4 - 1.0;
  auto eval_gap = [&](double uv_strength) {
    MaterialSpec t = m;
    t.sellmeier = {{base, 0.0}, {uv_strength, 150e-9}};
    return refractive_index(t, 0.5 * wavelength) - refractive_index(t, wavelength);
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (eval_gap(mid) < gap ? lo : hi) = mid;
  }
  m.sellmeier = {{base, 0.0}, {0.5 * (lo + hi), 150e-9}};
  return m;
}

}  // namespace

TEST_CASE("beam_waist_from_na") {
  CHECK(beam_waist_from_na(800e-9, 0.06) == doctest::Approx(8.1333e-6).epsilon(1e-4));
  CHECK(beam_waist_from_na(800e-9, 0.61) == doctest::Approx(8.0e-7).epsilon(1e-12));
  CHECK(beam_waist_from_na(400e-9, 0.06) == doctest::Approx(4.0667e-6).epsilon(1e-4));
  CHECK_THROWS_AS(beam_waist_from_na(-1.0, 0.06), DomainError);
  CHECK_THROWS_AS(beam_waist_from_na(800e-9, 1.0), DomainError);
  CHECK_THROWS_AS(beam_waist_from_na(800e-9, 0.0), DomainError);
}

TEST_CASE("rayleigh_length") {
  CHECK(rayleigh_length(7e-6, 800e-9) == doctest::Approx(1.9242e-4).epsilon(1e-4));
  CHECK(rayleigh_length(std::sqrt(800e-9 / M_PI), 800e-9) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rayleigh_length(8.133e-6, 800e-9) == doctest::Approx(2.597e-4).epsilon(1e-3));
  CHECK_THROWS_AS(rayleigh_length(0.0, 800e-9), DomainError);

  // Homogeneous of degree two in the waist.
  for (double s : {0.5, 2.0, 3.7})
    CHECK(rayleigh_length(s * 7e-6, 800e-9) == doctest::Approx(s * s * rayleigh_length(7e-6, 800e-9)).epsilon(1e-13));
}

TEST_CASE("effective_length") {
  CHECK(effective_length(10.0, 3e-4) == doctest::Approx(2.99551e-4).epsilon(1e-5));
  CHECK(effective_length(0.0, 3e-4) == 3e-4);
  CHECK(effective_length(1e4, 3e-4) == doctest::Approx(9.502e-5).epsilon(1e-4));
  CHECK_THROWS_AS(effective_length(-1.0, 3e-4), DomainError);
  CHECK_THROWS_AS(effective_length(1.0, 0.0), DomainError);

  double previous = effective_length(0.0, 3e-4);
  for (double a = 1e-3; a < 1e6; a *= 3.0) {
    const double l = effective_length(a, 3e-4);
    CHECK(l < previous);
    CHECK(l < 3e-4);
    previous = l;
  }
}

TEST_CASE("peak_intensity") {
  CHECK(peak_intensity(200.0, 50e-15, PulseProfile::flat_top) == doctest::Approx(4.0e15).epsilon(1e-14));
  CHECK(peak_intensity(200.0, 40e-15, PulseProfile::gaussian) == doctest::Approx(4.697e15).epsilon(1e-4));
  CHECK(peak_intensity(1e-30, 50e-15, PulseProfile::flat_top) == doctest::Approx(2e-17));
  CHECK(peak_intensity(0.0, 50e-15, PulseProfile::gaussian) == 0.0);
  CHECK_THROWS_AS(parse_profile("sech2"), DomainError);
  CHECK(parse_profile("gaussian") == PulseProfile::gaussian);
  CHECK(parse_profile("flat-top") == PulseProfile::flat_top);
}

TEST_CASE("refractive_index with Sellmeier data") {
  const auto m = diamond();
  CHECK(refractive_index(m, 800e-9) == doctest::Approx(2.400).epsilon(5e-4));
  CHECK(refractive_index(m, 400e-9) == doctest::Approx(2.464).epsilon(5e-4));

  MaterialSpec flat;
  flat.n0 = 2.4;
  CHECK(refractive_index(flat, 123e-9) == 2.4);
  CHECK(refractive_index(flat, 5e-6) == 2.4);

  CHECK_THROWS_AS(refractive_index(m, 175e-9), PoleError);
  // Just below the upper resonance the radicand goes negative.
  CHECK_THROWS_AS(refractive_index(m, 174e-9), DomainError);

  // Normal dispersion over the visible and near infrared.
  double previous = refractive_index(m, 300e-9);
  for (double wl = 310e-9; wl <= 2e-6; wl += 10e-9) {
    const double n = refractive_index(m, wl);
    CHECK(n < previous);
    previous = n;
  }
}

TEST_CASE("material and beam validation") {
  auto m = diamond();
  CHECK_NOTHROW(validate(m, 800e-9));
  m.n0 = 2.5;  // disagrees with the Sellmeier index by 0.1
  CHECK_THROWS_AS(validate(m, 800e-9), DomainError);
  m = diamond();
  m.alpha = -1.0;
  CHECK_THROWS_AS(validate(m, 800e-9), DomainError);

  BeamSpec b;
  b.na = 0.06;
  CHECK_NOTHROW(validate(b));
  b.na.reset();
  CHECK_THROWS_AS(validate(b), DomainError);
  b.waist = 7e-6;
  CHECK_NOTHROW(validate(b));
  CHECK(beam_waist(b) == 7e-6);
}

TEST_CASE("coherence_length_shg") {
  CHECK(coherence_length_shg(diamond(), 800e-9) == doctest::Approx(3.1e-6).epsilon(0.02));

  const auto tuned = with_gap(0.0125, 800e-9);
  CHECK(refractive_index(tuned, 400e-9) - refractive_index(tuned, 800e-9) == doctest::Approx(0.0125).epsilon(1e-9));
  CHECK(coherence_length_shg(tuned, 800e-9) == doctest::Approx(1.6e-5).epsilon(1e-6));

  MaterialSpec flat;
  flat.sellmeier = {{4.76, 0.0}};  // wavelength independent
  CHECK_THROWS_AS(coherence_length_shg(flat, 800e-9), DegenerateError);
}

TEST_CASE("chi3_from_coefficients") {
  const auto a = chi3_from_coefficients(2.4, 4.16e-20, 0.0, 7.854e6);
  CHECK(a.re == doctest::Approx(1.2721e-21).epsilon(1e-4));
  CHECK(a.im == 0.0);
  const auto zero = chi3_from_coefficients(2.4, 0.0, 0.0, 7.854e6);
  CHECK(zero.re == 0.0);
  CHECK(zero.im == 0.0);
  // n0^2 eps0 c beta / k, evaluated independently with CODATA constants.
  const auto b = chi3_from_coefficients(2.4, 0.0, 9.93e-14, 7.854e6);
  CHECK(b.im == doctest::Approx(1.93308e-22).epsilon(1e-5));
  CHECK_THROWS_AS(chi3_from_coefficients(2.4, 1.0, 1.0, 0.0), DomainError);

  // Linear in each coefficient separately.
  const auto twice = chi3_from_coefficients(2.4, 2 * 4.16e-20, 3 * 9.93e-14, 7.854e6);
  const auto once = chi3_from_coefficients(2.4, 4.16e-20, 9.93e-14, 7.854e6);
  CHECK(twice.re == doctest::Approx(2 * once.re).epsilon(1e-14));
  CHECK(twice.im == doctest::Approx(3 * once.im).epsilon(1e-14));
}

TEST_CASE("drude_index_change") {
  CHECK(drude_index_change(0.0, 2.356e15, 2.4, 0.57) == 0.0);
  const double dn = drude_index_change(1e24, 2.356e15, 2.4, 0.57);
  CHECK(dn == doctest::Approx(-2.09564e-4).epsilon(1e-5));
  CHECK(drude_index_change(2e24, 2.356e15, 2.4, 0.57) == 2.0 * dn);
  CHECK_THROWS_AS(drude_index_change(1e24, 0.0, 2.4, 0.57), DomainError);
  CHECK_THROWS_AS(drude_index_change(1e24, 2.356e15, 2.4, 0.0), DomainError);

  for (double n = 1e20; n < 1e28; n *= 7.0) {
    const double v = drude_index_change(n, 2.356e15, 2.4, 0.57);
    CHECK(v <= 0.0);
    CHECK(v / n == doctest::Approx(dn / 1e24).epsilon(1e-14));
  }
}

TEST_CASE("tpa_carrier_density") {
  CHECK(tpa_carrier_density(9.93e-14, 4.0e15, 50e-15, 2.356e15) == doctest::Approx(1.5987e23).epsilon(1e-4));
  CHECK(tpa_carrier_density(9.93e-14, 0.0, 50e-15, 2.356e15) == 0.0);
  for (double i = 1e13; i < 1e17; i *= 3.3) {
    CHECK(tpa_carrier_density(1e-13, 2 * i, 40e-15, 2.356e15) ==
          4.0 * tpa_carrier_density(1e-13, i, 40e-15, 2.356e15));
  }
  CHECK_THROWS_AS(tpa_carrier_density(1e-13, 1e15, 0.0, 2.356e15), DomainError);
}
