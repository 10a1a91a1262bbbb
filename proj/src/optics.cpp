#include "nlo/optics.hpp"

#include <cmath>

#include "nlo/constants.hpp"
#include "nlo/errors.hpp"

namespace nlo {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw DomainError(what);
}

}  // namespace

PulseProfile parse_profile(std::string_view tag) {
  if (tag == "flat-top") return PulseProfile::flat_top;
  if (tag == "gaussian") return PulseProfile::gaussian;
  throw DomainError("unknown pulse profile tag '" + std::string(tag) +
                    "' (expected flat-top or gaussian)");
}

std::string_view to_string(PulseProfile profile) {
  return profile == PulseProfile::gaussian ? "gaussian" : "flat-top";
}

std::vector<SellmeierTerm> diamond_sellmeier() {
  return {{0.3306, 175e-9}, {4.3356, 106e-9}};
}

void validate(const MaterialSpec& material, double reference_wavelength) {
  require(material.n0 > 1.0, "material n0 must exceed 1");
  require(material.alpha >= 0.0, "material alpha must be non-negative");
  require(material.length > 0.0, "material length must be positive");
  require(material.m_star_ratio > 0.0, "material m_star_ratio must be positive");
  if (!material.sellmeier.empty()) {
    const double n = refractive_index(material, reference_wavelength);
    if (std::abs(n - material.n0) > 0.02) {
      throw DomainError("Sellmeier index " + std::to_string(n) +
                        " disagrees with n0 = " + std::to_string(material.n0) +
                        " at the reference wavelength");
    }
  }
}

void validate(const BeamSpec& beam) {
  require(beam.wavelength > 0.0, "beam wavelength must be positive");
  require(beam.pulse_fwhm > 0.0, "beam pulse_fwhm must be positive");
  require(beam.fluence > 0.0, "beam fluence must be positive");
  require(beam.na || beam.waist, "beam needs na or waist");
  if (beam.na) require(*beam.na > 0.0 && *beam.na < 1.0, "beam na must lie in (0, 1)");
  if (beam.waist) require(*beam.waist > 0.0, "beam waist must be positive");
}

double vacuum_wave_vector(double wavelength) {
  require(wavelength > 0.0, "wavelength must be positive");
  return 2.0 * pi / wavelength;
}

double angular_frequency(double wavelength) {
  require(wavelength > 0.0, "wavelength must be positive");
  return 2.0 * pi * constants.c / wavelength;
}

double beam_waist_from_na(double wavelength, double na) {
  require(wavelength > 0.0, "wavelength must be positive");
  require(na > 0.0 && na < 1.0, "numerical aperture must lie in (0, 1)");
  return 0.61 * wavelength / na;
}

double rayleigh_length(double waist, double wavelength) {
  require(waist > 0.0, "waist must be positive");
  require(wavelength > 0.0, "wavelength must be positive");
  return pi * waist * waist / wavelength;
}

double beam_waist(const BeamSpec& beam) {
  if (beam.waist) return *beam.waist;
  if (beam.na) return beam_waist_from_na(beam.wavelength, *beam.na);
  throw DomainError("beam needs na or waist");
}

double effective_length(double alpha, double length) {
  require(alpha >= 0.0, "alpha must be non-negative");
  require(length > 0.0, "length must be positive");
  if (alpha == 0.0) return length;
  // -expm1(-aL)/a keeps full precision when aL is small.
  return -std::expm1(-alpha * length) / alpha;
}

double peak_intensity(double fluence, double pulse_fwhm, PulseProfile profile) {
  require(fluence >= 0.0, "fluence must be non-negative");
  require(pulse_fwhm > 0.0, "pulse_fwhm must be positive");
  switch (profile) {
    case PulseProfile::flat_top:
      return fluence / pulse_fwhm;
    case PulseProfile::gaussian:
      return 2.0 * std::sqrt(std::numbers::ln2 / pi) * fluence / pulse_fwhm;
  }
  throw DomainError("unknown pulse profile");
}

double refractive_index(const MaterialSpec& material, double wavelength) {
  require(wavelength > 0.0, "wavelength must be positive");
  if (material.sellmeier.empty()) return material.n0;
  const double l2 = wavelength * wavelength;
  double radicand = 1.0;
  for (const auto& term : material.sellmeier) {
    const double denom = l2 - term.resonance_wavelength * term.resonance_wavelength;
    if (std::abs(denom) <= 1e-12 * l2) {
      throw PoleError("wavelength " + std::to_string(wavelength) +
                      " m sits on a Sellmeier resonance");
    }
    radicand += term.strength * l2 / denom;
  }
  if (radicand <= 0.0) {
    throw DomainError("Sellmeier radicand is non-positive at " +
                      std::to_string(wavelength) + " m");
  }
  return std::sqrt(radicand);
}

double coherence_length_shg(const MaterialSpec& material, double wavelength) {
  const double gap = refractive_index(material, 0.5 * wavelength) -
                     refractive_index(material, wavelength);
  if (gap == 0.0) {
    throw DegenerateError("no dispersion between lambda and lambda/2; "
                          "coherence length is unbounded");
  }
  const double dk = 4.0 * pi / wavelength * gap;
  return pi / std::abs(dk);
}

Chi3 chi3_from_coefficients(double n0, double n2, double beta, double k) {
  require(n0 > 1.0, "n0 must exceed 1");
  require(k > 0.0, "wave vector must be positive");
  const double scale = n0 * n0 * constants.eps0 * constants.c;
  return {2.0 * scale * n2, scale * beta / k};
}

double drude_index_change(double carrier_density, double omega, double n0,
                          double m_star_ratio) {
  require(carrier_density >= 0.0, "carrier density must be non-negative");
  require(omega > 0.0, "omega must be positive");
  require(n0 > 0.0, "n0 must be positive");
  require(m_star_ratio > 0.0, "m_star_ratio must be positive");
  const double e = constants.e_charge;
  const double m_star = m_star_ratio * constants.m_e;
  return -(e * e * carrier_density) / (2.0 * n0 * m_star * constants.eps0 * omega * omega);
}

double tpa_carrier_density(double beta, double intensity, double pulse_fwhm,
                           double omega) {
  require(beta >= 0.0, "beta must be non-negative");
  require(intensity >= 0.0, "intensity must be non-negative");
  require(pulse_fwhm > 0.0, "pulse_fwhm must be positive");
  require(omega > 0.0, "omega must be positive");
  return beta * intensity * intensity * pulse_fwhm / (2.0 * constants.hbar * omega);
}

}  // namespace nlo
