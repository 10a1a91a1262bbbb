#pragma once

// Closed-form optics used throughout the analysis: beam geometry, effective
// sample length, fluence to intensity conversion, third-order susceptibility,
// free-carrier (Drude) index change and Sellmeier dispersion.
//
// Everything here is SI and pure; no I/O.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlo {

enum class PulseProfile { flat_top, gaussian };

PulseProfile parse_profile(std::string_view tag);
std::string_view to_string(PulseProfile profile);

// One resonance term B * lambda^2 / (lambda^2 - lambda_i^2).
struct SellmeierTerm {
  double strength;              // B_i, dimensionless
  double resonance_wavelength;  // lambda_i, m
};

struct MaterialSpec {
  double n0 = 2.4;
  double alpha = 0.0;   // 1/m
  double length = 0.0;  // m
  std::vector<SellmeierTerm> sellmeier;
  double m_star_ratio = 0.57;
  std::string label;
};

struct BeamSpec {
  double wavelength = 800e-9;  // m
  std::optional<double> na;
  std::optional<double> waist;  // m
  double pulse_fwhm = 50e-15;   // s
  double fluence = 200.0;       // J/m^2
  PulseProfile profile = PulseProfile::flat_top;
};

/// Diamond two-term Sellmeier dispersion (F. Peter, Z. Phys. 15, 358 (1923)):
/// B = (0.3306, 4.3356), resonances at 175 nm and 106 nm. Valid roughly
/// 0.2-2 um; gives n(800 nm) = 2.400.
std::vector<SellmeierTerm> diamond_sellmeier();

/// Throws DomainError when a MaterialSpec invariant is violated. When the
/// material has Sellmeier terms they must reproduce n0 within 0.02 at
/// reference_wavelength.
void validate(const MaterialSpec& material, double reference_wavelength);
void validate(const BeamSpec& beam);

double vacuum_wave_vector(double wavelength);
double angular_frequency(double wavelength);

double beam_waist_from_na(double wavelength, double na);
double rayleigh_length(double waist, double wavelength);

/// Waist of the beam: the explicit waist if set, otherwise 0.61 lambda / NA.
double beam_waist(const BeamSpec& beam);

/// (1 - exp(-alpha L)) / alpha, with the exact limit L at alpha = 0.
double effective_length(double alpha, double length);

/// Peak intensity of a pulse with the given fluence and FWHM duration.
/// Flat-top: F / tau. Gaussian: 2 sqrt(ln2 / pi) F / tau.
double peak_intensity(double fluence, double pulse_fwhm, PulseProfile profile);

double refractive_index(const MaterialSpec& material, double wavelength);

/// pi / dk with dk = (4 pi / lambda) (n(lambda/2) - n(lambda)).
double coherence_length_shg(const MaterialSpec& material, double wavelength);

struct Chi3 {
  double re;  // m^2/V^2
  double im;
};

/// Re chi3 = 2 n0^2 eps0 c n2, Im chi3 = n0^2 eps0 c beta / k.
Chi3 chi3_from_coefficients(double n0, double n2, double beta, double k);

/// Drude free-carrier index change -e^2 N / (2 n0 m* eps0 omega^2).
double drude_index_change(double carrier_density, double omega, double n0,
                          double m_star_ratio);

/// Carriers generated by two-photon absorption over one pulse:
/// beta I^2 tau / (2 hbar omega).
double tpa_carrier_density(double beta, double intensity, double pulse_fwhm,
                           double omega);

}  // namespace nlo
