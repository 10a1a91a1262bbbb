#pragma once

// Laboratory units accepted at the file and CLI boundary. Everything inside
// the library is SI.

#include <string_view>

namespace nlo::units {

inline constexpr double kMillimetre = 1e-3;
inline constexpr double kNanometre = 1e-9;
inline constexpr double kFemtosecond = 1e-15;
inline constexpr double kMilliJoulePerCm2 = 10.0;  // J/m^2
inline constexpr double kCmPerGW = 1e-11;          // m/W
inline constexpr double kPerCm = 100.0;            // 1/m

// Tag sets: length {mm, m}, time {fs, s}, fluence {mJ/cm2, J/m2},
// beta {cm/GW, m/W}, wavelength {nm, m}, alpha {1/cm, 1/m}.
// Unknown tags throw DomainError.
double length_factor(std::string_view tag);
double time_factor(std::string_view tag);
double fluence_factor(std::string_view tag);
double beta_factor(std::string_view tag);
double wavelength_factor(std::string_view tag);
double alpha_factor(std::string_view tag);

}  // namespace nlo::units
