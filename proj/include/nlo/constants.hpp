#pragma once

#include <numbers>

namespace nlo {

// CODATA 2018 values, SI units.
struct PhysicalConstants {
  const double c = 299792458.0;            // m/s
  const double eps0 = 8.8541878128e-12;    // F/m
  const double e_charge = 1.602176634e-19; // C
  const double m_e = 9.1093837015e-31;     // kg
  const double hbar = 1.054571817e-34;     // J s
};

inline constexpr PhysicalConstants constants{};

inline constexpr double pi = std::numbers::pi;

}  // namespace nlo
