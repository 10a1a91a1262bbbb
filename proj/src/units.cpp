#include "nlo/units.hpp"

#include <string>

#include "nlo/errors.hpp"

namespace nlo::units {

namespace {

[[noreturn]] void unknown(std::string_view what, std::string_view tag, std::string_view allowed) {
  throw DomainError("unknown " + std::string(what) + " unit '" + std::string(tag) +
                    "' (expected " + std::string(allowed) + ")");
}

}  // namespace

double length_factor(std::string_view tag) {
  if (tag == "mm") return kMillimetre;
  if (tag == "m") return 1.0;
  unknown("length", tag, "mm or m");
}

double time_factor(std::string_view tag) {
  if (tag == "fs") return kFemtosecond;
  if (tag == "s") return 1.0;
  unknown("time", tag, "fs or s");
}

double fluence_factor(std::string_view tag) {
  if (tag == "mJ/cm2") return kMilliJoulePerCm2;
  if (tag == "J/m2") return 1.0;
  unknown("fluence", tag, "mJ/cm2 or J/m2");
}

double beta_factor(std::string_view tag) {
  if (tag == "cm/GW") return kCmPerGW;
  if (tag == "m/W") return 1.0;
  unknown("beta", tag, "cm/GW or m/W");
}

double wavelength_factor(std::string_view tag) {
  if (tag == "nm") return kNanometre;
  if (tag == "m") return 1.0;
  unknown("wavelength", tag, "nm or m");
}

double alpha_factor(std::string_view tag) {
  if (tag == "1/cm") return kPerCm;
  if (tag == "1/m") return 1.0;
  unknown("alpha", tag, "1/cm or 1/m");
}

}  // namespace nlo::units
