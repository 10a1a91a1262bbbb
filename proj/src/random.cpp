#include "nlo/random.hpp"

#include <cmath>

#include "nlo/constants.hpp"

namespace nlo {

double NormalStream::uniform_open() {
  // 53 random mantissa bits, shifted from [0, 1) to (0, 1].
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 1.0 - u;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open()));
  const double theta = 2.0 * pi * uniform_open();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace nlo
