#pragma once

#include <cstdint>
#include <random>

namespace nlo {

/// Standard-normal deviates from a 64-bit Mersenne Twister (std::mt19937_64,
/// whose output sequence is fixed by the C++ standard) through the Box-Muller
/// transform. Unlike std::normal_distribution the stream is identical on every
/// platform and standard library for a given seed.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next();

 private:
  double uniform_open();  // (0, 1]

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nlo
