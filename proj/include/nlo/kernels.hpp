#pragma once

// Data-parallel kernels. Each has a serial reference path and an OpenMP path
// selected by Execution; both produce bitwise identical results.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "nlo/zscan.hpp"

namespace nlo::kernels {

enum class Execution { serial, parallel };

/// zscan_model evaluated at every z.
std::vector<double> transmittance_profile(const ZscanParams& params, std::span<const double> z,
                                          Execution exec = Execution::serial);

struct GridExtrema {
  std::size_t i_max = 0;
  std::size_t i_min = 0;
  double t_max = 0.0;
  double t_min = 0.0;
};

/// Global arg-max / arg-min of closed_aperture_transmittance over x. Ties go to
/// the lowest index on both paths.
GridExtrema grid_extrema(double dphi0, double dpsi0, std::span<const double> x,
                         Execution exec = Execution::serial);

/// Runs f(0) ... f(count - 1) and returns the results in index order. The first
/// exception (by index) is rethrown after all tasks finish.
template <class F>
auto parallel_map(std::size_t count, Execution exec, F&& f)
    -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      slots[i].emplace(f(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (exec == Execution::parallel) {
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) run(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) run(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Simulates and fits `runs` noisy traces with seeds first_seed, first_seed+1, ...
std::vector<ZscanFitResult> zscan_monte_carlo(const ZscanParams& truth,
                                              std::span<const double> z_grid, double noise_rel,
                                              std::uint64_t first_seed, std::size_t runs,
                                              Execution exec = Execution::serial);

}  // namespace nlo::kernels
