#include "nlo/kernels.hpp"

#include <omp.h>

namespace nlo::kernels {

std::vector<double> transmittance_profile(const ZscanParams& params, std::span<const double> z,
                                          Execution exec) {
  std::vector<double> out(z.size());
  const auto n = static_cast<std::int64_t>(z.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = zscan_model(params, z[i]);
  } else {
    for (std::int64_t i = 0; i < n; ++i) out[i] = zscan_model(params, z[i]);
  }
  return out;
}

namespace {

void absorb(GridExtrema& acc, std::size_t i, double t) {
  if (t > acc.t_max || (t == acc.t_max && i < acc.i_max)) {
    acc.t_max = t;
    acc.i_max = i;
  }
  if (t < acc.t_min || (t == acc.t_min && i < acc.i_min)) {
    acc.t_min = t;
    acc.i_min = i;
  }
}

void merge(GridExtrema& acc, const GridExtrema& other) {
  if (other.t_max > acc.t_max || (other.t_max == acc.t_max && other.i_max < acc.i_max)) {
    acc.t_max = other.t_max;
    acc.i_max = other.i_max;
  }
  if (other.t_min < acc.t_min || (other.t_min == acc.t_min && other.i_min < acc.i_min)) {
    acc.t_min = other.t_min;
    acc.i_min = other.i_min;
  }
}

}  // namespace

GridExtrema grid_extrema(double dphi0, double dpsi0, std::span<const double> x,
                         Execution exec) {
  GridExtrema result;
  if (x.empty()) return result;
  const double t0 = closed_aperture_transmittance(x[0], dphi0, dpsi0);
  result = {0, 0, t0, t0};
  const auto n = static_cast<std::int64_t>(x.size());
  if (exec == Execution::serial) {
    for (std::int64_t i = 1; i < n; ++i)
      absorb(result, static_cast<std::size_t>(i), closed_aperture_transmittance(x[i], dphi0, dpsi0));
    return result;
  }
  std::vector<GridExtrema> partial(static_cast<std::size_t>(omp_get_max_threads()), result);
#pragma omp parallel
  {
    GridExtrema& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::int64_t i = 1; i < n; ++i)
      absorb(local, static_cast<std::size_t>(i), closed_aperture_transmittance(x[i], dphi0, dpsi0));
  }
  for (const auto& p : partial) merge(result, p);
  return result;
}

std::vector<ZscanFitResult> zscan_monte_carlo(const ZscanParams& truth,
                                              std::span<const double> z_grid, double noise_rel,
                                              std::uint64_t first_seed, std::size_t runs,
                                              Execution exec) {
  return parallel_map(runs, exec, [&](std::size_t i) {
    return fit_zscan(simulate_zscan(truth, z_grid, noise_rel, first_seed + i));
  });
}

}  // namespace nlo::kernels
