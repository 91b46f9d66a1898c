#include "dwlab/semiclassical.hpp"

#include <cassert>
#include <cmath>

#include "dwlab/error.hpp"
#include "dwlab/numerics.hpp"

namespace dwlab::semiclassical {

namespace {
constexpr double kEdge = 1e-9;
constexpr double kTieTolerance = 1e-14;
}  // namespace

double energy_per_particle(double z, double phase_diff, double lambda, double tilt,
                           std::size_t n_particles) {
  if (!(std::abs(z) < 1.0)) throw DomainError("energy_per_particle: |z| must be < 1");
  if (n_particles < 1) throw InvalidInput("energy_per_particle: n_particles must be >= 1");
  const double n = static_cast<double>(n_particles);
  return -std::sqrt(1.0 - z * z) * std::cos(phase_diff) -
         lambda / (4.0 * n) * (n * z * z + n - 2.0) - tilt * z;
}

double stationarity(double z, double lambda, double tilt) {
  return z / std::sqrt(1.0 - z * z) - 0.5 * lambda * z - tilt;
}

std::vector<double> stationary_z(double lambda, double tilt, std::size_t n_particles,
                                 std::size_t grid_points) {
  if (!(lambda >= 0.0)) throw InvalidInput("stationary_z: lambda must be >= 0");
  if (n_particles < 1) throw InvalidInput("stationary_z: n_particles must be >= 1");
  return numerics::find_roots([&](double z) { return stationarity(z, lambda, tilt); },
                              -1.0 + kEdge, 1.0 - kEdge, grid_points);
}

SemiclassicalPoint z_min(double lambda, double tilt, std::size_t n_particles) {
  const auto roots = stationary_z(lambda, tilt, n_particles);
  assert(!roots.empty() && "a stationary point always exists for V0 >= 0");
  if (roots.empty()) throw Error("z_min: no stationary point found");

  SemiclassicalPoint best;
  bool have = false;
  for (double z : roots) {
    const double e = energy_per_particle(z, 0.0, lambda, tilt, n_particles);
    if (!have || e < best.energy_per_particle - kTieTolerance ||
        (std::abs(e - best.energy_per_particle) <= kTieTolerance && z > best.z)) {
      best = {z, 0.0, e};
      have = true;
    }
  }
  return best;
}

std::optional<double> critical_lambda(double tilt, std::size_t n_particles,
                                      CriticalSearch search) {
  if (!(search.resolution > 0.0)) throw InvalidInput("critical_lambda: resolution must be > 0");
  const double res = search.resolution;
  auto jumps = [&](double lambda) {
    return z_min(lambda, tilt, n_particles).z - z_min(lambda - res, tilt, n_particles).z >
           search.jump_threshold;
  };

  const auto steps = static_cast<std::size_t>(
      std::floor((search.lambda_hi - search.lambda_lo) / res + 1e-9));
  for (std::size_t i = 1; i <= steps; ++i) {
    const double hi = search.lambda_lo + res * static_cast<double>(i);
    if (!jumps(hi)) continue;
    double lo = hi - res;
    double up = hi;
    while (up - lo > 1e-3 * res) {
      const double mid = 0.5 * (lo + up);
      if (jumps(mid)) {
        up = mid;
      } else {
        lo = mid;
      }
    }
    return up;
  }
  return std::nullopt;
}

}  // namespace dwlab::semiclassical
