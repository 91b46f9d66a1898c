#pragma once

// Mean-field limit of the two-mode model: population imbalance z and relative
// phase replace the mode operators.

#include <cstddef>
#include <optional>
#include <vector>

namespace dwlab::semiclassical {

struct SemiclassicalPoint {
  double z = 0.0;
  double phase_diff = 0.0;
  double energy_per_particle = 0.0;
};

/// -sqrt(1 - z^2) cos(phi) - lambda/(4N) (N z^2 + N - 2) - V0 z.
/// Throws DomainError for |z| >= 1.
double energy_per_particle(double z, double phase_diff, double lambda, double tilt,
                           std::size_t n_particles);

/// d/dz of the energy at phi = 0. The (N-2)/N constant drops out.
double stationarity(double z, double lambda, double tilt);

/// Roots of stationarity() on (-1 + 1e-9, 1 - 1e-9).
std::vector<double> stationary_z(double lambda, double tilt, std::size_t n_particles,
                                 std::size_t grid_points = 20001);

/// Lowest-energy stationary point at phi = 0; ties go to the larger z.
SemiclassicalPoint z_min(double lambda, double tilt, std::size_t n_particles);

struct CriticalSearch {
  double resolution = 0.05;
  double jump_threshold = 0.1;
  double lambda_lo = 0.5;
  double lambda_hi = 4.0;
};

/// Smallest lambda where z_min(lambda) - z_min(lambda - resolution) exceeds the
/// jump threshold. std::nullopt when z_min grows smoothly over the whole range.
std::optional<double> critical_lambda(double tilt, std::size_t n_particles,
                                      CriticalSearch search = {});

}  // namespace dwlab::semiclassical
