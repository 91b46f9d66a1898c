#pragma once

// Ground-state observables: fidelity and its susceptibility, one- and
// two-particle reduced density matrices, entropies, and the split of the
// two-particle mutual information into classical correlation and discord.

#include <cstddef>
#include <optional>
#include <utility>

#include "dwlab/fock.hpp"
#include "dwlab/numerics.hpp"

namespace dwlab::observables {

using numerics::HermitianMatrix;

struct MeasurementBasis {
  double theta = 0.0;    // [0, pi]
  double azimuth = 0.0;  // [0, 2 pi]
};

struct CorrelationSet {
  double s1 = 0.0;
  double s2 = 0.0;
  double mutual_info = 0.0;
  double classical = 0.0;
  double discord = 0.0;
  MeasurementBasis argmin_basis;
};

struct ChiResult {
  double chi = 0.0;
  double delta_lambda_used = 0.0;
  bool converged = false;
};

/// |<a|b>|. Throws InvalidInput when the particle numbers differ.
double fidelity(const fock::GroundState& a, const fock::GroundState& b);

/// -2 ln F / dlambda^2 evaluated without cancellation: F = 1 - |a - s b|^2 / 2.
double chi_from_pair(const fock::GroundState& a, const fock::GroundState& b, double delta_lambda);

/// Default step 1e-4 / sqrt(N).
double default_delta_lambda(std::size_t n_particles);

/// Forward differences at delta and delta/2; converged when the two agree to
/// 1e-3 relative. The delta/2 estimate is returned. Quasi-degenerate ground
/// states are reported as not converged.
ChiResult chi_finite_difference(const fock::ModelParams& params,
                                std::optional<double> delta_lambda = std::nullopt);

/// Power of (E_n - E_0) in the perturbative sum. Squared is the one consistent
/// with the fidelity definition; Linear is kept for comparison only.
enum class ChiDenominator { Squared, Linear };

/// sum_{n != 0} |<n| dH/dlambda |0>|^2 / (E_n - E_0)^p over the full spectrum.
double chi_perturbative(const fock::ModelParams& params,
                        ChiDenominator denominator = ChiDenominator::Squared);

/// One-particle density matrix, basis (L, R).
HermitianMatrix rho1(const fock::GroundState& gs);

/// Two-particle density matrix, basis (LL, LR, RL, RR), first index = particle A.
HermitianMatrix rho2(const fock::GroundState& gs);

/// Partial trace over the second particle of a 4x4 two-particle matrix.
HermitianMatrix trace_out_b(const HermitianMatrix& rho_ab);

/// -Tr rho ln rho in nats. Eigenvalues in [-1e-9, 0) are clamped to 0.
double von_neumann_entropy(const HermitianMatrix& rho);

/// M1 = |Phi1><Phi1|, M2 = |Phi2><Phi2| with
/// Phi1 = (cos t/2, sin t/2 e^{i phi}), Phi2 = (sin t/2, -cos t/2 e^{i phi}).
std::pair<HermitianMatrix, HermitianMatrix> measurement_projectors(MeasurementBasis basis);

struct ConditionalState {
  double probability = 0.0;
  HermitianMatrix rho_a;   // normalised state of A after outcome k on B
  HermitianMatrix rho_ab;  // normalised post-measurement two-particle state
};

/// Outcome of applying projector `m` (2x2) to particle B of `rho_ab` (4x4).
ConditionalState measure_b(const HermitianMatrix& rho_ab, const HermitianMatrix& m);

struct DiscordOptions {
  std::size_t grid_intervals = 100;
  bool refine = true;  // one parabolic step per parameter after the grid pass
};

/// Minimises sum_k p_k S(rho_A^k) over projective measurements on B on a
/// (grid_intervals + 1)^2 grid in (theta, phi). Ties go to the smallest theta,
/// then the smallest phi.
CorrelationSet classical_and_discord(const HermitianMatrix& rho_ab, const HermitianMatrix& rho_a,
                                     DiscordOptions options = {});

/// Conditional entropy sum_k p_k S(rho_A^k) for one measurement basis.
double measured_conditional_entropy(const HermitianMatrix& rho_ab, MeasurementBasis basis);

CorrelationSet correlations(const fock::GroundState& gs, DiscordOptions options = {});

}  // namespace dwlab::observables
