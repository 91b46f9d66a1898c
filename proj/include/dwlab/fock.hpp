#pragma once

// Two-mode Bose-Hubbard model in the Fock basis |k, N-k>, k = n_L.
//
//   H = -J (a_L^+ a_R + a_R^+ a_L) - (U/2) [n_L(n_L-1) + n_R(n_R-1)] - V0 (n_L - n_R)
//
// with J = 1 and U = lambda / N. The mean-field bifurcation of this form sits
// at lambda = 2.

#include <cstddef>
#include <string_view>
#include <vector>

#include "dwlab/numerics.hpp"

namespace dwlab::fock {

struct ModelParams {
  std::size_t n_particles = 1;
  double lambda = 0.0;
  double tilt = 0.0;

  double hopping() const noexcept { return 1.0; }
  double interaction() const noexcept { return lambda / static_cast<double>(n_particles); }

  /// Throws InvalidInput unless N >= 1, lambda >= 0, tilt >= 0, all finite.
  void validate() const;
};

struct GroundState {
  ModelParams params;
  std::vector<double> amplitudes;  // c_k, k = 0..N, largest |c_k| positive
  double energy = 0.0;
  double gap = 0.0;
  bool quasi_degenerate = false;

  std::size_t n_particles() const noexcept { return params.n_particles; }
};

enum class Phase { Binomial, CatLike, SelfTrapped };

std::string_view to_string(Phase p) noexcept;

struct PhaseLabel {
  Phase phase = Phase::Binomial;
  std::vector<std::size_t> peak_positions;
  double asymmetry = 0.0;  // |<2k/N - 1>| under the weights
};

numerics::TridiagonalMatrix build_hamiltonian(const ModelParams& params);

/// Diagonal of dH/dlambda: -[k(k-1) + (N-k)(N-k-1)] / (2N).
std::vector<double> interaction_derivative(std::size_t n_particles);

GroundState ground_state(const ModelParams& params);

/// All N+1 eigenpairs, ascending. Cost grows as N^3.
std::vector<numerics::EigenPair> full_spectrum(const ModelParams& params);

std::vector<double> spectrum_weights(const GroundState& gs);

/// <2k/N - 1> under the ground-state weights.
double mean_imbalance(const GroundState& gs);

struct PhaseThresholds {
  double peak_prominence = 1e-3;
  double asymmetry_threshold = 0.1;
};

PhaseLabel classify_phase(const std::vector<double>& weights, PhaseThresholds thresholds = {});

}  // namespace dwlab::fock
