#pragma once

// Lambda sweeps, peak detection and finite-size scaling fits.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dwlab/fock.hpp"
#include "dwlab/numerics.hpp"
#include "dwlab/observables.hpp"

namespace dwlab::scaling {

struct ObservableSet {
  bool chi = false;           // finite-difference fidelity susceptibility
  bool chi_sum = false;       // perturbative sum over the full spectrum
  bool entropy = false;       // S1, S2 only
  bool correlations = false;  // S1, S2, I, C, D
  bool phase = false;         // |c_k|^2 classification

  /// Parses a comma list drawn from {chi, chi-sum, entropy, correlations, phase}.
  static ObservableSet parse(std::string_view list);
};

struct ScanConfig {
  std::size_t n_particles = 800;
  double tilt = 1e-10;
  double lambda_min = 1.8;
  double lambda_max = 2.5;
  std::size_t lambda_steps = 500;
  std::optional<double> delta_lambda;  // default 1e-4 / sqrt(N)
  observables::DiscordOptions discord;
  ObservableSet observables{.chi = true};
  fock::PhaseThresholds phase_thresholds;
  observables::ChiDenominator chi_denominator = observables::ChiDenominator::Squared;
  std::size_t threads = 1;  // 0 = hardware concurrency

  /// steps >= 2 with lambda_min < lambda_max, or a single node with min == max.
  void validate() const;
  double lambda_at(std::size_t i) const;
};

struct ScanRow {
  double lambda = 0.0;
  double e0 = 0.0;
  double gap = 0.0;
  double mean_imbalance = 0.0;
  bool quasi_degenerate = false;
  std::optional<observables::ChiResult> chi_fd;
  std::optional<double> chi_sum;
  std::optional<double> s1;
  std::optional<double> s2;
  std::optional<observables::CorrelationSet> correlations;
  std::optional<fock::PhaseLabel> phase;
  std::string error;  // first numerical failure in this row, empty when clean
};

struct ScanResult {
  ScanConfig config;
  std::vector<ScanRow> rows;  // ascending lambda

  std::size_t warnings() const;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Evaluates the requested observables at every lambda node. Rows may run
/// concurrently; the output order and values do not depend on the thread count.
/// `progress` may be called from worker threads.
ScanResult scan(const ScanConfig& config, const ProgressFn& progress = {});

ScanRow evaluate_row(const ScanConfig& config, double lambda);

enum class Field { ChiFd, ChiSum, S1, S2, MutualInfo, Classical, Discord };

std::optional<Field> parse_field(std::string_view name);
std::string_view to_string(Field f) noexcept;

/// Column of a scan; rows that lack the value contribute 0.
std::vector<double> field_values(const ScanResult& result, Field field);

struct PeakInfo {
  double lambda_max = 0.0;
  double height = 0.0;
  std::size_t grid_index = 0;
};

/// Interior local maxima whose prominence divided by their height is at
/// least `prominence`, each refined by a parabola through its neighbours.
std::vector<PeakInfo> find_peaks(std::span<const double> lambdas, std::span<const double> values,
                                 double prominence);
std::vector<PeakInfo> find_peaks(const ScanResult& result, Field field, double prominence);

constexpr double kDefaultChiProminence = 0.05;

struct PeakSearch {
  double prominence = kDefaultChiProminence;
  std::size_t refine_nodes = 100;  // 0 disables the local re-scan
  double refine_half_width_cells = 2.0;
};

/// Coarse scan, peak detection, then for each peak a re-scan of `refine_nodes`
/// nodes spanning +-2 coarse cells followed by parabolic refinement.
std::vector<PeakInfo> locate_peaks(const ScanConfig& config, Field field, PeakSearch search = {});

/// Highest peak of `field` found by locate_peaks, if any.
std::optional<PeakInfo> highest_peak(const ScanConfig& config, Field field, PeakSearch search = {});

struct ScalingFit {
  double exponent = 0.0;  // -slope
  numerics::LinearFit fit;
  std::vector<std::size_t> n_values;
  double power_law_r_squared = 0.0;
  double exponential_r_squared = 0.0;
  double lambda_star = 0.0;  // position fits only
};

/// ln|lambda_max - lambda_star| against ln N.
ScalingFit fit_position_exponent(std::span<const std::size_t> n_values,
                                 std::span<const double> lambda_maxes, double lambda_star = 2.0);

/// As fit_position_exponent, with lambda_star chosen in [lo, hi] to maximise r^2.
ScalingFit fit_position_exponent_free_star(std::span<const std::size_t> n_values,
                                           std::span<const double> lambda_maxes, double lo,
                                           double hi);

enum class ValueModel { PowerLaw, ExponentialInN };

/// Power law: ln(value) vs ln N. Exponential: ln(value) vs N. Both r^2 reported.
ScalingFit fit_value_scaling(std::span<const std::size_t> n_values,
                             std::span<const double> values, ValueModel model);

}  // namespace dwlab::scaling
