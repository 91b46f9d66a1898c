#include "dwlab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "dwlab/error.hpp"

namespace dwlab::fock {

namespace {

/// Entry of largest magnitude; removed before solving, restored afterwards.
double diagonal_shift(const numerics::TridiagonalMatrix& h) {
  double shift = 0.0;
  for (double d : h.diag) {
    if (std::abs(d) > std::abs(shift)) shift = d;
  }
  return shift;
}

void fix_gauge(std::vector<double>& c) {
  std::size_t imax = 0;
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (std::abs(c[k]) > std::abs(c[imax])) imax = k;
  }
  if (c[imax] < 0.0) {
    for (double& v : c) v = -v;
  }
}

double pair_count(std::size_t n, std::size_t k) {
  const double kk = static_cast<double>(k);
  const double rest = static_cast<double>(n - k);
  return kk * (kk - 1.0) + rest * (rest - 1.0);
}

/// Hamiltonian minus `shift` on the diagonal, in long double.
std::pair<std::vector<long double>, std::vector<long double>> hamiltonian_long(
    const ModelParams& params, double shift) {
  using LD = long double;
  const std::size_t n = params.n_particles;
  const LD half_u = static_cast<LD>(params.lambda) / (2.0L * static_cast<LD>(n));
  std::vector<LD> diag(n + 1), off(n);
  for (std::size_t k = 0; k <= n; ++k) {
    const LD kk = static_cast<LD>(k), rest = static_cast<LD>(n - k);
    const LD pairs = kk * (kk - 1.0L) + rest * (rest - 1.0L);
    diag[k] = -half_u * pairs - static_cast<LD>(params.tilt) * (kk - rest) - static_cast<LD>(shift);
  }
  for (std::size_t k = 0; k < n; ++k) {
    off[k] = -std::sqrt(static_cast<LD>(k + 1) * static_cast<LD>(n - k));
  }
  return {std::move(diag), std::move(off)};
}

}  // namespace

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Binomial:
      return "binomial";
    case Phase::CatLike:
      return "cat-like";
    case Phase::SelfTrapped:
      return "self-trapped";
  }
  return "unknown";
}

void ModelParams::validate() const {
  if (n_particles < 1) throw InvalidInput("n_particles must be >= 1");
  if (!std::isfinite(lambda) || lambda < 0.0) throw InvalidInput("lambda must be finite and >= 0");
  if (!std::isfinite(tilt) || tilt < 0.0) throw InvalidInput("tilt must be finite and >= 0");
}

numerics::TridiagonalMatrix build_hamiltonian(const ModelParams& params) {
  params.validate();
  const std::size_t n = params.n_particles;
  const double half_u = 0.5 * params.interaction();
  const double j = params.hopping();
  numerics::TridiagonalMatrix h;
  h.diag.resize(n + 1);
  h.offdiag.resize(n);
  for (std::size_t k = 0; k <= n; ++k) {
    const double imbalance = 2.0 * static_cast<double>(k) - static_cast<double>(n);
    h.diag[k] = -half_u * pair_count(n, k) - params.tilt * imbalance;
  }
  for (std::size_t k = 0; k < n; ++k) {
    h.offdiag[k] = -j * std::sqrt(static_cast<double>(k + 1) * static_cast<double>(n - k));
  }
  return h;
}

std::vector<double> interaction_derivative(std::size_t n_particles) {
  if (n_particles < 1) throw InvalidInput("n_particles must be >= 1");
  std::vector<double> out(n_particles + 1);
  const double scale = -0.5 / static_cast<double>(n_particles);
  for (std::size_t k = 0; k <= n_particles; ++k) out[k] = scale * pair_count(n_particles, k);
  return out;
}

GroundState ground_state(const ModelParams& params) {
  auto h = build_hamiltonian(params);
  const double shift = diagonal_shift(h);
  for (double& d : h.diag) d -= shift;

  auto eig = numerics::eigh_tridiagonal(h, 2);
  GroundState gs;
  gs.params = params;
  gs.amplitudes = std::move(eig.pairs[0].vector);
  gs.energy = eig.pairs[0].value + shift;
  if (!eig.quasi_degenerate && params.n_particles > 1) {
    // Small gaps leave the double-precision vector mixed with the first
    // excited state; fidelity differences at nearby lambda feel that.
    const auto hl = hamiltonian_long(params, shift);
    auto polished = numerics::polish_eigenpair(hl.first, hl.second, gs.amplitudes);
    gs.amplitudes = std::move(polished.vector);
    gs.energy = polished.value + shift;
  }
  fix_gauge(gs.amplitudes);
  gs.gap = std::max(0.0, eig.pairs[1].value - eig.pairs[0].value);
  gs.quasi_degenerate = eig.quasi_degenerate;
  return gs;
}

std::vector<numerics::EigenPair> full_spectrum(const ModelParams& params) {
  auto h = build_hamiltonian(params);
  const double shift = diagonal_shift(h);
  for (double& d : h.diag) d -= shift;
  auto eig = numerics::eigh_tridiagonal(h);
  for (auto& p : eig.pairs) {
    p.value += shift;
    fix_gauge(p.vector);
  }
  return std::move(eig.pairs);
}

std::vector<double> spectrum_weights(const GroundState& gs) {
  std::vector<double> w(gs.amplitudes.size());
  std::transform(gs.amplitudes.begin(), gs.amplitudes.end(), w.begin(),
                 [](double c) { return c * c; });
  return w;
}

double mean_imbalance(const GroundState& gs) {
  const double n = static_cast<double>(gs.n_particles());
  double s = 0.0;
  for (std::size_t k = 0; k < gs.amplitudes.size(); ++k) {
    const double c = gs.amplitudes[k];
    s += c * c * (2.0 * static_cast<double>(k) / n - 1.0);
  }
  return s;
}

PhaseLabel classify_phase(const std::vector<double>& weights, PhaseThresholds thresholds) {
  if (weights.size() < 2) throw InvalidInput("classify_phase: need at least two weights");
  const double wmax = *std::max_element(weights.begin(), weights.end());
  if (!(wmax > 0.0)) throw ClassificationError("classify_phase: weights are not positive");

  const double n = static_cast<double>(weights.size() - 1);
  PhaseLabel label;
  double mean = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    mean += weights[k] * (2.0 * static_cast<double>(k) / n - 1.0);
  }
  label.asymmetry = std::min(1.0, std::abs(mean));

  for (const auto& m : numerics::local_maxima(weights, true)) {
    if (m.prominence >= thresholds.peak_prominence * wmax) label.peak_positions.push_back(m.index);
  }

  switch (label.peak_positions.size()) {
    case 0:
      throw ClassificationError("classify_phase: no peak detected");
    case 1: {
      const double offset = std::abs(2.0 * static_cast<double>(label.peak_positions[0]) / n - 1.0);
      label.phase = offset < thresholds.asymmetry_threshold ? Phase::Binomial : Phase::SelfTrapped;
      break;
    }
    case 2:
      label.phase = Phase::CatLike;
      break;
    default:
      throw ClassificationError("classify_phase: " + std::to_string(label.peak_positions.size()) +
                                " peaks detected");
  }
  return label;
}

}  // namespace dwlab::fock
