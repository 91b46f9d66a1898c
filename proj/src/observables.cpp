#include "dwlab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dwlab/error.hpp"

namespace dwlab::observables {

namespace {

using Complex = std::complex<double>;

constexpr double kClamp = 1e-9;
constexpr double kMinProbability = 1e-14;

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

/// Entropy of an unnormalised 2x2 Hermitian block [[a, b], [conj b, d]] after
/// dividing by its trace; returns p * S so that p = 0 contributes nothing.
double weighted_entropy_2x2(double a, double d, Complex b) {
  const double p = a + d;
  if (p < kMinProbability) return 0.0;
  const double disc = std::sqrt((a - d) * (a - d) + 4.0 * std::norm(b));
  const double l1 = std::max(0.0, 0.5 * (p + disc) / p);
  const double l2 = std::max(0.0, 0.5 * (p - disc) / p);
  return -p * (xlogx(l1) + xlogx(l2));
}

void require_same_size(const fock::GroundState& a, const fock::GroundState& b) {
  if (a.n_particles() != b.n_particles() || a.amplitudes.size() != b.amplitudes.size()) {
    throw InvalidInput("ground states have different particle numbers");
  }
}

}  // namespace

double fidelity(const fock::GroundState& a, const fock::GroundState& b) {
  require_same_size(a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.amplitudes.size(); ++k) s += a.amplitudes[k] * b.amplitudes[k];
  return std::min(1.0, std::abs(s));
}

double chi_from_pair(const fock::GroundState& a, const fock::GroundState& b, double delta_lambda) {
  require_same_size(a, b);
  double overlap = 0.0;
  for (std::size_t k = 0; k < a.amplitudes.size(); ++k) {
    overlap += a.amplitudes[k] * b.amplitudes[k];
  }
  const double sign = overlap < 0.0 ? -1.0 : 1.0;
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.amplitudes.size(); ++k) {
    const double d = a.amplitudes[k] - sign * b.amplitudes[k];
    d2 += d * d;
  }
  const double infidelity = 0.5 * d2;  // 1 - F
  if (!(infidelity < 1.0)) throw DegeneracyError("fidelity vanished between neighbouring ground states");
  return -2.0 * std::log1p(-infidelity) / (delta_lambda * delta_lambda);
}

double default_delta_lambda(std::size_t n_particles) {
  return 1e-4 / std::sqrt(static_cast<double>(std::max<std::size_t>(n_particles, 1)));
}

ChiResult chi_finite_difference(const fock::ModelParams& params,
                                std::optional<double> delta_lambda) {
  params.validate();
  double delta = delta_lambda.value_or(default_delta_lambda(params.n_particles));
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidInput("chi_finite_difference: delta_lambda must be > 0");
  }

  auto shifted = [&](double d) {
    fock::ModelParams p = params;
    p.lambda += d;
    return fock::ground_state(p);
  };

  const auto base = fock::ground_state(params);
  const auto far = shifted(delta);
  const auto near = shifted(0.5 * delta);
  const double coarse = chi_from_pair(base, far, delta);
  const double fine = chi_from_pair(base, near, 0.5 * delta);

  ChiResult result{fine, 0.5 * delta, false};
  result.converged = std::abs(fine - coarse) <= 1e-3 * std::abs(fine) + 1e-12 &&
                     !base.quasi_degenerate && !far.quasi_degenerate && !near.quasi_degenerate;
  return result;
}

double chi_perturbative(const fock::ModelParams& params, ChiDenominator denominator) {
  const auto spectrum = fock::full_spectrum(params);
  const auto dh = fock::interaction_derivative(params.n_particles);
  const double e0 = spectrum.front().value;
  const double width = spectrum.back().value - e0;
  if (spectrum.size() > 1 && !(spectrum[1].value - e0 > 1e-12 * std::max(width, 1e-300))) {
    throw DegeneracyError("chi_perturbative: ground state is quasi-degenerate");
  }

  const auto& psi0 = spectrum.front().vector;
  std::vector<double> dh_psi0(psi0.size());
  for (std::size_t k = 0; k < psi0.size(); ++k) dh_psi0[k] = dh[k] * psi0[k];

  double chi = 0.0;
  for (std::size_t n = 1; n < spectrum.size(); ++n) {
    double element = 0.0;
    const auto& psin = spectrum[n].vector;
    for (std::size_t k = 0; k < psin.size(); ++k) element += psin[k] * dh_psi0[k];
    const double gap = spectrum[n].value - e0;
    const double denom = denominator == ChiDenominator::Squared ? gap * gap : gap;
    chi += element * element / denom;
  }
  return chi;
}

HermitianMatrix rho1(const fock::GroundState& gs) {
  const std::size_t n = gs.n_particles();
  const auto& c = gs.amplitudes;
  const double nd = static_cast<double>(n);
  double ll = 0.0, rr = 0.0, lr = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double p = c[k] * c[k];
    ll += static_cast<double>(k) * p;
    rr += static_cast<double>(n - k) * p;
  }
  for (std::size_t k = 0; k < n; ++k) {
    lr += c[k + 1] * c[k] * std::sqrt(static_cast<double>(k + 1) * static_cast<double>(n - k));
  }
  HermitianMatrix r(2);
  r(0, 0) = ll / nd;
  r(1, 1) = rr / nd;
  r(0, 1) = lr / nd;
  r(1, 0) = lr / nd;
  return r;
}

HermitianMatrix rho2(const fock::GroundState& gs) {
  const std::size_t n = gs.n_particles();
  if (n < 2) throw InvalidInput("rho2 needs at least two particles");
  const auto& c = gs.amplitudes;
  const double nd = static_cast<double>(n);

  double llll = 0.0, rrrr = 0.0, mixed = 0.0, pair_hop = 0.0, hop_l = 0.0, hop_r = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double p = c[k] * c[k];
    const double kl = static_cast<double>(k);
    const double kr = static_cast<double>(n - k);
    llll += kl * (kl - 1.0) * p;
    rrrr += kr * (kr - 1.0) * p;
    mixed += kl * kr * p;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double kl = static_cast<double>(k);
    const double amp = c[k + 1] * c[k] * std::sqrt((kl + 1.0) * (nd - kl));
    hop_l += kl * amp;               // <a_L^+ a_R^+ a_L a_L>
    hop_r += (nd - kl - 1.0) * amp;  // <a_R^+ a_R^+ a_R a_L>
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double kl = static_cast<double>(k);
    pair_hop +=
        c[k + 2] * c[k] * std::sqrt((kl + 1.0) * (kl + 2.0) * (nd - kl) * (nd - kl - 1.0));
  }

  const double norm = 1.0 / (nd * (nd - 1.0));
  HermitianMatrix r(4);
  r(0, 0) = llll * norm;
  r(3, 3) = rrrr * norm;
  for (std::size_t a : {1u, 2u}) {
    for (std::size_t b : {1u, 2u}) r(a, b) = mixed * norm;
    r(0, a) = r(a, 0) = hop_l * norm;
    r(3, a) = r(a, 3) = hop_r * norm;
  }
  r(0, 3) = r(3, 0) = pair_hop * norm;
  return r;
}

HermitianMatrix trace_out_b(const HermitianMatrix& rho_ab) {
  if (rho_ab.dim() != 4) throw InvalidInput("trace_out_b expects a 4x4 matrix");
  HermitianMatrix out(2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      out(i, k) = rho_ab(2 * i, 2 * k) + rho_ab(2 * i + 1, 2 * k + 1);
    }
  }
  return out;
}

double von_neumann_entropy(const HermitianMatrix& rho) {
  if (std::abs(rho.trace() - 1.0) > kClamp) {
    throw InvalidDensityMatrix("density matrix trace differs from 1");
  }
  numerics::HermitianEigen eig;
  try {
    eig = numerics::eigh_hermitian_small(rho);
  } catch (const InvalidInput& e) {
    throw InvalidDensityMatrix(e.what());
  }
  double s = 0.0;
  for (double p : eig.values) {
    if (p < -kClamp) throw InvalidDensityMatrix("density matrix has a negative eigenvalue");
    s -= xlogx(std::max(p, 0.0));
  }
  return std::max(s, 0.0);
}

std::pair<HermitianMatrix, HermitianMatrix> measurement_projectors(MeasurementBasis basis) {
  const double c = std::cos(0.5 * basis.theta);
  const double s = std::sin(0.5 * basis.theta);
  const Complex phase = std::polar(1.0, basis.azimuth);
  const Complex phi1[2] = {c, s * phase};
  const Complex phi2[2] = {s, -c * phase};
  HermitianMatrix m1(2), m2(2);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t col = 0; col < 2; ++col) {
      m1(r, col) = phi1[r] * std::conj(phi1[col]);
      m2(r, col) = phi2[r] * std::conj(phi2[col]);
    }
  }
  return {m1, m2};
}

ConditionalState measure_b(const HermitianMatrix& rho_ab, const HermitianMatrix& m) {
  if (rho_ab.dim() != 4 || m.dim() != 2) throw InvalidInput("measure_b: expected 4x4 and 2x2");
  HermitianMatrix lift(4);  // I (x) M
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t l = 0; l < 2; ++l) lift(2 * i + j, 2 * i + l) = m(j, l);
    }
  }
  HermitianMatrix post = lift * rho_ab * lift;
  ConditionalState out;
  out.probability = post.trace().real();
  if (out.probability >= kMinProbability) {
    out.rho_ab = post.scaled(1.0 / out.probability);
    out.rho_a = trace_out_b(out.rho_ab);
  } else {
    out.rho_ab = post;
    out.rho_a = trace_out_b(post);
  }
  return out;
}

double measured_conditional_entropy(const HermitianMatrix& rho_ab, MeasurementBasis basis) {
  const double c = std::cos(0.5 * basis.theta);
  const double s = std::sin(0.5 * basis.theta);
  const Complex phase = std::polar(1.0, basis.azimuth);
  const Complex outcomes[2][2] = {{c, s * phase}, {s, -c * phase}};

  double total = 0.0;
  for (const auto& phi : outcomes) {
    // (rho_A^k)_{ik} p_k = sum_{j,l} conj(phi_j) rho_{(ij),(kl)} phi_l
    Complex block[2][2] = {};
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
          for (std::size_t l = 0; l < 2; ++l) {
            acc += std::conj(phi[j]) * rho_ab(2 * i + j, 2 * k + l) * phi[l];
          }
        }
        block[i][k] = acc;
      }
    }
    total += weighted_entropy_2x2(block[0][0].real(), block[1][1].real(), block[0][1]);
  }
  return total;
}

CorrelationSet classical_and_discord(const HermitianMatrix& rho_ab, const HermitianMatrix& rho_a,
                                     DiscordOptions options) {
  if (rho_ab.dim() != 4 || rho_a.dim() != 2) {
    throw InvalidInput("classical_and_discord: expected 4x4 and 2x2 density matrices");
  }
  if (options.grid_intervals < 2) throw InvalidInput("grid_intervals must be >= 2");

  CorrelationSet out;
  out.s1 = von_neumann_entropy(rho_a);
  out.s2 = von_neumann_entropy(rho_ab);
  out.mutual_info = 2.0 * out.s1 - out.s2;

  const std::size_t g = options.grid_intervals;
  const double dtheta = std::numbers::pi / static_cast<double>(g);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(g);
  std::vector<double> grid((g + 1) * (g + 1));
  auto at = [&](std::size_t i, std::size_t j) -> double& { return grid[i * (g + 1) + j]; };
  // Nodes as pi * i / g so the last one is exactly pi (and 2 pi).
  auto theta_at = [g](std::size_t i) {
    return std::numbers::pi * static_cast<double>(i) / static_cast<double>(g);
  };
  auto phi_at = [g](std::size_t j) {
    return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(g);
  };

  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i <= g; ++i) {
    for (std::size_t j = 0; j <= g; ++j) {
      at(i, j) = measured_conditional_entropy(rho_ab, {theta_at(i), phi_at(j)});
      if (at(i, j) < at(bi, bj)) {
        bi = i;
        bj = j;
      }
    }
  }

  double best = at(bi, bj);
  MeasurementBasis arg{theta_at(bi), phi_at(bj)};

  if (options.refine) {
    auto parabolic_min = [](double x0, double x1, double x2, double f0, double f1, double f2,
                            double h) -> std::optional<double> {
      const double xs[3] = {x0, x1, x2};
      const double ys[3] = {-f0, -f1, -f2};
      const auto pk = numerics::refine_peak(xs, ys, 1);
      if (pk.degenerate) return std::nullopt;
      return std::clamp(pk.x, x1 - h, x1 + h);
    };

    if (bi > 0 && bi < g) {
      if (auto t = parabolic_min(arg.theta - dtheta, arg.theta, arg.theta + dtheta,
                                 at(bi - 1, bj), best, at(bi + 1, bj), dtheta)) {
        const double theta = std::clamp(*t, 0.0, std::numbers::pi);
        const double f = measured_conditional_entropy(rho_ab, {theta, arg.azimuth});
        if (f < best) {
          best = f;
          arg.theta = theta;
        }
      }
    }
    // phi is periodic; the refined theta needs fresh neighbours.
    const double fl = measured_conditional_entropy(rho_ab, {arg.theta, arg.azimuth - dphi});
    const double fr = measured_conditional_entropy(rho_ab, {arg.theta, arg.azimuth + dphi});
    if (auto p = parabolic_min(arg.azimuth - dphi, arg.azimuth, arg.azimuth + dphi, fl, best, fr,
                               dphi)) {
      const double f = measured_conditional_entropy(rho_ab, {arg.theta, *p});
      if (f < best) {
        best = f;
        arg.azimuth = *p;
      }
    }
    const double two_pi = 2.0 * std::numbers::pi;
    arg.azimuth = std::fmod(std::fmod(arg.azimuth, two_pi) + two_pi, two_pi);
  }

  out.classical = out.s1 - best;
  out.discord = out.mutual_info - out.classical;
  out.argmin_basis = arg;
  return out;
}

CorrelationSet correlations(const fock::GroundState& gs, DiscordOptions options) {
  if (gs.n_particles() < 2) throw InvalidInput("correlations need at least two particles");
  return classical_and_discord(rho2(gs), rho1(gs), options);
}

}  // namespace dwlab::observables
