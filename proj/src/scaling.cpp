#include "dwlab/scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "dwlab/error.hpp"

namespace dwlab::scaling {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t resolve_threads(std::size_t requested, std::size_t work) {
  std::size_t t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return std::clamp<std::size_t>(t, 1, std::max<std::size_t>(work, 1));
}

std::optional<double> value_of(const ScanRow& row, Field field) {
  switch (field) {
    case Field::ChiFd:
      if (row.chi_fd) return row.chi_fd->chi;
      return std::nullopt;
    case Field::ChiSum:
      return row.chi_sum;
    case Field::S1:
      return row.s1;
    case Field::S2:
      return row.s2;
    case Field::MutualInfo:
      if (row.correlations) return row.correlations->mutual_info;
      return std::nullopt;
    case Field::Classical:
      if (row.correlations) return row.correlations->classical;
      return std::nullopt;
    case Field::Discord:
      if (row.correlations) return row.correlations->discord;
      return std::nullopt;
  }
  return std::nullopt;
}

ObservableSet observables_for(Field field) {
  ObservableSet o;
  switch (field) {
    case Field::ChiFd:
      o.chi = true;
      break;
    case Field::ChiSum:
      o.chi_sum = true;
      break;
    case Field::S1:
    case Field::S2:
      o.entropy = true;
      break;
    case Field::MutualInfo:
    case Field::Classical:
    case Field::Discord:
      o.correlations = true;
      break;
  }
  return o;
}

}  // namespace

ObservableSet ObservableSet::parse(std::string_view list) {
  ObservableSet o;
  std::stringstream ss{std::string(list)};
  std::string item;
  bool any = false;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    any = true;
    if (item == "chi") {
      o.chi = true;
    } else if (item == "chi-sum") {
      o.chi_sum = true;
    } else if (item == "entropy") {
      o.entropy = true;
    } else if (item == "correlations") {
      o.correlations = true;
    } else if (item == "phase") {
      o.phase = true;
    } else {
      throw InvalidInput("unknown observable '" + item + "'");
    }
  }
  if (!any) throw InvalidInput("observable list is empty");
  return o;
}

void ScanConfig::validate() const {
  fock::ModelParams{n_particles, std::max(lambda_min, 0.0), tilt}.validate();
  if (!std::isfinite(lambda_min) || !std::isfinite(lambda_max) || lambda_min < 0.0) {
    throw InvalidInput("lambda range must be finite and non-negative");
  }
  if (lambda_steps == 0) throw InvalidInput("lambda_steps must be >= 1");
  if (lambda_steps == 1 ? lambda_min != lambda_max : !(lambda_min < lambda_max)) {
    throw InvalidInput("need lambda_min < lambda_max (or a single node with min == max)");
  }
  if (delta_lambda && !(*delta_lambda > 0.0)) throw InvalidInput("delta_lambda must be > 0");
  if (discord.grid_intervals < 2) throw InvalidInput("discord grid must have >= 2 intervals");
  if ((observables.correlations || observables.entropy) && n_particles < 2) {
    throw InvalidInput("entropies and correlations need N >= 2");
  }
}

double ScanConfig::lambda_at(std::size_t i) const {
  if (lambda_steps <= 1) return lambda_min;
  const double t = static_cast<double>(i) / static_cast<double>(lambda_steps - 1);
  return i + 1 == lambda_steps ? lambda_max : lambda_min + (lambda_max - lambda_min) * t;
}

std::size_t ScanResult::warnings() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ScanRow& r) {
    return !r.error.empty() || (r.chi_fd && !r.chi_fd->converged);
  }));
}

ScanRow evaluate_row(const ScanConfig& config, double lambda) {
  ScanRow row;
  row.lambda = lambda;
  const fock::ModelParams params{config.n_particles, lambda, config.tilt};
  auto note = [&row](const std::exception& e) {
    if (row.error.empty()) row.error = e.what();
  };

  std::optional<fock::GroundState> gs;
  try {
    gs = fock::ground_state(params);
    row.e0 = gs->energy;
    row.gap = gs->gap;
    row.quasi_degenerate = gs->quasi_degenerate;
    row.mean_imbalance = fock::mean_imbalance(*gs);
  } catch (const Error& e) {
    note(e);
    return row;
  }

  const auto& obs = config.observables;
  if (obs.chi) {
    try {
      row.chi_fd = observables::chi_finite_difference(params, config.delta_lambda);
    } catch (const Error& e) {
      note(e);
    }
  }
  if (obs.chi_sum) {
    try {
      row.chi_sum = observables::chi_perturbative(params, config.chi_denominator);
    } catch (const Error& e) {
      note(e);
    }
  }
  if (obs.correlations) {
    try {
      row.correlations = observables::correlations(*gs, config.discord);
      row.s1 = row.correlations->s1;
      row.s2 = row.correlations->s2;
    } catch (const Error& e) {
      note(e);
    }
  } else if (obs.entropy) {
    try {
      row.s1 = observables::von_neumann_entropy(observables::rho1(*gs));
      row.s2 = observables::von_neumann_entropy(observables::rho2(*gs));
    } catch (const Error& e) {
      note(e);
    }
  }
  if (obs.phase) {
    try {
      row.phase = fock::classify_phase(fock::spectrum_weights(*gs), config.phase_thresholds);
    } catch (const Error& e) {
      note(e);
    }
  }
  return row;
}

ScanResult scan(const ScanConfig& config, const ProgressFn& progress) {
  config.validate();
  ScanResult result;
  result.config = config;
  result.rows.resize(config.lambda_steps);

  const std::size_t workers = resolve_threads(config.threads, config.lambda_steps);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  auto work = [&] {
    for (std::size_t i = next++; i < config.lambda_steps; i = next++) {
      result.rows[i] = evaluate_row(config, config.lambda_at(i));
      const std::size_t d = ++done;
      if (progress) progress(d, config.lambda_steps);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  return result;
}

std::optional<Field> parse_field(std::string_view name) {
  if (name == "chi" || name == "chi_fd") return Field::ChiFd;
  if (name == "chi-sum" || name == "chi_sum") return Field::ChiSum;
  if (name == "s1") return Field::S1;
  if (name == "s2") return Field::S2;
  if (name == "mutual_info" || name == "mutual-info") return Field::MutualInfo;
  if (name == "classical_corr" || name == "classical") return Field::Classical;
  if (name == "discord") return Field::Discord;
  return std::nullopt;
}

std::string_view to_string(Field f) noexcept {
  switch (f) {
    case Field::ChiFd:
      return "chi_fd";
    case Field::ChiSum:
      return "chi_sum";
    case Field::S1:
      return "s1";
    case Field::S2:
      return "s2";
    case Field::MutualInfo:
      return "mutual_info";
    case Field::Classical:
      return "classical_corr";
    case Field::Discord:
      return "discord";
  }
  return "unknown";
}

std::vector<double> field_values(const ScanResult& result, Field field) {
  std::vector<double> out;
  out.reserve(result.rows.size());
  for (const auto& row : result.rows) out.push_back(value_of(row, field).value_or(0.0));
  return out;
}

std::vector<PeakInfo> find_peaks(std::span<const double> lambdas, std::span<const double> values,
                                 double prominence) {
  if (lambdas.size() != values.size()) throw InvalidInput("find_peaks: length mismatch");
  std::vector<PeakInfo> peaks;
  if (values.size() < 3) return peaks;
  for (const auto& m : numerics::local_maxima(values, false)) {
    const double h = values[m.index];
    if (!(h > 0.0) || m.prominence / h < prominence) continue;
    // Plateau maxima report their first sample; refine only strict peaks.
    const auto est = numerics::refine_peak(lambdas, values, m.index);
    peaks.push_back({est.x, est.y, m.index});
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const PeakInfo& a, const PeakInfo& b) { return a.lambda_max < b.lambda_max; });
  return peaks;
}

std::vector<PeakInfo> find_peaks(const ScanResult& result, Field field, double prominence) {
  std::vector<double> lambdas;
  lambdas.reserve(result.rows.size());
  for (const auto& r : result.rows) lambdas.push_back(r.lambda);
  return find_peaks(lambdas, field_values(result, field), prominence);
}

std::vector<PeakInfo> locate_peaks(const ScanConfig& config, Field field, PeakSearch search) {
  ScanConfig coarse = config;
  coarse.observables = observables_for(field);
  const auto result = scan(coarse);
  auto peaks = find_peaks(result, field, search.prominence);
  if (search.refine_nodes < 3 || coarse.lambda_steps < 2) return peaks;

  const double cell = (coarse.lambda_max - coarse.lambda_min) /
                      static_cast<double>(coarse.lambda_steps - 1);
  for (auto& peak : peaks) {
    const double centre = result.rows[peak.grid_index].lambda;
    ScanConfig local = coarse;
    local.lambda_min = std::max(0.0, centre - search.refine_half_width_cells * cell);
    local.lambda_max = centre + search.refine_half_width_cells * cell;
    local.lambda_steps = search.refine_nodes;
    const auto fine = scan(local);
    const auto ys = field_values(fine, field);
    std::vector<double> xs;
    for (const auto& r : fine.rows) xs.push_back(r.lambda);
    const auto imax = static_cast<std::size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
    if (imax == 0 || imax + 1 == ys.size()) {
      peak.lambda_max = xs[imax];
      peak.height = ys[imax];
    } else {
      const auto est = numerics::refine_peak(xs, ys, imax);
      peak.lambda_max = est.x;
      peak.height = std::max(est.y, ys[imax]);
    }
  }
  return peaks;
}

std::optional<PeakInfo> highest_peak(const ScanConfig& config, Field field, PeakSearch search) {
  const auto peaks = locate_peaks(config, field, search);
  if (peaks.empty()) return std::nullopt;
  return *std::max_element(peaks.begin(), peaks.end(), [](const PeakInfo& a, const PeakInfo& b) {
    return a.height < b.height;
  });
}

ScalingFit fit_position_exponent(std::span<const std::size_t> n_values,
                                 std::span<const double> lambda_maxes, double lambda_star) {
  if (n_values.size() != lambda_maxes.size()) throw InvalidInput("size mismatch");
  if (n_values.size() < 3) throw InvalidInput("need at least 3 system sizes");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const double d = std::abs(lambda_maxes[i] - lambda_star);
    if (!(d > 0.0)) throw InvalidInput("lambda_max coincides with lambda_star; log diverges");
    xs.push_back(std::log(static_cast<double>(n_values[i])));
    ys.push_back(std::log(d));
  }
  ScalingFit out;
  out.fit = numerics::linear_fit(xs, ys);
  out.exponent = -out.fit.slope;
  out.n_values.assign(n_values.begin(), n_values.end());
  out.power_law_r_squared = out.fit.r_squared;
  out.lambda_star = lambda_star;
  return out;
}

ScalingFit fit_position_exponent_free_star(std::span<const std::size_t> n_values,
                                           std::span<const double> lambda_maxes, double lo,
                                           double hi) {
  if (!(lo < hi)) throw InvalidInput("need lo < hi");
  auto score = [&](double star) {
    try {
      return fit_position_exponent(n_values, lambda_maxes, star).fit.r_squared;
    } catch (const InvalidInput&) {
      return -1.0;
    }
  };
  // Coarse scan then golden section on the best bracket.
  constexpr std::size_t kNodes = 201;
  double best_x = lo, best = -2.0;
  const double h = (hi - lo) / static_cast<double>(kNodes - 1);
  for (std::size_t i = 0; i < kNodes; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double s = score(x);
    if (s > best) {
      best = s;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - h), b = std::min(hi, best_x + h);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    if (score(c) > score(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  const double star = score(0.5 * (a + b)) >= best ? 0.5 * (a + b) : best_x;
  return fit_position_exponent(n_values, lambda_maxes, star);
}

ScalingFit fit_value_scaling(std::span<const std::size_t> n_values,
                             std::span<const double> values, ValueModel model) {
  if (n_values.size() != values.size()) throw InvalidInput("size mismatch");
  if (n_values.size() < 3) throw InvalidInput("need at least 3 system sizes");
  std::vector<double> log_n, lin_n, log_v;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw InvalidInput("fit_value_scaling: values must be positive");
    log_n.push_back(std::log(static_cast<double>(n_values[i])));
    lin_n.push_back(static_cast<double>(n_values[i]));
    log_v.push_back(std::log(values[i]));
  }
  const auto power = numerics::linear_fit(log_n, log_v);
  const auto expo = numerics::linear_fit(lin_n, log_v);
  ScalingFit out;
  out.fit = model == ValueModel::PowerLaw ? power : expo;
  out.exponent = -out.fit.slope;
  out.n_values.assign(n_values.begin(), n_values.end());
  out.power_law_r_squared = power.r_squared;
  out.exponential_r_squared = expo.r_squared;
  return out;
}

}  // namespace dwlab::scaling
