#include "dwlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dwlab/error.hpp"
#include "dwlab/fock.hpp"
#include "dwlab/io.hpp"
#include "dwlab/scaling.hpp"
#include "dwlab/semiclassical.hpp"

#ifndef DWLAB_VERSION
#define DWLAB_VERSION "0.0.0"
#endif

namespace dwlab::cli {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto& item : split(s)) out.push_back(io::parse_double(item));
  if (out.empty()) throw InvalidInput(std::string(what) + " is empty");
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s, const char* what) {
  std::vector<std::size_t> out;
  for (const auto& item : split(s)) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.front() == '-') {
      throw InvalidInput(std::string(what) + ": not a size '" + item + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw InvalidInput(std::string(what) + " is empty");
  return out;
}

// DWLAB_THREADS caps the worker count; unset or invalid means all cores.
std::size_t thread_budget() {
  const char* env = std::getenv("DWLAB_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) return 0;
  return static_cast<std::size_t>(v);
}

// Writes the payload and its manifest, both atomically.
void emit(const std::string& out, const std::string& payload, io::RunManifest manifest,
          Clock::time_point start) {
  io::write_atomic(out, payload);
  manifest.version = DWLAB_VERSION;
  manifest.outputs.push_back({out, io::sha256_hex(payload)});
  manifest.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  io::write_atomic(io::manifest_path(out), manifest.to_json().dump(2) + "\n");
}

json fit_json(const scaling::ScalingFit& f) {
  return {{"slope", f.fit.slope},
          {"intercept", f.fit.intercept},
          {"r_squared", f.fit.r_squared},
          {"exponent", f.exponent}};
}

// scan -------------------------------------------------------------------------

struct ScanArgs {
  std::size_t n = 800;
  double v0 = 1e-10;
  double lambda_min = 1.8;
  double lambda_max = 2.5;
  std::size_t steps = 500;
  std::optional<double> dlambda;
  std::string observables = "chi";
  std::size_t discord_grid = 100;
  bool no_discord_refine = false;
  std::string chi_sum_form = "squared";
  double phase_prominence = fock::PhaseThresholds{}.peak_prominence;
  double phase_asymmetry = fock::PhaseThresholds{}.asymmetry_threshold;
  std::string out;
  std::string format = "csv";
  bool quiet = false;
};

int cmd_scan(const ScanArgs& a) {
  const auto start = Clock::now();
  scaling::ScanConfig cfg;
  cfg.n_particles = a.n;
  cfg.tilt = a.v0;
  cfg.lambda_min = a.lambda_min;
  cfg.lambda_max = a.lambda_max;
  cfg.lambda_steps = a.steps;
  cfg.delta_lambda = a.dlambda;
  cfg.observables = scaling::ObservableSet::parse(a.observables);
  cfg.discord.grid_intervals = a.discord_grid;
  cfg.discord.refine = !a.no_discord_refine;
  cfg.chi_denominator = a.chi_sum_form == "linear" ? observables::ChiDenominator::Linear
                                                   : observables::ChiDenominator::Squared;
  cfg.phase_thresholds = {a.phase_prominence, a.phase_asymmetry};
  cfg.threads = thread_budget();
  cfg.validate();

  std::mutex mu;
  scaling::ProgressFn progress;
  if (!a.quiet) {
    progress = [&mu](std::size_t done, std::size_t total) {
      std::lock_guard lock(mu);
      std::cerr << "scan: " << done << "/" << total << "\n";
    };
  }
  const auto result = scaling::scan(cfg, progress);

  const std::string payload =
      a.format == "json" ? io::scan_to_json(result).dump(2) + "\n" : io::scan_to_csv(result);

  io::RunManifest m;
  m.command = "scan";
  m.config = {{"n", a.n},
              {"v0", a.v0},
              {"lambda_min", a.lambda_min},
              {"lambda_max", a.lambda_max},
              {"steps", a.steps},
              {"dlambda", a.dlambda ? json(*a.dlambda) : json(nullptr)},
              {"observables", a.observables},
              {"discord_grid", a.discord_grid},
              {"discord_refine", !a.no_discord_refine},
              {"chi_sum_form", a.chi_sum_form},
              {"phase_prominence", a.phase_prominence},
              {"phase_asymmetry", a.phase_asymmetry},
              {"format", a.format},
              {"threads", cfg.threads}};
  m.warnings = result.warnings();
  json problems = json::array();
  for (const auto& r : result.rows) {
    if (!r.error.empty()) {
      problems.push_back({{"lambda", r.lambda}, {"error", r.error}});
    } else if (r.chi_fd && !r.chi_fd->converged) {
      problems.push_back({{"lambda", r.lambda}, {"error", "chi_fd not converged"}});
    }
  }
  m.summary = {{"rows", result.rows.size()}, {"row_warnings", problems}};
  emit(a.out, payload, std::move(m), start);
  if (result.warnings() > 0) {
    std::cerr << "scan: " << result.warnings() << " row(s) flagged, see manifest\n";
  }
  return kExitOk;
}

// spectrum ---------------------------------------------------------------------

struct SpectrumArgs {
  std::size_t n = 800;
  double v0 = 1e-10;
  std::string lambdas;
  std::string out;
};

int cmd_spectrum(const SpectrumArgs& a) {
  const auto start = Clock::now();
  const auto lambdas = parse_doubles(a.lambdas, "--lambdas");
  std::vector<std::vector<double>> columns;
  json labels = json::array();
  for (double lambda : lambdas) {
    const fock::ModelParams p{a.n, lambda, a.v0};
    p.validate();
    const auto gs = fock::ground_state(p);
    columns.push_back(fock::spectrum_weights(gs));
    json entry = {{"lambda", lambda}};
    try {
      const auto label = fock::classify_phase(columns.back());
      entry["phase"] = std::string(fock::to_string(label.phase));
      entry["asymmetry"] = label.asymmetry;
    } catch (const ClassificationError& e) {
      entry["phase"] = nullptr;
      entry["error"] = e.what();
    }
    labels.push_back(std::move(entry));
  }

  std::ostringstream csv;
  csv << "k";
  for (double lambda : lambdas) csv << ",lambda_" << io::format_double_short(lambda);
  csv << "\r\n";
  for (std::size_t k = 0; k <= a.n; ++k) {
    csv << k;
    for (const auto& col : columns) csv << ',' << io::format_double(col[k]);
    csv << "\r\n";
  }

  io::RunManifest m;
  m.command = "spectrum";
  m.config = {{"n", a.n}, {"v0", a.v0}, {"lambdas", lambdas}};
  m.summary = {{"columns", labels}};
  emit(a.out, csv.str(), std::move(m), start);
  return kExitOk;
}

// scaling ----------------------------------------------------------------------

struct ScalingArgs {
  double v0 = 1e-10;
  std::string n_list;
  std::string target = "chi-peaks";
  std::string lambda_window;
  std::optional<std::size_t> steps;
  double prominence = scaling::kDefaultChiProminence;
  double lambda_star = 2.0;
  std::size_t discord_grid = 100;
  std::string from_table;
  std::string out;
  bool quiet = false;
};

struct PeakRow {
  std::size_t n = 0;
  double lambda_max = 0.0;
  double height = 0.0;
};

// Rows grouped by peak index (peaks ordered by lambda within each N).
using PeakTable = std::vector<std::vector<PeakRow>>;

struct TableFile {
  PeakTable table;
  bool has_positions = false;
  bool has_heights = false;
};

TableFile table_from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto csv = io::parse_csv(buf.str());
  const auto cn = csv.column("n");
  const auto cl = csv.column("lambda_max");
  const auto ch = csv.column("height");
  const auto cp = csv.column("peak");
  if (!cn || (!cl && !ch)) throw InvalidInput(path + ": need columns n and lambda_max or height");
  TableFile file{{}, cl.has_value(), ch.has_value()};
  auto& table = file.table;
  for (const auto& row : csv.rows) {
    auto cell = [&](std::optional<std::size_t> c) -> std::string {
      return c && *c < row.size() ? row[*c] : std::string();
    };
    const std::size_t peak = cp ? parse_sizes(cell(cp), "peak").front() : 0;
    if (table.size() <= peak) table.resize(peak + 1);
    PeakRow r;
    r.n = parse_sizes(cell(cn), "n").front();
    r.lambda_max = cl ? io::parse_double(cell(cl)) : 0.0;
    r.height = ch ? io::parse_double(cell(ch)) : 0.0;
    table[peak].push_back(r);
  }
  return file;
}

int cmd_scaling(const ScalingArgs& a) {
  const auto start = Clock::now();
  const bool chi = a.target == "chi-peaks";
  const auto field = a.target == "discord-peak"       ? scaling::Field::Discord
                     : a.target == "mutual-info-peak" ? scaling::Field::MutualInfo
                                                      : scaling::Field::ChiFd;
  bool fit_positions = true;
  bool fit_heights = true;
  PeakTable table;
  json config = {{"v0", a.v0}, {"target", a.target}, {"lambda_star", a.lambda_star}};

  if (!a.from_table.empty()) {
    auto file = table_from_file(a.from_table);
    table = std::move(file.table);
    fit_positions = file.has_positions;
    fit_heights = file.has_heights;
    config["from_table"] = a.from_table;
    if (table.empty()) throw InvalidInput("table has no rows");
    for (const auto& group : table) {
      if (group.size() < 3) throw InvalidInput("need at least 3 system sizes per peak");
    }
  } else {
    const auto ns = parse_sizes(a.n_list, "--n-list");
    if (ns.size() < 3) throw InvalidInput("need at least 3 system sizes");
    std::vector<double> window = chi ? std::vector<double>{1.8, 2.5} : std::vector<double>{1.95, 2.25};
    if (!a.lambda_window.empty()) window = parse_doubles(a.lambda_window, "--lambda-window");
    if (window.size() != 2 || !(window[0] < window[1])) {
      throw InvalidInput("--lambda-window must be lo,hi with lo < hi");
    }
    scaling::ScanConfig cfg;
    cfg.tilt = a.v0;
    cfg.lambda_min = window[0];
    cfg.lambda_max = window[1];
    cfg.lambda_steps = a.steps.value_or(chi ? 500 : 301);
    cfg.discord.grid_intervals = a.discord_grid;
    cfg.threads = thread_budget();
    config["n_list"] = ns;
    config["lambda_window"] = window;
    config["steps"] = cfg.lambda_steps;
    config["prominence"] = a.prominence;
    if (!chi) config["discord_grid"] = a.discord_grid;

    scaling::PeakSearch search;
    search.prominence = a.prominence;
    for (std::size_t n : ns) {
      cfg.n_particles = n;
      cfg.validate();
      std::vector<scaling::PeakInfo> peaks;
      if (chi) {
        peaks = scaling::locate_peaks(cfg, field, search);
      } else if (auto p = scaling::highest_peak(cfg, field, search)) {
        peaks.push_back(*p);
      }
      if (!a.quiet) std::cerr << "scaling: N=" << n << " peaks=" << peaks.size() << "\n";
      if (peaks.empty()) throw Error("no peak found for N=" + std::to_string(n));
      if (!table.empty() && peaks.size() != table.size()) {
        throw Error("peak count changes with N (" + std::to_string(table.size()) + " vs " +
                    std::to_string(peaks.size()) + " at N=" + std::to_string(n) + ")");
      }
      table.resize(peaks.size());
      std::sort(peaks.begin(), peaks.end(), [](const auto& x, const auto& y) {
        return x.lambda_max < y.lambda_max;
      });
      for (std::size_t i = 0; i < peaks.size(); ++i) {
        table[i].push_back({n, peaks[i].lambda_max, peaks[i].height});
      }
    }
  }

  json peaks_json = json::array();
  json exponents = json::array();
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::vector<std::size_t> ns;
    std::vector<double> xs, hs;
    json rows = json::array();
    for (const auto& r : table[i]) {
      ns.push_back(r.n);
      xs.push_back(r.lambda_max);
      hs.push_back(r.height);
      json row = {{"n", r.n}};
      row["lambda_max"] = fit_positions ? json(r.lambda_max) : json(nullptr);
      row["height"] = fit_heights ? json(r.height) : json(nullptr);
      rows.push_back(std::move(row));
    }
    json entry = {{"peak", i}, {"rows", rows}};
    if (fit_positions) {
      const auto f = scaling::fit_position_exponent(ns, xs, a.lambda_star);
      entry["position_power_law"] = fit_json(f);
      exponents.push_back(f.exponent);
    }
    if (fit_heights) {
      entry["height_power_law"] =
          fit_json(scaling::fit_value_scaling(ns, hs, scaling::ValueModel::PowerLaw));
      entry["height_exponential"] =
          fit_json(scaling::fit_value_scaling(ns, hs, scaling::ValueModel::ExponentialInN));
      if (!chi && !fit_positions) exponents.push_back(entry["height_power_law"]["exponent"]);
    }
    peaks_json.push_back(std::move(entry));
  }

  const json doc = {{"target", a.target}, {"v0", a.v0}, {"peaks", peaks_json}};
  io::RunManifest m;
  m.command = "scaling";
  m.config = config;
  m.summary = {{"peaks", table.size()}, {"position_exponents", exponents}};
  emit(a.out, doc.dump(2) + "\n", std::move(m), start);
  return kExitOk;
}

// semiclassical ----------------------------------------------------------------

struct SemiclassicalArgs {
  double v0 = 1e-10;
  std::size_t n = 800;
  double lambda_min = 0.5;
  double lambda_max = 4.0;
  std::size_t steps = 351;
  double resolution = semiclassical::CriticalSearch{}.resolution;
  double jump_threshold = semiclassical::CriticalSearch{}.jump_threshold;
  std::string out;
};

int cmd_semiclassical(const SemiclassicalArgs& a) {
  const auto start = Clock::now();
  scaling::ScanConfig grid;  // reused only for node placement and range checks
  grid.n_particles = std::max<std::size_t>(a.n, 1);
  grid.tilt = a.v0;
  grid.lambda_min = a.lambda_min;
  grid.lambda_max = a.lambda_max;
  grid.lambda_steps = a.steps;
  grid.validate();
  if (!(a.resolution > 0.0) || !(a.jump_threshold > 0.0)) {
    throw InvalidInput("--resolution and --jump-threshold must be > 0");
  }

  std::ostringstream csv;
  csv << "lambda,z_min,energy_per_particle,n_stationary_points\r\n";
  for (std::size_t i = 0; i < a.steps; ++i) {
    const double lambda = grid.lambda_at(i);
    const auto pt = semiclassical::z_min(lambda, a.v0, a.n);
    const auto roots = semiclassical::stationary_z(lambda, a.v0, a.n);
    csv << io::format_double(lambda) << ',' << io::format_double(pt.z) << ','
        << io::format_double(pt.energy_per_particle) << ',' << roots.size() << "\r\n";
  }
  semiclassical::CriticalSearch search;
  search.resolution = a.resolution;
  search.jump_threshold = a.jump_threshold;
  const auto crit = semiclassical::critical_lambda(a.v0, a.n, search);
  csv << "# critical_lambda=" << (crit ? io::format_double(*crit) : std::string("none"))
      << "\r\n";

  io::RunManifest m;
  m.command = "semiclassical";
  m.config = {{"v0", a.v0},
              {"n", a.n},
              {"lambda_min", a.lambda_min},
              {"lambda_max", a.lambda_max},
              {"steps", a.steps},
              {"resolution", a.resolution},
              {"jump_threshold", a.jump_threshold}};
  m.summary = {{"critical_lambda", crit ? json(*crit) : json(nullptr)}};
  emit(a.out, csv.str(), std::move(m), start);
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Ground-state diagnostics for bosons in a tilted double well"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DWLAB_VERSION);

  ScanArgs scan;
  auto* s = app.add_subcommand("scan", "Sweep lambda and tabulate observables");
  s->add_option("--n", scan.n, "particle number")->capture_default_str();
  s->add_option("--v0", scan.v0, "tilt")->capture_default_str();
  s->add_option("--lambda-min", scan.lambda_min)->capture_default_str();
  s->add_option("--lambda-max", scan.lambda_max)->capture_default_str();
  s->add_option("--steps", scan.steps, "number of lambda nodes")->capture_default_str();
  s->add_option("--dlambda", scan.dlambda, "finite-difference step (default 1e-4/sqrt(N))");
  s->add_option("--observables", scan.observables,
                "comma list of chi,chi-sum,entropy,correlations,phase")
      ->capture_default_str();
  s->add_option("--discord-grid", scan.discord_grid, "intervals per measurement angle")
      ->capture_default_str();
  s->add_flag("--no-discord-refine", scan.no_discord_refine);
  s->add_option("--chi-sum-form", scan.chi_sum_form)
      ->check(CLI::IsMember({"squared", "linear"}))
      ->capture_default_str();
  s->add_option("--phase-prominence", scan.phase_prominence)->capture_default_str();
  s->add_option("--phase-asymmetry", scan.phase_asymmetry)->capture_default_str();
  s->add_option("--out", scan.out)->required();
  s->add_option("--format", scan.format)
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  s->add_flag("--quiet", scan.quiet, "no progress on stderr");

  SpectrumArgs spectrum;
  auto* sp = app.add_subcommand("spectrum", "Ground-state weights |c_k|^2");
  sp->add_option("--n", spectrum.n)->capture_default_str();
  sp->add_option("--v0", spectrum.v0)->capture_default_str();
  sp->add_option("--lambdas", spectrum.lambdas, "comma list")->required();
  sp->add_option("--out", spectrum.out)->required();

  ScalingArgs scal;
  auto* sc = app.add_subcommand("scaling", "Finite-size scaling of peak positions and heights");
  sc->add_option("--v0", scal.v0)->capture_default_str();
  sc->add_option("--n-list", scal.n_list, "comma list of particle numbers");
  sc->add_option("--target", scal.target)
      ->check(CLI::IsMember({"chi-peaks", "discord-peak", "mutual-info-peak"}))
      ->capture_default_str();
  sc->add_option("--lambda-window", scal.lambda_window, "lo,hi");
  sc->add_option("--steps", scal.steps, "coarse lambda nodes");
  sc->add_option("--prominence", scal.prominence, "relative peak prominence")
      ->capture_default_str();
  sc->add_option("--lambda-star", scal.lambda_star)->capture_default_str();
  sc->add_option("--discord-grid", scal.discord_grid)->capture_default_str();
  sc->add_option("--from-table", scal.from_table, "CSV with n, lambda_max, height[, peak]");
  sc->add_option("--out", scal.out)->required();
  sc->add_flag("--quiet", scal.quiet);

  SemiclassicalArgs semi;
  auto* sm = app.add_subcommand("semiclassical", "Mean-field z_min and critical lambda");
  sm->add_option("--v0", semi.v0)->capture_default_str();
  sm->add_option("--n", semi.n)->capture_default_str();
  sm->add_option("--lambda-min", semi.lambda_min)->capture_default_str();
  sm->add_option("--lambda-max", semi.lambda_max)->capture_default_str();
  sm->add_option("--steps", semi.steps)->capture_default_str();
  sm->add_option("--resolution", semi.resolution)->capture_default_str();
  sm->add_option("--jump-threshold", semi.jump_threshold)->capture_default_str();
  sm->add_option("--out", semi.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_scan(scan);
    if (sp->parsed()) return cmd_spectrum(spectrum);
    if (sc->parsed()) {
      if (scal.from_table.empty() && scal.n_list.empty()) {
        throw InvalidInput("scaling needs --n-list or --from-table");
      }
      return cmd_scaling(scal);
    }
    if (sm->parsed()) return cmd_semiclassical(semi);
  } catch (const InvalidInput& e) {
    std::cerr << "dwlab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "dwlab: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace dwlab::cli
