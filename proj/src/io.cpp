#include "dwlab/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "dwlab/error.hpp"

namespace dwlab::io {

namespace {

std::string to_chars_string(double v, std::optional<int> precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = precision
                       ? std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                       std::chars_format::general, *precision)
                       : std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::string format_double(double v) { return to_chars_string(v, 17); }

std::string format_double_short(double v) { return to_chars_string(v, std::nullopt); }

double parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw InvalidInput("not a number: '" + std::string(s) + "'");
  }
  return v;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::random_device rd;
  const auto tmp = dir / (path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(std::string_view content) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(content.data(), content.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config;
  j["version"] = version;
  j["wall_seconds"] = wall_seconds;
  j["warnings"] = warnings;
  j["summary"] = summary;
  j["outputs"] = nlohmann::json::array();
  for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}});
  return j;
}

std::filesystem::path manifest_path(const std::filesystem::path& out) {
  return std::filesystem::path(out.string() + ".manifest.json");
}

const std::vector<std::string> kScanColumns = {
    "lambda", "chi_fd",  "chi_fd_converged", "chi_sum",   "e0",      "gap",
    "s1",     "s2",      "mutual_info",      "classical_corr",       "discord",
    "theta_min", "phi_min", "mean_imbalance", "phase_label"};

std::string scan_to_csv(const scaling::ScanResult& result) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kScanColumns.size(); ++i) {
    out << (i ? "," : "") << kScanColumns[i];
  }
  out << "\r\n";
  for (const auto& r : result.rows) {
    std::optional<double> chi, mi, cc, dd, th, ph;
    std::string conv;
    if (r.chi_fd) {
      chi = r.chi_fd->chi;
      conv = r.chi_fd->converged ? "true" : "false";
    }
    if (r.correlations) {
      mi = r.correlations->mutual_info;
      cc = r.correlations->classical;
      dd = r.correlations->discord;
      th = r.correlations->argmin_basis.theta;
      ph = r.correlations->argmin_basis.azimuth;
    }
    const std::string phase = r.phase ? std::string(fock::to_string(r.phase->phase)) : "";
    out << format_double(r.lambda) << ',' << csv_cell(chi) << ',' << conv << ','
        << csv_cell(r.chi_sum) << ',' << format_double(r.e0) << ',' << format_double(r.gap) << ','
        << csv_cell(r.s1) << ',' << csv_cell(r.s2) << ',' << csv_cell(mi) << ',' << csv_cell(cc)
        << ',' << csv_cell(dd) << ',' << csv_cell(th) << ',' << csv_cell(ph) << ','
        << format_double(r.mean_imbalance) << ',' << phase << "\r\n";
  }
  return out.str();
}

nlohmann::json scan_to_json(const scaling::ScanResult& result) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    nlohmann::json row;
    row["lambda"] = r.lambda;
    row["chi_fd"] = r.chi_fd ? nlohmann::json(r.chi_fd->chi) : nlohmann::json(nullptr);
    row["chi_fd_converged"] =
        r.chi_fd ? nlohmann::json(r.chi_fd->converged) : nlohmann::json(nullptr);
    row["chi_sum"] = opt(r.chi_sum);
    row["e0"] = r.e0;
    row["gap"] = r.gap;
    row["s1"] = opt(r.s1);
    row["s2"] = opt(r.s2);
    const auto& c = r.correlations;
    row["mutual_info"] = c ? nlohmann::json(c->mutual_info) : nlohmann::json(nullptr);
    row["classical_corr"] = c ? nlohmann::json(c->classical) : nlohmann::json(nullptr);
    row["discord"] = c ? nlohmann::json(c->discord) : nlohmann::json(nullptr);
    row["theta_min"] = c ? nlohmann::json(c->argmin_basis.theta) : nlohmann::json(nullptr);
    row["phi_min"] = c ? nlohmann::json(c->argmin_basis.azimuth) : nlohmann::json(nullptr);
    row["mean_imbalance"] = r.mean_imbalance;
    row["phase_label"] =
        r.phase ? nlohmann::json(std::string(fock::to_string(r.phase->phase))) : nlohmann::json(nullptr);
    rows.push_back(std::move(row));
  }
  return {{"columns", kScanColumns}, {"rows", rows}};
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size()) {
        throw InvalidInput("csv row " + std::to_string(table.rows.size() + 1) + " has " +
                           std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace dwlab::io
