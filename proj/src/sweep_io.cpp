#include "qswn/sweep_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "qswn/config.hpp"
#include "qswn/error.hpp"
#include "qswn/rng.hpp"
#include "qswn/version.hpp"

namespace qswn {

namespace {

void put_number(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
  } else {
    out << v;
  }
}

double read_number(const std::string& field, int line) {
  if (field == "nan" || field.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DomainError("sweep csv line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  const auto old_precision = out.precision(17);
  out << kSweepCsvHeader << '\n';
  for (const GridPointResult& p : result.points) {
    put_number(out, p.grid_value);
    out << ',';
    put_number(out, p.mean_entropy);
    out << ',';
    put_number(out, p.stderr_entropy);
    out << ',';
    put_number(out, p.mean_gap_ratio);
    out << ',' << p.realizations << '\n';
  }
  out.precision(old_precision);
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("sweep csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) throw DomainError("sweep csv header mismatch: '" + line + "'");
  std::vector<SweepRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (fields.size() != 5) {
      throw DomainError("sweep csv line " + std::to_string(number) + ": expected 5 fields");
    }
    SweepRow row;
    row.grid_value = read_number(fields[0], number);
    row.mean_entropy = read_number(fields[1], number);
    row.stderr_entropy = read_number(fields[2], number);
    row.mean_gap_ratio = read_number(fields[3], number);
    row.realizations = static_cast<int>(read_number(fields[4], number));
    if (std::isnan(row.grid_value)) {
      throw DomainError("sweep csv line " + std::to_string(number) + ": missing grid value");
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<CurvePoint> curve_points(const std::vector<SweepRow>& rows) {
  std::vector<CurvePoint> out;
  out.reserve(rows.size());
  for (const SweepRow& r : rows) {
    const bool complete = std::isfinite(r.mean_entropy);
    out.push_back({r.grid_value, r.mean_entropy, complete ? r.stderr_entropy : 0.0, complete});
  }
  return out;
}

nlohmann::json sweep_manifest(const SweepResult& result, const std::vector<StageTiming>& timings,
                              const std::map<std::string, std::string>& outputs) {
  using nlohmann::json;
  const SweepConfig& c = result.config;
  json manifest;
  manifest["software"] = {{"name", "qswn"}, {"version", kVersion}};
  manifest["rng"] = std::string(kRngIdentifier);
  manifest["seed_derivation"] =
      "realization = mix(mix(master, grid_index), realization_index); "
      "graph = mix(realization, 0x67726170); potential = mix(realization, 0x706f7465)";
  manifest["master_seed"] = c.master_seed;
  manifest["config"] = config_file_from(c).to_text();
  manifest["grid"] = c.grid;
  json points = json::array();
  for (const GridPointResult& p : result.points) {
    json point = {{"grid_value", p.grid_value},
                  {"shortcut_count", p.shortcut_count},
                  {"complete", p.complete},
                  {"realizations", p.realizations},
                  {"seeds", p.seeds}};
    if (!p.failure.empty()) point["failure"] = p.failure;
    points.push_back(std::move(point));
  }
  manifest["points"] = std::move(points);
  json stages = json::array();
  for (const StageTiming& t : timings) stages.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  manifest["wall_clock"] = std::move(stages);
  manifest["outputs"] = outputs;
  manifest["complete"] = result.complete();
  return manifest;
}

SweepConfig config_from_manifest(const nlohmann::json& manifest) {
  if (!manifest.contains("config") || !manifest["config"].is_string()) {
    throw ConfigError("config", "manifest has no config snapshot");
  }
  std::istringstream in(manifest["config"].get<std::string>());
  return sweep_config_from(ConfigFile::parse(in, "<manifest>"));
}

}  // namespace qswn
