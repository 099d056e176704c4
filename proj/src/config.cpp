#include "qswn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qswn/error.hpp"

namespace qswn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string strip_comment(const std::string& s) {
  const auto pos = s.find_first_of("#;");
  return pos == std::string::npos ? s : s.substr(0, pos);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

double parse_double(const std::string& text, const std::string& field) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  return value;
}

template <typename Int>
Int parse_integer(const std::string& text, const std::string& field) {
  Int value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(field, "expected an integer, got '" + text + "'");
  return value;
}

bool parse_bool(const std::string& text, const std::string& field) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError(field, "expected true or false, got '" + text + "'");
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

class Reader {
 public:
  explicit Reader(const ConfigFile& file) : file_(file) {}

  const ConfigFile::Entry* find(const std::string& key) const {
    const auto it = file_.entries().find(key);
    return it == file_.entries().end() ? nullptr : &it->second;
  }

  // Re-throws with the origin prefixed so diagnostics point at the line.
  template <typename F>
  auto with_origin(const std::string& key, F&& parse) const {
    const auto* entry = find(key);
    try {
      return parse(entry->value);
    } catch (const ConfigError& e) {
      throw ConfigError(key, entry->origin + ": " + strip_field(e.what(), e.field()));
    }
  }

  double number(const std::string& key, double fallback) const {
    if (!find(key)) return fallback;
    return with_origin(key, [&](const std::string& v) { return parse_double(v, key); });
  }
  template <typename Int>
  Int integer(const std::string& key, Int fallback) const {
    if (!find(key)) return fallback;
    return with_origin(key, [&](const std::string& v) { return parse_integer<Int>(v, key); });
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!find(key)) return fallback;
    return with_origin(key, [&](const std::string& v) { return parse_bool(v, key); });
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    const auto* entry = find(key);
    return entry ? entry->value : fallback;
  }
  std::string origin(const std::string& key) const {
    const auto* entry = find(key);
    return entry ? entry->origin : std::string("<default>");
  }

 private:
  static std::string strip_field(const std::string& what, const std::string& field) {
    const std::string prefix = field + ": ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
  }

  const ConfigFile& file_;
};

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "scenario.kind", "scenario.width",    "scenario.lambda",  "system.n",
      "system.t",      "system.t1",         "system.strict_endpoints",
      "sweep.axis",    "sweep.grid",        "sweep.shortcuts",  "sweep.realizations",
      "sweep.seed",    "sweep.observables",
  };
  return keys;
}

ConfigFile ConfigFile::parse(std::istream& in, const std::string& source) {
  ConfigFile file;
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string origin = source + ":" + std::to_string(number);
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("", origin + ": unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("", origin + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    file.set(full, trim(body.substr(eq + 1)), origin);
  }
  return file;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  return parse(in, path);
}

void ConfigFile::set(const std::string& key, const std::string& value, const std::string& origin) {
  const auto& keys = known_config_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ConfigError(key, origin + ": unknown key");
  }
  entries_[key] = {value, origin};
}

void ConfigFile::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("", "--set expects key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "--set");
}

std::string ConfigFile::to_text() const {
  std::ostringstream out;
  std::string section;
  for (const auto& [key, entry] : entries_) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << '\n';
      out << '[' << s << "]\n";
      section = s;
    }
    out << key.substr(dot + 1) << " = " << entry.value << '\n';
  }
  return out.str();
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string spec = trim(text);
  if (spec.empty()) throw ConfigError("sweep.grid", "grid is empty");
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw ConfigError("sweep.grid", "range must be start:stop:step");
    const double start = parse_double(parts[0], "sweep.grid");
    const double stop = parse_double(parts[1], "sweep.grid");
    const double step = parse_double(parts[2], "sweep.grid");
    if (!(step > 0.0) || stop < start) throw ConfigError("sweep.grid", "range needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      grid.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return grid;
  }
  std::vector<double> grid;
  for (const std::string& item : split(spec, ',')) {
    if (item.empty()) throw ConfigError("sweep.grid", "empty grid entry");
    grid.push_back(parse_double(item, "sweep.grid"));
  }
  return grid;
}

SweepConfig sweep_config_from(const ConfigFile& file) {
  const Reader r(file);
  SweepConfig config;
  if (!r.find("scenario.kind")) throw ConfigError("scenario.kind", "missing required key");
  config.scenario = r.with_origin("scenario.kind", [](const std::string& v) {
    try {
      return parse_potential_kind(v);
    } catch (const ConfigError& e) {
      throw ConfigError("scenario.kind", e.what());
    }
  });
  config.width = r.number("scenario.width", 0.0);
  config.lambda = r.number("scenario.lambda", 0.0);
  if (!r.find("system.n")) throw ConfigError("system.n", "missing required key");
  config.n = r.integer<int>("system.n", 0);
  config.t = r.number("system.t", 1.0);
  config.t1 = r.number("system.t1", 1.0);
  config.strict_endpoints = r.boolean("system.strict_endpoints", false);

  const std::string axis = r.text("sweep.axis", "density");
  if (axis == "density") {
    config.axis = SweepAxis::Density;
  } else if (axis == "lambda") {
    config.axis = SweepAxis::Lambda;
  } else {
    throw ConfigError("sweep.axis", r.origin("sweep.axis") + ": expected density or lambda, got '" + axis + "'");
  }
  if (!r.find("sweep.grid")) throw ConfigError("sweep.grid", "missing required key");
  config.grid = r.with_origin("sweep.grid", [](const std::string& v) { return parse_grid(v); });
  config.shortcuts = r.integer<std::size_t>("sweep.shortcuts", 0);
  config.realizations = r.integer<int>("sweep.realizations", 1);
  config.master_seed = r.integer<std::uint64_t>("sweep.seed", 0);

  if (r.find("sweep.observables")) {
    config.observables = {false, false, false};
    for (const std::string& item : split(r.text("sweep.observables", ""), ',')) {
      if (item == "spectrum_entropy") {
        config.observables.spectrum_entropy = true;
      } else if (item == "gap_ratio") {
        config.observables.gap_ratio = true;
      } else if (item == "profiles") {
        config.observables.profiles = true;
      } else {
        throw ConfigError("sweep.observables",
                          r.origin("sweep.observables") + ": unknown observable '" + item + "'");
      }
    }
  }

  // Map validation failures back to config keys and lines.
  try {
    config.validate();
  } catch (const ConfigError& e) {
    static const std::map<std::string, std::string> field_keys = {
        {"n", "system.n"},           {"grid", "sweep.grid"},        {"realizations", "sweep.realizations"},
        {"t", "system.t"},           {"observables", "sweep.observables"},
        {"width", "scenario.width"}, {"lambda", "scenario.lambda"}, {"axis", "sweep.axis"},
        {"shortcuts", "sweep.shortcuts"}};
    const auto it = field_keys.find(e.field());
    const std::string key = it == field_keys.end() ? e.field() : it->second;
    const std::string prefix = e.field() + ": ";
    std::string message = e.what();
    if (message.rfind(prefix, 0) == 0) message = message.substr(prefix.size());
    throw ConfigError(key, r.origin(key) + ": " + message);
  }
  return config;
}

ConfigFile config_file_from(const SweepConfig& config) {
  ConfigFile file;
  const std::string origin = "<snapshot>";
  file.set("scenario.kind", to_string(config.scenario), origin);
  if (config.scenario == PotentialKind::Anderson) file.set("scenario.width", format_double(config.width), origin);
  if (config.scenario == PotentialKind::Harper && config.axis == SweepAxis::Density) {
    file.set("scenario.lambda", format_double(config.lambda), origin);
  }
  file.set("system.n", std::to_string(config.n), origin);
  file.set("system.t", format_double(config.t), origin);
  file.set("system.t1", format_double(config.t1), origin);
  file.set("system.strict_endpoints", config.strict_endpoints ? "true" : "false", origin);
  file.set("sweep.axis", to_string(config.axis), origin);
  std::string grid;
  for (std::size_t i = 0; i < config.grid.size(); ++i) grid += (i ? ", " : "") + format_double(config.grid[i]);
  file.set("sweep.grid", grid, origin);
  if (config.axis == SweepAxis::Lambda) file.set("sweep.shortcuts", std::to_string(config.shortcuts), origin);
  file.set("sweep.realizations", std::to_string(config.realizations), origin);
  file.set("sweep.seed", std::to_string(config.master_seed), origin);
  std::vector<std::string> obs;
  if (config.observables.spectrum_entropy) obs.push_back("spectrum_entropy");
  if (config.observables.gap_ratio) obs.push_back("gap_ratio");
  if (config.observables.profiles) obs.push_back("profiles");
  std::string joined;
  for (std::size_t i = 0; i < obs.size(); ++i) joined += (i ? ", " : "") + obs[i];
  file.set("sweep.observables", joined, origin);
  return file;
}

}  // namespace qswn
