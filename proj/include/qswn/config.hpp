#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qswn/ensemble.hpp"

namespace qswn {

// Flat `key = value` text with `[section]` headers; keys are addressed as
// `section.key`. `#` and `;` start comments.
//
//   [scenario]
//   kind = anderson        # periodic | anderson | harper
//   width = 6.324555320336759
//   [system]
//   n = 500
//   [sweep]
//   grid = 0:1:0.05        # start:stop:step (inclusive) or a comma list
//   realizations = 100
//   seed = 42
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    std::string origin;  // "file:line" or "--set"
  };

  static ConfigFile parse(std::istream& in, const std::string& source = "<config>");
  static ConfigFile load(const std::string& path);

  // `section.key=value`; the key must be known.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value, const std::string& origin);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

  // Canonical text form, sections in key order.
  std::string to_text() const;

 private:
  std::map<std::string, Entry> entries_;
};

// Keys accepted in config files.
const std::vector<std::string>& known_config_keys();

// Builds and validates a sweep configuration. Errors are ConfigErrors whose
// message carries the origin (file:line) and the field name.
SweepConfig sweep_config_from(const ConfigFile& file);

// Inverse of sweep_config_from; values printed with round-trip precision.
ConfigFile config_file_from(const SweepConfig& config);

// Expands `start:stop:step` or `a, b, c` into grid values. Range values are
// rounded to 12 decimals so 0.1 + 0.2 style drift does not leak into output.
std::vector<double> parse_grid(const std::string& text);

}  // namespace qswn
