#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyq/model.hpp"

namespace hyq::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, const std::string& key = {})
      : std::runtime_error("line " + std::to_string(line) + (key.empty() ? "" : " (" + key + ")") +
                           ": " + msg),
        line(line),
        key(key) {}
  int line;
  std::string key;
};

/// One `key = value` entry of a sectioned key-value file.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// One `[name]` section; repeated sections are kept in file order.
struct ConfigSection {
  std::string name;
  std::vector<ConfigEntry> entries;
  int line = 0;

  const ConfigEntry* find(const std::string& key) const;
  std::string require(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
};

struct ConfigDoc {
  std::vector<ConfigSection> sections;

  const ConfigSection* find(const std::string& name) const;
  std::vector<const ConfigSection*> all(const std::string& name) const;
};

ConfigDoc parse_config(std::istream& is);
ConfigDoc parse_config_file(const std::string& path);

std::vector<double> parse_numbers(const std::string& text, int line, const std::string& key);
double parse_number(const std::string& text, int line, const std::string& key);
long parse_integer(const std::string& text, int line, const std::string& key);

/// Model files: a [model] section with n, s, Z.rowI, A.rowI, alpha, followed
/// by any number of [nu.atom] / [nu.line] sections.
HybridModel parse_model(const ConfigDoc& doc);
HybridModel load_model(const std::string& path);
void write_model(const HybridModel& model, std::ostream& os);
std::string model_to_string(const HybridModel& model);

/// Field-by-field comparison used by the round-trip tests.
bool models_equal(const HybridModel& a, const HybridModel& b, double tol = 0.0);

/// 17-significant-digit float formatting shared by all text output.
std::string format_double(double v);

}  // namespace hyq::io
