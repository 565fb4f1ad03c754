#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "drivesim/sim_engine.hpp"

namespace drivesim {

/// Parse or validation failure in a scenario file. what() carries the
/// origin, line and field where known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where a value came from.
enum class Provenance { file, published, invented };

struct FieldNote {
  std::string key;  ///< "section.field"
  std::string value;
  Provenance provenance;
};

struct LoadedScenario {
  Scenario scenario;
  /// Every recognized field, in schema order, with its source.
  std::vector<FieldNote> fields;
};

/// Flat INI-style document: "[section]" headers, "key = value" lines, '#' or
/// ';' comments. Keys are stored as "section.key".
struct ConfigDocument {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string origin;
  std::map<std::string, Entry> entries;
};

ConfigDocument parse_config(const std::string& text, const std::string& origin);

/// Builds a scenario from a parsed document, filling absent fields from the
/// documented defaults. Required: scenario.mode and scenario.t_end_s.
LoadedScenario build_scenario(const ConfigDocument& doc);

LoadedScenario load_scenario_text(const std::string& text,
                                  const std::string& origin = "<text>");

LoadedScenario load_scenario(const std::filesystem::path& path);

/// Sets or replaces "section.key" (used by parameter sweeps).
void override_field(ConfigDocument& doc, const std::string& key,
                    const std::string& value);

std::string_view to_string(Provenance p);

}  // namespace drivesim
