#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "drivesim/sim_engine.hpp"

namespace drivesim {

/// Malformed trace CSV input.
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header names, one per column, with unit suffixes. 16 scalar columns
/// followed by the 3 mechanical and 6 electrical estimates.
const std::vector<std::string>& csv_columns();

/// Writes the header and one row per record. Numbers use the shortest text
/// that reads back to the same double. Throws std::invalid_argument for an
/// empty trace.
void write_csv(std::ostream& os, const Trace& trace);
std::string to_csv(const Trace& trace);

/// write_csv to a file. Throws std::system_error with the OS message when the
/// file cannot be written.
void emit_csv(const Trace& trace, const std::filesystem::path& path);

Trace parse_csv(std::istream& is);
Trace parse_csv(const std::string& text);

}  // namespace drivesim
