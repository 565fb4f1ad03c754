#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "drivesim/trace_csv.hpp"

using namespace drivesim;

namespace {

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("schema") {
  const auto& cols = csv_columns();
  CHECK(cols.size() == 16 + 3 + 6);
  CHECK(cols.front() == "t_s");
  CHECK(cols[13] == "level");
  CHECK(cols.back() == "theta_1_hat_5_si");
}

TEST_CASE("single record") {
  TraceRecord r;
  r.t = 0.0;
  r.q = 0.1;
  const std::string text = to_csv({r});
  CHECK(count_lines(text) == 2);
  CHECK(text.substr(0, 4) == "t_s,");
  CHECK(std::count(text.begin(), text.end(), ',') == 2 * 24);
}

TEST_CASE("empty trace is rejected") {
  CHECK_THROWS_AS(to_csv(Trace{}), std::invalid_argument);
}

TEST_CASE("a closed-loop trace round-trips exactly") {
  Scenario s;
  s.mode = Mode::inverter;
  s.pwm = PwmConfig{};
  s.dt_plant = 2e-6;
  s.t_end = 0.05;
  const Trace trace = run(s).trace;
  const std::string text = to_csv(trace);
  CHECK(count_lines(text) == trace.size() + 1);
  CHECK(parse_csv(text) == trace);
  CHECK(to_csv(parse_csv(text)) == text);
}

TEST_CASE("file output") {
  const auto dir = std::filesystem::temp_directory_path() / "drivesim_csv_test";
  std::filesystem::create_directories(dir);
  TraceRecord r;
  r.V_applied = -50.0;
  r.level = 1;
  emit_csv({r, r}, dir / "t.csv");
  std::ifstream in(dir / "t.csv");
  CHECK(parse_csv(in) == Trace{r, r});
  CHECK_THROWS_AS(emit_csv({r}, dir / "missing_dir" / "t.csv"), std::system_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_csv(std::string{}), CsvError);
  CHECK_THROWS_AS(parse_csv(std::string{"a,b\n1,2\n"}), CsvError);
  TraceRecord r;
  std::string text = to_csv({r});
  CHECK_THROWS_AS(parse_csv(text + "1,2,3\n"), CsvError);
  CHECK_THROWS_AS(parse_csv(text.substr(0, text.size() - 3) + "x,0\n"), CsvError);
}
