#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cmcbr/diagnostics.hpp"
#include "cmcbr/error.hpp"
#include "cmcbr/run_config.hpp"

using namespace cmcbr;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// splits a CSV line into numbers
std::vector<double> numbers(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

TEST_CASE("minimal config takes the defaults") {
  const RunConfig c = parse_config("command = verify\n");
  CHECK(c == RunConfig{});
  CHECK(parse_config("") == RunConfig{});
  CHECK(parse_config("# nothing here\n\n   \n") == RunConfig{});
}

TEST_CASE("config values") {
  const RunConfig c = parse_config(
      "command = evolve   # run it\n"
      "grid = 12\n"
      "period = 2\n"
      "kasner = 2/3, 2/3, -1/3\n"
      "t0 = -2\n"
      "t_end = -0.25\n"
      "dt = 0.01\n"
      "seed = 77\n"
      "trace_correction = off\n"
      "times = -1, -0.5, -0.125\n");
  CHECK(c.command == Command::Evolve);
  CHECK(c.grid.n[2] == 12);
  CHECK(c.grid.period[1] == 2.0);
  CHECK(c.kasner == KasnerParams{});
  CHECK(c.t0 == -2.0);
  CHECK(c.dt == 0.01);
  CHECK(c.seed == 77);
  CHECK_FALSE(c.trace_correction);
  CHECK(c.times == std::vector<double>{-1, -0.5, -0.125});

  CHECK(parse_config(serialize_config(c)) == c);

  RunConfig odd;
  odd.command = Command::RescaleTest;
  odd.kasner = KasnerParams::from_parameter(0.37);
  odd.t0 = -1.0 / 3.0;
  odd.lambda = 3.14159;
  odd.warp = 0.2;
  odd.output = "rows.csv";
  odd.snapshot = "last.snap";
  odd.output_cadence = 5;
  CHECK(parse_config(serialize_config(odd)) == odd);
}

TEST_CASE("config errors") {
  CHECK(kind_of([] { parse_config("kasner = 0.7, 0.7, -0.4\n"); }) == ErrorKind::ValidationError);
  CHECK(kind_of([] { parse_config("t0 = 0.5\n"); }) == ErrorKind::ValidationError);
  CHECK(kind_of([] { parse_config("t_end = -1\n"); }) == ErrorKind::ValidationError);
  CHECK(kind_of([] { parse_config("lambda = 1\n"); }) == ErrorKind::ValidationError);
  CHECK(kind_of([] { parse_config("warp = 1\n"); }) == ErrorKind::ValidationError);
  CHECK(kind_of([] { parse_config("times = -1, 0.5\n"); }) == ErrorKind::ValidationError);

  const auto unknown = [] { parse_config("grid = 8\n\nfrobnicate = 3\n"); };
  CHECK(kind_of(unknown) == ErrorKind::ParseError);
  CHECK(message_of(unknown).find("line 3") != std::string::npos);
  CHECK(kind_of([] { parse_config("grid 8\n"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_config("grid = eight\n"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_config("command = fly\n"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_config("kasner = 1, 0\n"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_command("fly"); }) == ErrorKind::ValidationError);
  for (Command c : {Command::Verify, Command::Evolve, Command::Oracle, Command::RescaleTest})
    CHECK(parse_command(to_string(c)) == c);
}

TEST_CASE("run commands") {
  std::ostringstream out, err;

  SUBCASE("verify on flat data") {
    RunConfig c = parse_config("command = verify\ngrid = 8\nkasner = 1, 0, 0\n");
    CHECK(run(c, out, err) == 0);
    CHECK(out.str().find("FAIL") == std::string::npos);
    CHECK(out.str().find("PASS lapse_solve") != std::string::npos);
  }

  SUBCASE("evolve flat data") {
    const RunConfig c = parse_config("command = evolve\ngrid = 8\nkasner = 1, 0, 0\nt_end = -0.9\n");
    CHECK(run(c, out, err) == 0);
    std::istringstream in(out.str());
    const auto rows = parse_records(in);
    REQUIRE(rows.size() >= 2);
    CHECK(rows.front().t == -1.0);
    CHECK(rows.back().t == -0.9);
    for (const auto& r : rows) CHECK(r.e_br < 1e-12);
    CHECK(err.str().find("monitor:") != std::string::npos);
  }

  SUBCASE("oracle table") {
    const RunConfig c = parse_config("command = oracle\ntimes = -1, -0.5, -0.25\n");
    CHECK(run(c, out, err) == 0);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("t,tau,", 0) == 0);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) rows.push_back(numbers(line));
    REQUIRE(rows.size() == 3);
    // e_br column scales as |t|^3
    for (const auto& r : rows) CHECK(r[13] / rows[0][13] == doctest::Approx(std::pow(r[0] / rows[0][0], 3)));
  }

  SUBCASE("errors become one line") {
    RunConfig c = parse_config("command = oracle\n");
    c.output = "/nonexistent-dir/table.csv";
    CHECK(run(c, out, err) == 2);
    const std::string text = err.str();
    CHECK(text.rfind("error: kind=SinkError message=\"", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  }
}
