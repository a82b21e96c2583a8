#include "cmcbr/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "cmcbr/error.hpp"

namespace cmcbr {

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Verify: return "verify";
    case Command::Evolve: return "evolve";
    case Command::Oracle: return "oracle";
    case Command::RescaleTest: return "rescale-test";
  }
  return "verify";
}

Command parse_command(std::string_view text) {
  for (Command c : {Command::Verify, Command::Evolve, Command::Oracle, Command::RescaleTest})
    if (text == to_string(c)) return c;
  raise(ErrorKind::ValidationError, "unknown command '" + std::string(text) + "'");
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { raise(ErrorKind::ValidationError, what); };
  try {
    grid.validate();
    kasner.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (!(t0 < 0.0)) fail("t0 must be negative");
  if (!(t_end < 0.0)) fail("t_end must be negative");
  if (t0 == t_end) fail("t0 and t_end must differ");
  if (!(dt >= 0.0)) fail("dt must be nonnegative (0 selects the cfl step)");
  if (!(cfl > 0.0)) fail("cfl must be positive");
  if (!(perturb_amplitude >= 0.0)) fail("perturb_amplitude must be nonnegative");
  if (!(lambda > 1.0)) fail("lambda must exceed 1");
  if (!(solver_tol > 0.0)) fail("solver_tol must be positive");
  if (!(cmc_drift_tol > 0.0)) fail("cmc_drift_tol must be positive");
  if (!(std::abs(warp) < 1.0)) fail("warp must lie in (-1, 1)");
  if (output_cadence < 1) fail("output_cadence must be at least 1");
  if (!(growth_factor > 1.0)) fail("growth_factor must exceed 1");
  for (double t : times)
    if (!(t < 0.0)) fail("oracle times must be negative");
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  raise(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

// Accepts plain decimals and simple fractions such as "2/3" or "-1/3".
double parse_real(const std::string& text, int line) {
  const std::string t = trim(text);
  auto plain = [&](std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
      parse_fail(line, "'" + t + "' is not a number");
    return v;
  };
  std::string_view s = t;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return plain(s);
  return plain(trim(s.substr(0, slash))) / plain(trim(s.substr(slash + 1)));
}

long long parse_integer(const std::string& text, int line) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || t.empty())
    parse_fail(line, "'" + t + "' is not an integer");
  return v;
}

std::vector<double> parse_list(const std::string& text, int line) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item, line));
  return out;
}

bool parse_bool(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  parse_fail(line, "'" + t + "' is not a boolean");
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_real(values[i]);
  }
  return out;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  using Setter = std::function<void(const std::string&, int)>;
  const std::map<std::string, Setter, std::less<>> setters{
      {"command",
       [&](const std::string& v, int line) {
         try {
           c.command = parse_command(trim(v));
         } catch (const Error& e) {
           parse_fail(line, e.what());
         }
       }},
      {"grid",
       [&](const std::string& v, int line) {
         const auto n = parse_integer(v, line);
         if (n < 1 || n > 4096) parse_fail(line, "grid size out of range");
         c.grid.n = {static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
       }},
      {"period",
       [&](const std::string& v, int line) {
         const double p = parse_real(v, line);
         c.grid.period = {p, p, p};
       }},
      {"kasner",
       [&](const std::string& v, int line) {
         const auto p = parse_list(v, line);
         if (p.size() != 3) parse_fail(line, "kasner needs three exponents");
         c.kasner = KasnerParams{p[0], p[1], p[2]};
       }},
      {"t0", [&](const std::string& v, int line) { c.t0 = parse_real(v, line); }},
      {"t_end", [&](const std::string& v, int line) { c.t_end = parse_real(v, line); }},
      {"dt", [&](const std::string& v, int line) { c.dt = parse_real(v, line); }},
      {"cfl", [&](const std::string& v, int line) { c.cfl = parse_real(v, line); }},
      {"perturb_amplitude", [&](const std::string& v, int line) { c.perturb_amplitude = parse_real(v, line); }},
      {"seed",
       [&](const std::string& v, int line) {
         const auto s = parse_integer(v, line);
         if (s < 0) parse_fail(line, "seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"lambda", [&](const std::string& v, int line) { c.lambda = parse_real(v, line); }},
      {"output", [&](const std::string& v, int) { c.output = trim(v); }},
      {"snapshot", [&](const std::string& v, int) { c.snapshot = trim(v); }},
      {"trace_correction", [&](const std::string& v, int line) { c.trace_correction = parse_bool(v, line); }},
      {"solver_tol", [&](const std::string& v, int line) { c.solver_tol = parse_real(v, line); }},
      {"cmc_drift_tol", [&](const std::string& v, int line) { c.cmc_drift_tol = parse_real(v, line); }},
      {"warp", [&](const std::string& v, int line) { c.warp = parse_real(v, line); }},
      {"output_cadence",
       [&](const std::string& v, int line) {
         const auto n = parse_integer(v, line);
         if (n < 1 || n > 1'000'000'000) parse_fail(line, "output_cadence out of range");
         c.output_cadence = static_cast<int>(n);
       }},
      {"growth_factor", [&](const std::string& v, int line) { c.growth_factor = parse_real(v, line); }},
      {"times", [&](const std::string& v, int line) { c.times = parse_list(v, line); }},
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) parse_fail(line, "unknown key '" + key + "'");
    it->second(value, line);
  }
  c.validate();
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "command = " << to_string(c.command) << '\n';
  out << "grid = " << c.grid.n[0] << '\n';
  out << "period = " << format_real(c.grid.period[0]) << '\n';
  out << "kasner = " << format_list({c.kasner.p1, c.kasner.p2, c.kasner.p3}) << '\n';
  out << "t0 = " << format_real(c.t0) << '\n';
  out << "t_end = " << format_real(c.t_end) << '\n';
  out << "dt = " << format_real(c.dt) << '\n';
  out << "cfl = " << format_real(c.cfl) << '\n';
  out << "perturb_amplitude = " << format_real(c.perturb_amplitude) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "lambda = " << format_real(c.lambda) << '\n';
  if (!c.output.empty()) out << "output = " << c.output << '\n';
  if (!c.snapshot.empty()) out << "snapshot = " << c.snapshot << '\n';
  out << "trace_correction = " << (c.trace_correction ? "true" : "false") << '\n';
  out << "solver_tol = " << format_real(c.solver_tol) << '\n';
  out << "cmc_drift_tol = " << format_real(c.cmc_drift_tol) << '\n';
  out << "warp = " << format_real(c.warp) << '\n';
  out << "output_cadence = " << c.output_cadence << '\n';
  out << "growth_factor = " << format_real(c.growth_factor) << '\n';
  out << "times = " << format_list(c.times) << '\n';
  return out.str();
}

}  // namespace cmcbr
