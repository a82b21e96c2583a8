#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cmcbr/evolution.hpp"
#include "cmcbr/grid.hpp"

namespace cmcbr {

enum class Command { Verify, Evolve, Oracle, RescaleTest };

std::string_view to_string(Command command);
Command parse_command(std::string_view text);

/// Flat `key = value` run configuration. Every key has a default.
struct RunConfig {
  Command command = Command::Verify;
  GridSpec grid = GridSpec::cubic(16);
  KasnerParams kasner;
  double t0 = -1.0;
  double t_end = -0.5;
  /// Fixed step size; 0 means "largest stable step at the given cfl".
  double dt = 0.0;
  double cfl = 0.25;
  double perturb_amplitude = 0.0;
  std::uint64_t seed = 1;
  double lambda = 10.0;
  std::string output;
  std::string snapshot;
  bool trace_correction = true;
  double solver_tol = 1e-10;
  double cmc_drift_tol = 1e-6;
  double warp = 0.0;
  int output_cadence = 1;
  double growth_factor = 10.0;
  std::vector<double> times{-1.0, -0.5};

  /// Throws ValidationError naming the violated invariant.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ParseError (with line number) or ValidationError.
RunConfig parse_config(std::string_view text);
std::string serialize_config(const RunConfig& config);

/// Runs the configured command. Returns 0 iff every check passed.
/// Library errors become a nonzero status and one `error:` line on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace cmcbr
