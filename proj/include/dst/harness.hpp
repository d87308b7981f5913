#pragma once

// Drivers behind the dstlab CLI. Everything returns JSON (nlohmann, keys
// sorted) plus an exit code; nothing here touches stdout.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace dst {

inline constexpr const char* kArtifactVersion = "dstlab 1.0.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failed = 1;
inline constexpr int blowup = 2;
inline constexpr int cost_guard = 3;
inline constexpr int usage = 64;
}  // namespace exit_code

struct RunConfig {
  std::string subcommand;
  std::optional<int> n;  // unset: per-command default
  std::string bc = "periodic";  // periodic | quasi | open
  double xi = 1.0;
  double theta_minus = 0.3, theta_plus = 0.7;
  double xi_minus = 0.0, xi_plus = 0.0;
  double eta = 1.0;
  double sigma = 0.3;
  int m = 1;
  double dt = 1e-3;
  double t_final = 10.0;
  double amplitude = 0.3;  // initial data ~ U(−a, a)
  std::uint64_t seed = 42;
  std::string suite = "all";
  double tol_scale = 1.0;
  int jobs = 1;
  bool force = false;
  std::string out;  // CSV path for simulate, report copy otherwise
  bool json = false;
  bool inject_wrong_k = false;  // test hook: rmatrix suite uses a K that violates the reflection equation
};

struct RunOutcome {
  int exit_code = exit_code::ok;
  nlohmann::json report;
  std::string csv;  // simulate only
};

/// Throws Error(InvalidArgument) on inconsistent settings (the CLI maps it to 64).
void validate(const RunConfig& cfg);

RunOutcome run_simulate(const RunConfig& cfg);
RunOutcome run_verify(const RunConfig& cfg);
RunOutcome run_backlund(const RunConfig& cfg);
RunOutcome run_baxter(const RunConfig& cfg);

/// Dispatch on cfg.subcommand.
RunOutcome run(const RunConfig& cfg);

/// One line per record: PASS/FAIL id residual tolerance.
std::string render_text(const nlohmann::json& report);

}  // namespace dst
