#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "beamspec/beam_config.hpp"

namespace beamspec::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kSolverFailure = 3, kViolation = 4 };

struct RunManifest {
  std::string command;
  std::string config;
  double tol = 0.0;
  int modes = 0;
  std::uint64_t seed = 0;
  std::string version;
  double wall_seconds = 0.0;
};

// '#'-prefixed lines, one field each.
void write_manifest(std::ostream& out, const RunManifest& m);

std::string format_number(double v);  // 17 significant digits

int cmd_spectrum(const BeamSystem& system, RunManifest manifest, std::ostream& out);
int cmd_verify(const BeamSystem& system, RunManifest manifest, std::ostream& out);
int cmd_modes(const BeamSystem& system, RunManifest manifest, int stations, std::ostream& out);
int cmd_sweep(const BeamSystem& system, RunManifest manifest, const std::vector<double>& masses,
              std::ostream& out);
// Shooting values in the oracle table use at most this tolerance.
inline constexpr double kOracleReferenceTol = 1e-12;
int cmd_oracle(const BeamSystem& system, RunManifest manifest, int elements, std::ostream& out);

std::vector<double> parse_mass_list(const std::string& text);

// Full command line front end; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace beamspec::cli
