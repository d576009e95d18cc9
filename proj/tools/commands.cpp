#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "beamspec/errors.hpp"
#include "beamspec/fem_oracle.hpp"
#include "beamspec/spectrum.hpp"

#ifndef BEAMSPEC_VERSION
#define BEAMSPEC_VERSION "unknown"
#endif

namespace beamspec::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SolveOptions solve_options(const RunManifest& m) {
  SolveOptions o;
  o.rel_tol = m.tol;
  return o;
}

void emit(std::ostream& out, RunManifest& m, Clock::time_point t0, const std::string& body) {
  m.wall_seconds = seconds_since(t0);
  write_manifest(out, m);
  out << body;
}

}  // namespace

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "# command: " << m.command << '\n'
      << "# config: " << m.config << '\n'
      << "# tol: " << format_number(m.tol) << '\n'
      << "# modes: " << m.modes << '\n'
      << "# seed: " << m.seed << '\n'
      << "# version: " << m.version << '\n'
      << "# wall_seconds: " << fmt::format("{:.3f}", m.wall_seconds) << '\n';
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

int cmd_spectrum(const BeamSystem& system, RunManifest manifest, std::ostream& out) {
  const auto t0 = Clock::now();
  const auto lambdas = find_eigenvalues(system, manifest.modes, solve_options(manifest));
  EigenpairOptions eo;
  eo.rel_tol = manifest.tol;
  std::ostringstream body;
  body << "n,lambda,s,u0,det_derivative,sv_gap\n";
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const Eigenpair ep = eigenpair(system, lambdas[i], static_cast<int>(i) + 1, eo);
    body << i + 1 << ',' << format_number(ep.lambda) << ','
         << format_number(std::sqrt(std::sqrt(ep.lambda))) << ','
         << format_number(ep.mass_displacement) << ','
         << format_number(det_derivative(system, ep.lambda, manifest.tol)) << ','
         << format_number(ep.sv_gap) << '\n';
  }
  emit(out, manifest, t0, body.str());
  return kOk;
}

int cmd_verify(const BeamSystem& system, RunManifest manifest, std::ostream& out) {
  const auto t0 = Clock::now();
  const auto lambdas = find_eigenvalues(system, manifest.modes, solve_options(manifest));
  EigenpairOptions eo;
  eo.rel_tol = manifest.tol;
  const auto pairs = eigenpairs(system, lambdas, eo);
  const VerificationReport rep = verify(system, pairs, manifest.tol);

  nlohmann::json simplicity = nlohmann::json::array();
  nlohmann::json left = nlohmann::json::array();
  nlohmann::json right = nlohmann::json::array();
  nlohmann::json steps = nlohmann::json::array();
  nlohmann::json lams = nlohmann::json::array();
  for (const auto& m : rep.modes) {
    simplicity.push_back({{"n", m.index},
                          {"det_derivative", m.det_derivative},
                          {"sv_gap", m.sv_gap},
                          {"sigma_second_rel", m.sigma_second_rel},
                          {"simple", m.simple}});
    left.push_back(m.sign_product_left);
    right.push_back(m.sign_product_right);
    steps.push_back(to_string(m.step));
    lams.push_back(m.lambda);
  }
  nlohmann::json doc;
  doc["lambda"] = lams;
  doc["positivity"] = rep.positivity;
  doc["strict_ordering"] = rep.strict_ordering;
  doc["simplicity"] = simplicity;
  doc["sign_products"] = {{"left", left}, {"right", right}};
  doc["sign_constant"] = {{"left", rep.left_sign_constant}, {"right", rep.right_sign_constant}};
  doc["sign_note"] = rep.sign_note;
  doc["orthogonality_max_offdiag"] = rep.orthogonality_max_offdiag;
  doc["rayleigh_max_residual"] = rep.rayleigh_max_residual;
  doc["rayleigh_max_relative_residual"] = rep.rayleigh_max_relative_residual;
  doc["step_classes"] = steps;
  doc["theorem1_consistent"] = rep.theorem1_consistent;
  manifest.wall_seconds = seconds_since(t0);
  doc["manifest"] = {{"command", manifest.command}, {"config", manifest.config},
                     {"tol", manifest.tol},         {"modes", manifest.modes},
                     {"seed", manifest.seed},       {"version", manifest.version},
                     {"wall_seconds", manifest.wall_seconds}};
  out << doc.dump(2) << '\n';
  return rep.theorem1_consistent ? kOk : kViolation;
}

int cmd_modes(const BeamSystem& system, RunManifest manifest, int stations, std::ostream& out) {
  if (stations < 65 || stations % 2 == 0)
    throw PreconditionError(fmt::format("--stations must be odd and >= 65, got {}", stations));
  const auto t0 = Clock::now();
  const auto lambdas = find_eigenvalues(system, manifest.modes, solve_options(manifest));
  EigenpairOptions eo;
  eo.rel_tol = manifest.tol;
  eo.stations_per_side = stations;
  std::ostringstream body;
  body << "x,n,u,du,moment,shear_q\n";
  auto row = [&](double x, int n, const QuasiState& w) {
    body << format_number(x) << ',' << n << ',' << format_number(w[kDisp]) << ','
         << format_number(w[kSlope]) << ',' << format_number(w[kMoment]) << ','
         << format_number(w[kShear]) << '\n';
  };
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const Eigenpair ep = eigenpair(system, lambdas[i], static_cast<int>(i) + 1, eo);
    for (std::size_t k = 0; k < ep.left_x.size(); ++k) row(ep.left_x[k], ep.index, ep.left_states[k]);
    // x = 0 is already written from the left side.
    for (std::size_t k = 1; k < ep.right_x.size(); ++k)
      row(ep.right_x[k], ep.index, ep.right_states[k]);
  }
  emit(out, manifest, t0, body.str());
  return kOk;
}

int cmd_sweep(const BeamSystem& system, RunManifest manifest, const std::vector<double>& masses,
              std::ostream& out) {
  if (masses.empty()) throw PreconditionError("--mass-list is empty");
  const auto t0 = Clock::now();
  std::ostringstream body;
  body << "M,n,lambda\n";
  for (double m : masses) {
    BeamSystem sys = system;
    sys.mass = m;
    sys.validate();
    const auto lambdas = find_eigenvalues(sys, manifest.modes, solve_options(manifest));
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      body << format_number(m) << ',' << i + 1 << ',' << format_number(lambdas[i]) << '\n';
  }
  emit(out, manifest, t0, body.str());
  return kOk;
}

int cmd_oracle(const BeamSystem& system, RunManifest manifest, int elements, std::ostream& out) {
  if (elements < kMinElementsPerSide)
    throw PreconditionError(
        fmt::format("--elements must be >= {}, got {}", kMinElementsPerSide, elements));
  const auto t0 = Clock::now();
  // The reference must sit well below the fine-mesh error for the order
  // column to measure the elements rather than the shooting.
  SolveOptions reference = solve_options(manifest);
  reference.rel_tol = std::min(reference.rel_tol, kOracleReferenceTol);
  reference.tol_lambda_rel = std::min(reference.tol_lambda_rel, kOracleReferenceTol);
  const auto lambdas = find_eigenvalues(system, manifest.modes, reference);
  const DiscreteOperator coarse_op = assemble(system, elements);
  const DiscreteOperator fine_op = assemble(system, 2 * elements);
  if (manifest.modes > coarse_op.size())
    throw PreconditionError(fmt::format("{} elements per side resolve only {} modes", elements,
                                        coarse_op.size()));
  const auto rows = compare(lambdas, solve_generalized(coarse_op, manifest.modes),
                            solve_generalized(fine_op, manifest.modes));
  std::ostringstream body;
  body << "n,shooting,oracle_E,oracle_2E,richardson,rel_error,order\n";
  for (const auto& r : rows)
    body << r.index << ',' << format_number(r.shooting) << ',' << format_number(r.coarse) << ','
         << format_number(r.fine) << ',' << format_number(r.richardson) << ','
         << format_number(r.rel_error_richardson) << ',' << format_number(r.order) << '\n';
  emit(out, manifest, t0, body.str());
  return kOk;
}

std::vector<double> parse_mass_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw PreconditionError(fmt::format("bad mass value '{}'", item));
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size() || !std::isfinite(v) || v < 0.0)
      throw PreconditionError(fmt::format("bad mass value '{}'", item));
    out.push_back(v);
  }
  if (out.empty()) throw PreconditionError("--mass-list is empty");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra of two beams joined by a point mass", "beamspec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BEAMSPEC_VERSION);

  std::string config;
  int modes = 4;
  double tol = kDefaultRelTol;
  std::uint64_t seed = 0;
  std::string output;
  int stations = kDefaultStations;
  std::string mass_list;
  int elements = 40;

  auto common = [&](CLI::App* sub) {
    sub->add_option("config", config, "System description (JSON)")->required();
    sub->add_option("--modes,-n", modes, "Number of modes")->capture_default_str();
    sub->add_option("--tol", tol, "Integrator relative tolerance")->capture_default_str();
    sub->add_option("--seed", seed, "Recorded in the manifest")->capture_default_str();
    sub->add_option("--output,-o", output, "Write to a file instead of stdout");
  };
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues and simplicity margins (CSV)");
  common(spectrum);
  auto* verify_cmd = app.add_subcommand("verify", "Spectral property report (JSON)");
  common(verify_cmd);
  auto* modes_cmd = app.add_subcommand("modes", "Sampled eigenfunctions (CSV)");
  common(modes_cmd);
  modes_cmd->add_option("--stations,-k", stations, "Samples per side (odd, >= 65)")
      ->capture_default_str();
  auto* sweep = app.add_subcommand("sweep", "Eigenvalues across point-mass values (CSV)");
  common(sweep);
  sweep->add_option("--mass-list", mass_list, "Comma-separated masses")->required();
  auto* oracle = app.add_subcommand("oracle", "Finite-element cross-check (CSV)");
  common(oracle);
  oracle->add_option("--elements,-e", elements, "Elements per side on the coarse mesh")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  RunManifest manifest{chosen->get_name(), config, tol, modes, seed, BEAMSPEC_VERSION, 0.0};

  try {
    if (modes < 1) throw PreconditionError(fmt::format("--modes must be >= 1, got {}", modes));
    if (chosen == verify_cmd && modes < 2)
      throw PreconditionError("verify needs --modes >= 2");
    if (!(tol >= 1e-13 && tol <= 1e-6))
      throw PreconditionError(fmt::format("--tol must lie in [1e-13, 1e-6], got {:g}", tol));
    std::vector<double> masses;
    if (chosen == sweep) masses = parse_mass_list(mass_list);
    const BeamSystem system = load_system(config);

    std::ofstream file;
    if (!output.empty()) {
      file.open(output);
      if (!file) throw PreconditionError(fmt::format("cannot write '{}'", output));
    }
    std::ostream& sink = output.empty() ? out : file;

    try {
      if (chosen == spectrum) return cmd_spectrum(system, manifest, sink);
      if (chosen == verify_cmd) return cmd_verify(system, manifest, sink);
      if (chosen == modes_cmd) return cmd_modes(system, manifest, stations, sink);
      if (chosen == sweep) return cmd_sweep(system, manifest, masses, sink);
      return cmd_oracle(system, manifest, elements, sink);
    } catch (const PreconditionError& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const ConstraintError& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const Error& e) {
      err << "solver failure: " << e.what() << '\n';
      return kSolverFailure;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
}

}  // namespace beamspec::cli
