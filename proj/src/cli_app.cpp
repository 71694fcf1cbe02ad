// Copyright 2026 The cvloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cvloop/cli_app.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "cvloop/compile.hpp"
#include "cvloop/fock.hpp"
#include "cvloop/loop_sim.hpp"

namespace cvloop {

namespace {

enum ExitCode {
  kOk = 0,
  kVerifyFailed = 1,
  kParseError = 2,
  kNotSymplectic = 3,
  kInsufficientAncillas = 4,
  kValidationFailure = 5,
  kExecutionError = 6,
  kNonGaussianProgram = 7,
};

bool log_enabled() {
  const char* level = std::getenv("CVLOOP_LOG");
  return level != nullptr && std::string(level) != "" && std::string(level) != "off";
}

void log_info(const std::string& msg) {
  if (log_enabled()) std::cerr << "[cvloop] " << msg << "\n";
}

struct CliError {
  int code;
  std::string message;
};

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kParseError, "cannot open '" + path + "'"};
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw CliError{kParseError, "parse error in '" + path + "': " + e.what()};
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw CliError{kParseError, "cannot write '" + path + "'"};
  out << j.dump(2) << "\n";
  log_info("wrote " + path);
}

Eigen::MatrixXd matrix_from_json(const Json& rows) {
  const int r = static_cast<int>(rows.size());
  if (r == 0) throw CliError{kParseError, "empty matrix"};
  const int c = static_cast<int>(rows[0].size());
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c)
      throw CliError{kParseError, "ragged matrix"};
    for (int k = 0; k < c; ++k) m(i, k) = rows[i][k].get<double>();
  }
  return m;
}

// Accepts a circuit file or a bare matrix file and produces the target gate.
SymplecticOp load_target(const Json& j) {
  if (j.is_object() && j.value("format", "") == "cvloop-circuit/1") {
    try {
      return circuit_to_symplectic(CircuitIR::from_json(j));
    } catch (const std::invalid_argument& e) {
      throw CliError{kNotSymplectic, e.what()};
    }
  }
  if (j.is_object() && j.contains("matrix")) {
    SymplecticOp op;
    op.matrix = matrix_from_json(j.at("matrix"));
    if (op.matrix.rows() != op.matrix.cols() || op.matrix.rows() % 2 != 0)
      throw CliError{kNotSymplectic, "matrix must be 2n x 2n"};
    if (j.contains("displacement")) {
      const auto d = j.at("displacement").get<std::vector<double>>();
      op.displacement = Eigen::Map<const Eigen::VectorXd>(d.data(), d.size());
      if (op.displacement.size() != op.matrix.rows())
        throw CliError{kNotSymplectic, "displacement length mismatch"};
    } else {
      op.displacement = Eigen::VectorXd::Zero(op.matrix.rows());
    }
    if (symplectic_error(op.matrix) > 1e-10)
      throw CliError{kNotSymplectic, "matrix is not symplectic (tolerance 1e-10)"};
    return op;
  }
  throw CliError{kParseError, "expected a cvloop-circuit/1 or {matrix: ...} document"};
}

// Input state specs: "vacuum", {coherent: [[x,p],...]}, or {n_modes,mean,cov}.
GaussianState load_input_state(const Json& j, int n_modes) {
  if (j.is_string()) {
    if (j.get<std::string>() == "vacuum") return vacuum(n_modes);
    throw CliError{kParseError, "unknown input state '" + j.get<std::string>() + "'"};
  }
  if (j.is_object() && j.contains("coherent")) {
    GaussianState s = vacuum(n_modes);
    const Json& list = j.at("coherent");
    if (static_cast<int>(list.size()) != n_modes)
      throw CliError{kParseError, "coherent list length must equal mode count"};
    for (int i = 0; i < n_modes; ++i) {
      s.mean(i) = list[i][0].get<double>();
      s.mean(n_modes + i) = list[i][1].get<double>();
    }
    return s;
  }
  if (j.is_object() && j.contains("cov")) {
    GaussianState s = state_from_json(j);
    if (s.n_modes != n_modes)
      throw CliError{kParseError, "input state mode count must match the program"};
    return s;
  }
  throw CliError{kParseError, "unrecognized input state document"};
}

NoiseConfig noise_from_flags(const std::string& noise_file, const std::string& ancilla_db,
                             double loop_loss, double outer_loss, double detector_eff,
                             bool have_db, bool have_loop, bool have_outer,
                             bool have_det) {
  NoiseConfig noise;  // defaults: ideal ancilla, unit transmissions
  if (!noise_file.empty()) noise = noise_from_json(load_json(noise_file));
  // Flags override the config file.
  if (have_db) {
    if (ancilla_db == "ideal") noise.ancilla_squeezing_db.reset();
    else {
      try {
        noise.ancilla_squeezing_db = std::stod(ancilla_db);
      } catch (const std::exception&) {
        throw CliError{kParseError, "--ancilla-db expects a number or 'ideal'"};
      }
    }
  }
  if (have_loop) noise.eta_in = 1.0 - loop_loss;
  if (have_outer) noise.eta_out = 1.0 - outer_loss;
  if (have_det) noise.detector_efficiency = detector_eff;
  try {
    noise.check();
  } catch (const std::invalid_argument& e) {
    throw CliError{kParseError, e.what()};
  }
  return noise;
}

int cmd_decompose(const std::string& input_path, const std::string& out_path) {
  const Json doc = load_json(input_path);
  SymplecticOp target = load_target(doc);
  Json out;
  if (target.n_modes() == 1) {
    EulerForm e;
    try {
      e = euler_single_mode(target.matrix);
    } catch (const std::invalid_argument& err) {
      throw CliError{kNotSymplectic, err.what()};
    }
    out["kind"] = "euler";
    out["theta2"] = e.theta2;
    out["r"] = e.r;
    out["theta1"] = e.theta1;
    out["reconstruction_error"] = (euler_to_matrix(e) - target.matrix).norm();
    out["displacement"] =
        std::vector<double>(target.displacement.data(),
                            target.displacement.data() + target.displacement.size());
  } else {
    GaussianDecomposition d;
    try {
      d = bloch_messiah(target);
    } catch (const std::invalid_argument& err) {
      throw CliError{kNotSymplectic, err.what()};
    }
    auto mesh_json = [](const InterferometerMesh& mesh) {
      Json mj;
      mj["n_modes"] = mesh.n_modes;
      Json elements = Json::array();
      for (const MeshElement& e : mesh.elements)
        elements.push_back({{"i", e.low}, {"j", e.low + 1},
                            {"T", e.transmissivity}, {"phase", e.phase}});
      mj["elements"] = elements;
      mj["phases"] = std::vector<double>(mesh.phases.data(),
                                         mesh.phases.data() + mesh.phases.size());
      return mj;
    };
    out["kind"] = "bloch_messiah";
    out["mesh_in"] = mesh_json(d.mesh_in);
    out["squeezers"] = std::vector<double>(d.squeezers.data(),
                                           d.squeezers.data() + d.squeezers.size());
    out["mesh_out"] = mesh_json(d.mesh_out);
    out["displacement"] = std::vector<double>(
        d.displacement.data(), d.displacement.data() + d.displacement.size());
    out["reconstruction_error"] = reconstruction_error(d, target);
  }
  if (out_path.empty()) std::cout << out.dump(2) << "\n";
  else write_json(out_path, out);
  return kOk;
}

int cmd_compile(const std::string& circuit_path, int ancillas, bool anti_squeeze,
                const std::string& out_path) {
  const Json doc = load_json(circuit_path);
  CircuitIR circuit;
  try {
    circuit = CircuitIR::from_json(doc);
  } catch (const std::exception& e) {
    throw CliError{kParseError, e.what()};
  }

  ControlProgram program;
  if (circuit.has_cubic()) {
    if (circuit.instructions.size() != 1 || circuit.n_inputs != 1)
      throw CliError{kParseError,
                     "cubic compilation supports exactly one cubic gate on one mode"};
    const auto& gate = std::get<CubicPhaseGate>(circuit.instructions.front());
    program = compile_cubic(gate.gamma, anti_squeeze);
  } else {
    SymplecticOp target;
    try {
      target = circuit_to_symplectic(circuit);
    } catch (const std::invalid_argument& e) {
      throw CliError{kNotSymplectic, e.what()};
    }
    const int budget = ancillas >= 0 ? ancillas : circuit.n_inputs;
    try {
      program = compile_gaussian(target, budget);
    } catch (const InsufficientAncillaError& e) {
      throw CliError{kInsufficientAncillas, e.what()};
    } catch (const std::invalid_argument& e) {
      throw CliError{kParseError, e.what()};
    }
  }

  const ValidationReport report = validate(program);
  if (!report.ok) {
    // Compiler output always validates; reaching this is a bug worth flagging.
    std::cerr << "internal error: compiled program failed validation ("
              << report.violations.front().rule << ")\n";
    return kValidationFailure;
  }
  write_json(out_path, program.to_json());
  std::cout << "n=" << program.n_inputs << " m=" << program.n_ancillas
            << " tau_prime=" << program.tau_prime
            << " events=" << program.events.size() << "\n";
  return kOk;
}

int cmd_simulate(const std::string& program_path, const std::string& noise_file,
                 const std::string& ancilla_db, double loop_loss, double outer_loss,
                 double detector_eff, bool have_db, bool have_loop, bool have_outer,
                 bool have_det, uint64_t seed, const std::string& input_path,
                 int samples, bool use_fock, int cutoff, double leakage_bound,
                 const std::string& transcript_path, const std::string& report_path) {
  ControlProgram program;
  try {
    program = ControlProgram::from_json(load_json(program_path));
  } catch (const std::invalid_argument& e) {
    throw CliError{kParseError, e.what()};
  }
  const ValidationReport vr = validate(program);
  if (!vr.ok) {
    std::cerr << "program fails validation: " << vr.violations.front().rule << "\n";
    return kValidationFailure;
  }
  const NoiseConfig noise =
      noise_from_flags(noise_file, ancilla_db, loop_loss, outer_loss, detector_eff,
                       have_db, have_loop, have_outer, have_det);

  Json report;
  report["command"] = "simulate";
  report["program"] = program_path;
  report["config"] = noise_to_json(noise);
  report["config"]["seed"] = seed;
  report["config"]["samples"] = samples;

  if (use_fock) {
    // The Fock pipeline runs the measurement-induced cubic phase circuit.
    if (program.ancilla_schedule.size() != 2 ||
        program.ancilla_schedule[0].kind != AncillaKind::Squeezed ||
        program.ancilla_schedule[1].kind != AncillaKind::Cubic)
      throw CliError{kParseError,
                     "--fock expects a cubic program (squeezed + cubic ancilla); "
                     "anti-squeezed variants are not supported here"};
    if (noise.ideal_ancilla())
      throw CliError{kParseError,
                     "--fock needs finite ancilla squeezing (--ancilla-db <dB>)"};
    const double gamma_prime = program.ancilla_schedule[1].gamma;
    const double r = squeezing_db_to_r(*noise.ancilla_squeezing_db);

    fock::FockState input = fock::fock_vacuum(cutoff);
    input.leakage_bound = leakage_bound;
    double in_x = 0.0, in_p = 0.0;
    if (!input_path.empty()) {
      const Json ij = load_json(input_path);
      if (ij.is_object() && ij.contains("coherent")) {
        in_x = ij.at("coherent")[0][0].get<double>();
        in_p = ij.at("coherent")[0][1].get<double>();
        input = fock::coherent_state(in_x, in_p, cutoff);
        input.leakage_bound = leakage_bound;
      } else if (!(ij.is_string() && ij.get<std::string>() == "vacuum")) {
        throw CliError{kParseError, "--fock input must be vacuum or coherent"};
      }
    }
    const fock::Moments in_moments = fock::mean_quadratures(input, 0);
    const fock::CubicPrediction predicted = fock::cubic_gate_prediction(
        gamma_prime, in_moments.mean_x, in_moments.mean_p, in_moments.var_x);

    double sum_x = 0.0, sum_p = 0.0;
    for (int k = 0; k < samples; ++k) {
      Rng rng(seed + k);
      try {
        const fock::CubicRunResult run = fock::run_cubic_circuit(input, gamma_prime, r, rng);
        const fock::Moments out = fock::mean_quadratures(run.output, 0);
        sum_x += out.mean_x;
        sum_p += out.mean_p;
      } catch (const CutoffError& e) {
        throw CliError{kExecutionError, e.what()};
      } catch (const std::runtime_error& e) {
        throw CliError{kExecutionError, e.what()};
      }
    }
    Json result;
    result["gamma"] = gamma_prime;
    result["squeezing_r"] = r;
    result["cutoff"] = cutoff;
    result["samples"] = samples;
    result["mean_x"] = sum_x / samples;
    result["mean_p"] = sum_p / samples;
    result["predicted_x"] = predicted.mean_x;
    result["predicted_p"] = predicted.mean_p;
    result["abs_error"] = {{"x", std::abs(sum_x / samples - predicted.mean_x)},
                           {"p", std::abs(sum_p / samples - predicted.mean_p)}};
    report["eq1"] = result;
    write_json(report_path, report);
    std::cout << result.dump(2) << "\n";
    return kOk;
  }

  GaussianState input = vacuum(program.n_inputs);
  if (!input_path.empty()) input = load_input_state(load_json(input_path), program.n_inputs);

  try {
    RunResult first = run(program, input, noise, OutcomePolicy::sampled(seed));
    write_json(transcript_path, first.transcript.to_json());
    report["metrics"]["n"] = program.n_inputs;
    report["metrics"]["m"] = program.n_ancillas;
    report["metrics"]["tau_prime"] = program.tau_prime;
    report["output_state"] = state_to_json(first.output);
    if (samples > 1) {
      Eigen::VectorXd mean_acc = first.output.mean;
      for (int k = 1; k < samples; ++k) {
        RunResult extra = run(program, input, noise, OutcomePolicy::sampled(seed + k));
        mean_acc += extra.output.mean;
      }
      mean_acc /= samples;
      report["aggregate"] = {{"samples", samples},
                             {"mean", std::vector<double>(mean_acc.data(),
                                                          mean_acc.data() + mean_acc.size())}};
    }
    report["artifacts"] = Json::array({transcript_path, report_path});
    write_json(report_path, report);
    std::cout << "output n_modes=" << first.output.n_modes << "\n";
    return kOk;
  } catch (const ExecutionError& e) {
    std::cerr << "execution error: " << e.what() << "\n";
    return kExecutionError;
  } catch (const UnsupportedProgramError& e) {
    std::cerr << "execution error: " << e.what() << "\n";
    return kExecutionError;
  }
}

int cmd_verify(const std::string& program_path, const std::string& target_path,
               const std::string& noise_file, const std::string& ancilla_db,
               double loop_loss, double outer_loss, double detector_eff, bool have_db,
               bool have_loop, bool have_outer, bool have_det, double transfer_tol,
               double noise_tol, bool have_transfer_tol, bool have_noise_tol,
               const std::string& report_path) {
  ControlProgram program;
  try {
    program = ControlProgram::from_json(load_json(program_path));
  } catch (const std::invalid_argument& e) {
    throw CliError{kParseError, e.what()};
  }
  const SymplecticOp target = load_target(load_json(target_path));
  const NoiseConfig noise =
      noise_from_flags(noise_file, ancilla_db, loop_loss, outer_loss, detector_eff,
                       have_db, have_loop, have_outer, have_det);

  const bool ideal = noise.ideal_ancilla() && noise.lossless();
  VerifyThresholds thresholds;
  thresholds.transfer_tol = have_transfer_tol ? transfer_tol : (ideal ? 1e-8 : 1e-4);
  thresholds.noise_tol = have_noise_tol ? noise_tol : (ideal ? 1e-9 : 1e-4);

  try {
    const VerifyReport report = verify(program, target, noise, thresholds);
    Json out = report.to_json();
    out["config"] = noise_to_json(noise);
    if (!report_path.empty()) write_json(report_path, out);
    std::cout << (report.pass ? "PASS" : "FAIL")
              << " transfer_error=" << report.transfer_error
              << " noise_norm=" << report.noise_norm << "\n";
    return report.pass ? kOk : kVerifyFailed;
  } catch (const UnsupportedProgramError& e) {
    std::cerr << e.what() << "\n";
    return kNonGaussianProgram;
  } catch (const ExecutionError& e) {
    std::cerr << "execution error: " << e.what() << "\n";
    return kExecutionError;
  }
}

int cmd_budget(const std::string& ancilla_db, double loop_loss, int round_trips,
               bool have_db, const std::string& report_path) {
  NoiseConfig noise;
  if (have_db) {
    if (ancilla_db == "ideal") noise.ancilla_squeezing_db.reset();
    else noise.ancilla_squeezing_db = std::stod(ancilla_db);
  }
  noise.eta_in = 1.0 - loop_loss;
  try {
    noise.check();
  } catch (const std::invalid_argument& e) {
    throw CliError{kParseError, e.what()};
  }
  const BudgetReport report = noise_budget(noise, round_trips);

  char buffer[256];
  if (std::isinf(report.effective_squeezing_db)) {
    std::cout << "effective squeezing: ideal (unbounded)\n";
    std::cout << "threshold: meets threshold (ideal >= 20.5 dB)\n";
  } else {
    std::snprintf(buffer, sizeof(buffer), "effective squeezing: %.3f dB",
                  report.effective_squeezing_db);
    std::cout << buffer << "\n";
    std::snprintf(buffer, sizeof(buffer), "threshold: %s (%.3f %s 20.5 dB)",
                  report.meets_threshold ? "meets threshold" : "below threshold",
                  report.effective_squeezing_db,
                  report.meets_threshold ? ">=" : "<");
    std::cout << buffer << "\n";
  }
  std::snprintf(buffer, sizeof(buffer), "loss budget: %s (%.3f%% per round trip)",
                report.loss_budget_ok ? "OK" : "FAIL", 100.0 * (1.0 - noise.eta_in));
  std::cout << buffer << "\n";
  if (!report_path.empty()) write_json(report_path, report.to_json());
  return kOk;
}

int cmd_schema(const std::string& path) {
  const Json doc = load_json(path);
  const std::string format = doc.is_object() ? doc.value("format", "") : "";
  try {
    if (format == "cvloop-circuit/1") {
      CircuitIR::from_json(doc);
    } else if (format == "cvloop-program/1") {
      ControlProgram::from_json(doc);
    } else if (format == "cvloop-transcript/1") {
      if (!doc.contains("ticks") || !doc.contains("output_state") ||
          !doc.contains("seed"))
        throw std::invalid_argument("transcript needs seed, ticks, output_state");
      state_from_json(doc.at("output_state"));
    } else if (doc.is_object() && doc.contains("matrix")) {
      load_target(doc);
    } else if (doc.is_object() && doc.contains("cov")) {
      state_from_json(doc);
    } else {
      throw std::invalid_argument("unrecognized document format '" + format + "'");
    }
  } catch (const CliError& e) {
    std::cerr << "schema check failed: " << e.message << "\n";
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "schema check failed: " << e.what() << "\n";
    return kParseError;
  }
  std::cout << "ok\n";
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Compiler and simulator for a loop-based continuous-variable "
               "photonic processor"};
  app.require_subcommand(1);

  // decompose
  std::string dec_input, dec_out;
  CLI::App* decompose = app.add_subcommand(
      "decompose", "Decompose a Gaussian gate into loop primitives");
  decompose->add_option("input", dec_input, "circuit or matrix JSON file")->required();
  decompose->add_option("--out", dec_out, "write the decomposition here");

  // compile
  std::string comp_input, comp_out = "program.json";
  int comp_ancillas = -1;
  bool comp_anti = false;
  CLI::App* compile = app.add_subcommand("compile", "Compile a circuit to a control program");
  compile->add_option("circuit", comp_input, "cvloop-circuit/1 JSON file")->required();
  compile->add_option("--ancillas", comp_ancillas, "squeezed ancilla budget (default n)");
  compile->add_flag("--anti-squeeze", comp_anti,
                    "append the anti-squeezing correction to cubic programs");
  compile->add_option("--out", comp_out, "program output path");

  // shared noise flags helper
  struct NoiseFlags {
    std::string file;
    std::string ancilla_db;
    double loop_loss = 0.0, outer_loss = 0.0, detector_eff = 1.0;
    CLI::Option *db_opt = nullptr, *loop_opt = nullptr, *outer_opt = nullptr,
                *det_opt = nullptr;
    void attach(CLI::App* cmd) {
      cmd->add_option("--noise", file, "noise config JSON file");
      db_opt = cmd->add_option("--ancilla-db", ancilla_db,
                               "ancilla squeezing in dB, or 'ideal'");
      loop_opt = cmd->add_option("--loop-loss", loop_loss,
                                 "inner-loop loss per round trip (1 - eta_in)");
      outer_opt = cmd->add_option("--outer-loss", outer_loss,
                                  "outer-loop loss per round trip (1 - eta_out)");
      det_opt = cmd->add_option("--detector-eff", detector_eff, "detector efficiency");
    }
  };

  // simulate
  std::string sim_program, sim_input, sim_transcript = "transcript.json",
                           sim_report = "report.json";
  NoiseFlags sim_noise;
  uint64_t sim_seed = 0;
  int sim_samples = 1, sim_cutoff = 80;
  double sim_leakage = 0.3;
  bool sim_fock = false;
  CLI::App* simulate = app.add_subcommand("simulate", "Execute a control program");
  simulate->add_option("program", sim_program, "cvloop-program/1 JSON file")->required();
  sim_noise.attach(simulate);
  simulate->add_option("--seed", sim_seed, "rng seed (default 0)");
  simulate->add_option("--input", sim_input, "input state JSON file");
  simulate->add_option("--samples", sim_samples, "independent runs to aggregate")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--fock", sim_fock, "run the cubic circuit in the Fock backend");
  simulate->add_option("--cutoff", sim_cutoff, "Fock cutoff (default 80)");
  simulate->add_option("--leakage-bound", sim_leakage,
                       "per-step truncation loss bound for Fock runs");
  simulate->add_option("--transcript", sim_transcript, "transcript output path");
  simulate->add_option("--report", sim_report, "report output path");

  // verify
  std::string ver_program, ver_target, ver_report;
  NoiseFlags ver_noise;
  double ver_transfer_tol = 0.0, ver_noise_tol = 0.0;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Check a program against a target gate");
  verify_cmd->add_option("program", ver_program, "cvloop-program/1 JSON file")->required();
  verify_cmd->add_option("target", ver_target, "target matrix or circuit JSON")->required();
  ver_noise.attach(verify_cmd);
  CLI::Option* topt = verify_cmd->add_option("--transfer-tol", ver_transfer_tol,
                                             "transfer matrix tolerance");
  CLI::Option* nopt = verify_cmd->add_option("--noise-tol", ver_noise_tol,
                                             "noise norm tolerance");
  verify_cmd->add_option("--report", ver_report, "report output path");

  // budget
  std::string bud_db, bud_report;
  double bud_loss = 0.0;
  int bud_round_trips = 0;
  CLI::App* budget = app.add_subcommand("budget", "Squeezing/loss budget check");
  CLI::Option* bud_db_opt =
      budget->add_option("--ancilla-db", bud_db, "ancilla squeezing in dB, or 'ideal'");
  budget->add_option("--loop-loss", bud_loss, "per-round-trip loss (fraction)");
  budget->add_option("--round-trips", bud_round_trips, "number of loop round trips");
  budget->add_option("--report", bud_report, "report output path");

  // schema
  std::string schema_path;
  CLI::App* schema = app.add_subcommand("schema", "Validate a JSON document");
  schema->add_option("--check", schema_path, "file to validate")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (decompose->parsed()) return cmd_decompose(dec_input, dec_out);
    if (compile->parsed()) return cmd_compile(comp_input, comp_ancillas, comp_anti, comp_out);
    if (simulate->parsed())
      return cmd_simulate(sim_program, sim_noise.file, sim_noise.ancilla_db,
                          sim_noise.loop_loss, sim_noise.outer_loss,
                          sim_noise.detector_eff, sim_noise.db_opt->count() > 0,
                          sim_noise.loop_opt->count() > 0,
                          sim_noise.outer_opt->count() > 0,
                          sim_noise.det_opt->count() > 0, sim_seed, sim_input,
                          sim_samples, sim_fock, sim_cutoff, sim_leakage,
                          sim_transcript, sim_report);
    if (verify_cmd->parsed())
      return cmd_verify(ver_program, ver_target, ver_noise.file, ver_noise.ancilla_db,
                        ver_noise.loop_loss, ver_noise.outer_loss,
                        ver_noise.detector_eff, ver_noise.db_opt->count() > 0,
                        ver_noise.loop_opt->count() > 0,
                        ver_noise.outer_opt->count() > 0,
                        ver_noise.det_opt->count() > 0, ver_transfer_tol, ver_noise_tol,
                        topt->count() > 0, nopt->count() > 0, ver_report);
    if (budget->parsed())
      return cmd_budget(bud_db, bud_loss, bud_round_trips, bud_db_opt->count() > 0,
                        bud_report);
    if (schema->parsed()) return cmd_schema(schema_path);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParseError;
  }
  return kParseError;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace cvloop
