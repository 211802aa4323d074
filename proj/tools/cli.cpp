// Copyright 2026 The spikelasso Authors
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

#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "spikelasso/active_set.hpp"
#include "spikelasso/bench.hpp"
#include "spikelasso/dictionary.hpp"
#include "spikelasso/io.hpp"
#include "spikelasso/metrics.hpp"
#include "spikelasso/overlap.hpp"
#include "spikelasso/simd/kernels.hpp"
#include "spikelasso/simulate.hpp"
#include "spikelasso/sweep.hpp"

#ifndef SPIKELASSO_VERSION
#define SPIKELASSO_VERSION "dev"
#endif

namespace spikelasso::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kShapeStream = 1;
constexpr std::uint64_t kActivationStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

struct Globals {
  std::string kernels = "auto";
  bool quiet = false;
  bool json_output = false;
  bool allow_uncertified = false;
};

/// Collects the manifest of one invocation.
class Session {
 public:
  Session(std::string command, const std::vector<std::string>& args)
      : started_(Clock::now()) {
    manifest_.command = std::move(command);
    manifest_.argv = args;
    manifest_.cwd = fs::current_path().string();
    manifest_.version = SPIKELASSO_VERSION;
    manifest_.kernels = simd::active().name;
  }

  io::RunManifest& manifest() { return manifest_; }
  void input(const fs::path& p) { manifest_.inputs.push_back(io::hash_artifact(p)); }
  void output(const fs::path& p, bool deterministic = true) {
    manifest_.outputs.push_back(io::hash_artifact(p, deterministic));
  }

  void write(const fs::path& path) {
    manifest_.wall_seconds = std::chrono::duration<double>(Clock::now() - started_).count();
    io::write_json(path, manifest_.to_json());
  }

 private:
  io::RunManifest manifest_;
  Clock::time_point started_;
};

fs::path manifest_path(const std::string& given, const fs::path& primary) {
  if (!given.empty()) return given;
  return fs::path(primary.string() + ".manifest.json");
}

void emit(std::ostream& out, const Globals& g, const json& payload, const std::string& human) {
  if (g.quiet) return;
  if (g.json_output) {
    out << payload.dump(2) << "\n";
  } else {
    out << human;
  }
}

int solve_status(const SolveReport& report, const Globals& g) {
  if (report.timed_out) return kTimeout;
  if (!report.certified && !g.allow_uncertified) return kUncertified;
  return kOk;
}

json report_json(const SolveReport& r) {
  // Timing is left out so the file is reproducible; it goes to the manifest.
  return {{"solver", r.solver},
          {"lambda", r.lambda},
          {"kkt_tol", r.kkt_tol},
          {"certified", r.certified},
          {"timed_out", r.timed_out},
          {"iteration_cap_hit", r.iteration_cap_hit},
          {"max_zero_correlation", r.max_zero_correlation},
          {"objective", r.objective},
          {"iterations", r.iterations},
          {"subproblems", r.subproblems},
          {"subproblem_iterations", r.subproblem_iterations},
          {"max_subproblem_size", r.max_subproblem_size},
          {"window_extensions", r.window_extensions},
          {"window_advances", r.window_advances},
          {"certification_failures", r.certification_failures},
          {"correlated_coordinates", r.correlated_coordinates},
          {"support_size", r.support_size}};
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::optional<double> parse_snr(const std::string& text) {
  if (text == "inf" || text == "none") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) throw InvalidInput("cannot parse SNR '" + text + "'");
  return v;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int k = 5;
  int d = 4;
  int t = 60;
  Index n = 10000;
  double rate_hz = 10.0;
  double sample_rate_hz = 30000.0;
  std::optional<double> snr_db;
  bool no_jitter = false;
  std::uint64_t seed = 1;
  std::string out;
  std::string manifest;
};

int cmd_simulate(const SimulateArgs& a, const Globals& g, Session& session, std::ostream& out) {
  DatasetSpec spec;
  spec.k = a.k;
  spec.d = a.d;
  spec.t = a.t;
  spec.n = a.n;
  spec.rate_hz = a.rate_hz;
  spec.sample_rate_hz = a.sample_rate_hz;
  spec.snr_db = a.snr_db;
  spec.jitter = !a.no_jitter;
  spec.shape_seed = derive_seed(a.seed, kShapeStream);
  spec.activation_seed = derive_seed(a.seed, kActivationStream);
  spec.noise_seed = derive_seed(a.seed, kNoiseStream);
  if (!(a.rate_hz >= 0.0) || !(a.sample_rate_hz > a.rate_hz)) {
    throw InvalidInput("rates must satisfy 0 <= rate-hz < sample-rate-hz");
  }
  const Dataset ds = simulate_dataset(spec);

  const fs::path prefix = a.out;
  const fs::path shapes_path = prefix.string() + ".shapes.bin";
  const fs::path signal_path = prefix.string() + ".signal.bin";
  const fs::path clean_path = prefix.string() + ".clean.bin";
  const fs::path truth_path = prefix.string() + ".truth.csv";
  io::write_shapes(shapes_path, ds.shapes, a.sample_rate_hz);
  io::write_signal(signal_path, ds.observed, a.sample_rate_hz);
  io::write_signal(clean_path, ds.clean, a.sample_rate_hz);
  io::write_activations(truth_path, ds.truth);
  for (const auto& p : {shapes_path, signal_path, clean_path, truth_path}) session.output(p);

  auto& m = session.manifest();
  m.parameters = {{"k", a.k},
                  {"d", a.d},
                  {"t", a.t},
                  {"n", a.n},
                  {"rate_hz", a.rate_hz},
                  {"sample_rate_hz", a.sample_rate_hz},
                  {"snr_db", a.snr_db ? json(*a.snr_db) : json(nullptr)},
                  {"jitter", !a.no_jitter}};
  m.seeds = {{"root", a.seed},
             {"shapes", spec.shape_seed},
             {"activations", spec.activation_seed},
             {"noise", spec.noise_seed}};
  const double lmax = lambda_max(ds.shapes, ds.observed);
  const json summary = {{"spikes", ds.truth.size()},
                        {"lambda_max", lmax},
                        {"clean_energy", ds.clean.squared_norm()},
                        {"noise_sigma", a.snr_db ? noise_sigma(ds.clean.squared_norm(), a.d, a.n, *a.snr_db) : 0.0},
                        {"shapes", shapes_path.string()},
                        {"signal", signal_path.string()},
                        {"truth", truth_path.string()}};
  m.summary = summary;
  session.write(manifest_path(a.manifest, prefix));
  std::ostringstream human;
  human << "simulated " << ds.truth.size() << " spikes over n=" << a.n << " samples -> " << signal_path.string()
        << "\n";
  emit(out, g, summary, human.str());
  return kOk;
}

// ------------------------------------------------------------------- solve

struct SolveArgs {
  std::string shapes;
  std::string signal;
  std::string solver = "as-window";
  std::string lambda = "rel:0.1";
  Index window = 0;
  double kkt_tol = -1.0;
  double fista_tol = 1e-10;
  int max_iter = 10000;
  int sub_max_iter = 1000;
  std::int64_t max_iterations = 0;
  double time_limit = 0.0;
  std::string out;
  std::string report;
  std::string manifest;
};

int cmd_solve(const SolveArgs& a, const Globals& g, Session& session, std::ostream& out) {
  const ShapeBank shapes = io::read_shapes(a.shapes);
  const io::SignalFile signal = io::read_signal(a.signal);
  session.input(a.shapes);
  session.input(a.signal);

  const LambdaSpec lambda = LambdaSpec::parse(a.lambda);
  const double lmax = lambda_max(shapes, signal.signal);
  SolverSettings settings;
  settings.mode = parse_solver(a.solver);
  settings.lasso.lambda = lambda.resolve(lmax);
  settings.lasso.fista_tol = a.fista_tol;
  settings.lasso.max_iter = a.max_iter;
  settings.sub_max_iter = a.sub_max_iter;
  settings.kkt_tol = a.kkt_tol;
  settings.window = a.window;
  settings.max_iterations = a.max_iterations;
  if (a.time_limit < 0.0) throw InvalidInput("time limit must be nonnegative");
  if (!(settings.lasso.lambda > 0.0)) {
    throw InvalidInput("lambda resolves to " + io::format_double(settings.lasso.lambda) + "; it must be positive");
  }
  const auto start = Clock::now();
  if (a.time_limit > 0.0) {
    settings.deadline =
        start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(a.time_limit));
  }
  const SolveResult result = solve(shapes, signal.signal, settings);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

  io::write_activations(a.out, result.solution);
  session.output(a.out);
  json report = report_json(result.report);
  report["lambda_max"] = lmax;
  if (!a.report.empty()) {
    io::write_json(a.report, report);
    session.output(a.report);
  }
  auto& m = session.manifest();
  m.parameters = {{"solver", solver_name(settings.mode)},
                  {"lambda", lambda.to_string()},
                  {"lambda_resolved", settings.lasso.lambda},
                  {"window", settings.resolved_window(shapes.length())},
                  {"kkt_tol", settings.resolved_kkt_tol()},
                  {"fista_tol", a.fista_tol},
                  {"max_iter", a.max_iter},
                  {"sub_max_iter", a.sub_max_iter},
                  {"max_iterations", a.max_iterations},
                  {"time_limit_s", a.time_limit}};
  m.summary = report;
  m.summary["seconds"] = seconds;
  session.write(manifest_path(a.manifest, a.out));

  std::ostringstream human;
  human << result.report.solver << ": " << result.solution.size() << " activations, objective "
        << io::format_double(result.report.objective) << ", "
        << (result.report.certified ? "certified" : "NOT certified") << (result.report.timed_out ? " (timeout)" : "")
        << "\n";
  json payload = report;
  payload["seconds"] = seconds;
  emit(out, g, payload, human.str());
  return solve_status(result.report, g);
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string truth;
  std::string est;
  Index tol = 0;
  Index cp_width = 0;
  int t = 0;
  bool binarize = false;
  bool any_neuron = false;
  std::string out;
  std::string manifest;
};

int cmd_eval(const EvalArgs& a, const Globals& g, Session& session, std::ostream& out) {
  const ActivationSet truth = io::read_activations(a.truth);
  const ActivationSet est = io::read_activations(a.est);
  session.input(a.truth);
  session.input(a.est);
  if (truth.neurons() != est.neurons() || truth.length() != est.length()) {
    throw InvalidInput("truth and estimate disagree on k or n");
  }
  CPConfig cp;
  if (a.cp_width > 0) {
    cp.kernel_width = a.cp_width;
  } else if (a.t > 0) {
    cp = CPConfig::for_shape_length(a.t);
  } else {
    throw InvalidInput("pass --cp-width or --t to set the CP kernel");
  }
  cp.binarize = a.binarize;
  const F1Result f1 = f1_score(truth, est, {a.tol, !a.any_neuron});
  const CPResult c = cp_score(truth, est, cp);
  const json result = {{"precision", f1.precision}, {"recall", f1.recall}, {"f1", f1.f1},
                       {"cp", c.value},           {"cp_both_empty", c.both_empty},
                       {"true_positives", f1.true_positives}};
  io::write_json(a.out, result);
  session.output(a.out);
  session.manifest().parameters = {{"tol", a.tol},
                                   {"cp_width", cp.kernel_width},
                                   {"binarize", a.binarize},
                                   {"require_same_neuron", !a.any_neuron}};
  session.manifest().summary = result;
  session.write(manifest_path(a.manifest, a.out));
  std::ostringstream human;
  human << "precision " << f1.precision << "  recall " << f1.recall << "  f1 " << f1.f1 << "  cp " << c.value << "\n";
  emit(out, g, result, human.str());
  return kOk;
}

// ----------------------------------------------------------- overlap-stats

struct OverlapArgs {
  std::string acts;
  Index t = 0;
  double mu = -1.0;
  std::string out;
  std::string manifest;
};

json stats_json(const OverlapStats& s) {
  json hist = json::object();
  for (const auto& [size, count] : s.size_histogram) hist[std::to_string(size)] = count;
  return {{"groups", s.group_count}, {"mean_size", s.mean_size}, {"max_size", s.max_size}, {"histogram", hist}};
}

int cmd_overlap(const OverlapArgs& a, const Globals& g, Session& session, std::ostream& out) {
  if (a.t < 1) throw InvalidInput("--t must be >= 1");
  const ActivationSet acts = io::read_activations(a.acts);
  session.input(a.acts);
  const double mu = a.mu >= 0.0 ? a.mu : static_cast<double>(acts.size()) / static_cast<double>(acts.length());
  const OverlapStats pooled = empirical_overlaps(acts, a.t);
  json per = json::array();
  for (const auto& s : empirical_overlaps_per_neuron(acts, a.t)) per.push_back(stats_json(s));
  const json result = {{"pooled", stats_json(pooled)},
                       {"per_neuron", per},
                       {"mu", mu},
                       {"mu_estimated", a.mu < 0.0},
                       {"t", a.t},
                       {"bound", overlap_bound(mu, a.t)}};
  io::write_json(a.out, result);
  session.output(a.out);
  session.manifest().parameters = {{"t", a.t}, {"mu", mu}};
  session.manifest().summary = {{"mean_size", pooled.mean_size}, {"bound", overlap_bound(mu, a.t)}};
  session.write(manifest_path(a.manifest, a.out));
  std::ostringstream human;
  human << pooled.group_count << " groups, mean size " << pooled.mean_size << ", bound " << overlap_bound(mu, a.t)
        << "\n";
  emit(out, g, result, human.str());
  return kOk;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::string plan;
  std::string out;
  std::string summary;
  std::string solutions;
  int parallel = 0;
  int repetitions = 0;
  std::string manifest;
};

int cmd_bench(const BenchArgs& a, const Globals& g, Session& session, std::ostream& out) {
  BenchPlan plan;
  if (!a.plan.empty()) {
    plan = BenchPlan::from_json(io::read_json(a.plan));
    session.input(a.plan);
  }
  if (a.parallel > 0) plan.parallel = a.parallel;
  if (a.repetitions > 0) plan.repetitions = a.repetitions;
  plan.validate();
  const BenchResult result = run_bench(plan);

  const fs::path summary_path = a.summary.empty() ? fs::path(a.out + ".summary.json") : fs::path(a.summary);
  const fs::path solutions_path = a.solutions.empty() ? fs::path(a.out + ".solutions.csv") : fs::path(a.solutions);
  io::write_text(a.out, result.runs_csv());
  io::write_json(summary_path, result.summary());
  io::write_text(solutions_path, result.solutions_csv());
  session.output(a.out, false);
  session.output(summary_path, false);
  session.output(solutions_path);
  session.manifest().parameters = plan.to_json();
  session.manifest().seeds = {{"root", plan.seed}};
  session.manifest().summary = result.summary()["slopes"];
  session.write(manifest_path(a.manifest, a.out));

  std::ostringstream human;
  for (const auto& [solver, fit] : result.slopes) {
    human << solver_name(solver) << ": ";
    if (fit) {
      human << "slope " << fit->slope << " (r2 " << fit->r2 << ")\n";
    } else {
      human << "slope unavailable (fewer than 3 certified sizes)\n";
    }
  }
  emit(out, g, result.summary(), human.str());
  // Timeouts are part of the experiment; uncertified completed runs are not.
  for (const auto& run : result.runs) {
    if (!run.timed_out && !run.certified && !g.allow_uncertified) return kUncertified;
  }
  return kOk;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string lambdas = "rel:0.01,rel:0.02,rel:0.03,rel:0.05,rel:0.07,rel:0.1,rel:0.15,rel:0.2,rel:0.3,rel:0.4,rel:0.5,rel:0.6,rel:0.7,rel:0.8,rel:0.9,rel:1.001";
  std::string snrs = "inf,20,10,0,-10,-20";
  SweepPlan base;
  bool no_jitter = false;
  std::string solver = "as-window";
  std::string out;
  std::string manifest;
};

int cmd_sweep(const SweepArgs& a, const Globals& g, Session& session, std::ostream& out) {
  SweepPlan plan = a.base;
  plan.jitter = !a.no_jitter;
  plan.solver = parse_solver(a.solver);
  for (const auto& s : split(a.lambdas, ',')) plan.lambdas.push_back(LambdaSpec::parse(s));
  for (const auto& s : split(a.snrs, ',')) plan.snrs_db.push_back(parse_snr(s));
  plan.validate();
  const SweepResult result = run_sweep(plan);
  io::write_text(a.out, result.to_csv());
  session.output(a.out);
  session.manifest().parameters = plan.to_json();
  session.manifest().seeds = {{"root", plan.seed}};
  int uncertified = 0;
  for (const auto& c : result.cells) uncertified += c.uncertified;
  session.manifest().summary = {{"cells", result.cells.size()}, {"uncertified_solves", uncertified}};
  session.write(manifest_path(a.manifest, a.out));
  std::ostringstream human;
  human << "swept " << plan.lambdas.size() << " lambdas x " << plan.snrs_db.size() << " SNRs x " << plan.draws
        << " draws -> " << a.out << "\n";
  emit(out, g, session.manifest().summary, human.str());
  return kOk;
}

// ------------------------------------------------------------------ replay

std::vector<std::string> strip_option(const std::vector<std::string>& args, const std::string& name) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == name) {
      ++i;
      continue;
    }
    if (args[i].rfind(name + "=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

int cmd_replay(const std::string& manifest_file, const Globals& g, std::ostream& out, std::ostream& err) {
  const io::RunManifest m = io::RunManifest::from_json(io::read_json(manifest_file));
  if (m.command == "replay") throw InvalidInput("cannot replay a replay");
  if (m.version != SPIKELASSO_VERSION) {
    err << "warning: manifest written by version " << m.version << ", this is " << SPIKELASSO_VERSION << "\n";
  }
  const fs::path previous = fs::current_path();
  if (!m.cwd.empty() && fs::is_directory(m.cwd)) fs::current_path(m.cwd);

  json report = {{"command", m.command}, {"inputs", json::array()}, {"outputs", json::array()}};
  bool inputs_ok = true;
  for (const auto& in : m.inputs) {
    const bool exists = fs::exists(in.path);
    const std::string actual = exists ? io::sha256_file(in.path) : "";
    inputs_ok = inputs_ok && actual == in.sha256;
    report["inputs"].push_back({{"path", in.path}, {"match", actual == in.sha256}});
  }
  if (!inputs_ok) {
    fs::current_path(previous);
    emit(out, g, report, "inputs changed since the manifest was written; not replaying\n");
    return kInvalidInput;
  }

  std::vector<std::string> args = strip_option(strip_option(m.argv, "--manifest"), "--kernels");
  args = strip_option(args, "--json");
  std::vector<std::string> replay_args{"--kernels", m.kernels.empty() ? "auto" : m.kernels, "--quiet"};
  replay_args.insert(replay_args.end(), args.begin(), args.end());
  replay_args.push_back("--manifest");
  replay_args.push_back((previous / fs::path(manifest_file + ".replay.json")).string());

  std::ostringstream sink;
  const int code = run(replay_args, sink, err);
  bool reproduced = true;
  for (const auto& o : m.outputs) {
    if (!o.deterministic) continue;
    const bool exists = fs::exists(o.path);
    const std::string actual = exists ? io::sha256_file(o.path) : "";
    reproduced = reproduced && actual == o.sha256;
    report["outputs"].push_back({{"path", o.path}, {"expected", o.sha256}, {"actual", actual}, {"match", actual == o.sha256}});
  }
  fs::current_path(previous);
  report["exit_code"] = code;
  report["reproduced"] = reproduced;
  emit(out, g, report, reproduced ? "all deterministic outputs reproduced\n" : "outputs differ from the manifest\n");
  return reproduced ? kOk : kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convolutional sparse spike deconvolution with a windowed active-set Lasso", "spikelasso"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SPIKELASSO_VERSION);
  Globals g;
  app.add_option("--kernels", g.kernels, "Kernel family: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  app.add_flag("--quiet", g.quiet, "Print nothing on success");
  app.add_flag("--json", g.json_output, "Print results as JSON");
  app.add_flag("--allow-uncertified", g.allow_uncertified, "Exit 0 even when a solve is not KKT-certified");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw shapes, Poisson spike trains and a (noisy) signal");
  simulate->fallthrough();
  simulate->add_option("--k", sim.k, "Neurons")->check(CLI::PositiveNumber);
  simulate->add_option("--d", sim.d, "Electrodes")->check(CLI::PositiveNumber);
  simulate->add_option("--t", sim.t, "Shape length in samples")->check(CLI::PositiveNumber);
  simulate->add_option("--n", sim.n, "Signal length in samples")->check(CLI::PositiveNumber);
  simulate->add_option("--rate-hz", sim.rate_hz, "Firing rate per neuron");
  simulate->add_option("--sample-rate-hz", sim.sample_rate_hz, "Sampling rate");
  simulate->add_option("--snr-db", sim.snr_db, "Signal-to-noise ratio; noiseless when omitted");
  simulate->add_flag("--no-jitter", sim.no_jitter, "Unit amplitudes");
  simulate->add_option("--seed", sim.seed, "Root seed");
  simulate->add_option("--out,--out-prefix", sim.out, "Output prefix")->required();
  simulate->add_option("--manifest", sim.manifest, "Manifest path");

  SolveArgs sol;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the Lasso for a signal");
  solve_cmd->fallthrough();
  solve_cmd->add_option("--shapes", sol.shapes, "Shape bank file")->required();
  solve_cmd->add_option("--signal", sol.signal, "Signal file")->required();
  solve_cmd->add_option("--solver", sol.solver, "fista-full, as-naive, as-group or as-window")
      ->check(CLI::IsMember({"fista-full", "as-naive", "as-group", "as-window"}));
  solve_cmd->add_option("--lambda", sol.lambda, "Absolute value or rel:<x> for x * lambda_max");
  solve_cmd->add_option("--window", sol.window, "Window width in samples (default 10 t)");
  solve_cmd->add_option("--kkt-tol", sol.kkt_tol, "KKT slack (default 1e-6 lambda)");
  solve_cmd->add_option("--fista-tol", sol.fista_tol, "Relative objective decrease to stop FISTA");
  solve_cmd->add_option("--max-iter", sol.max_iter, "FISTA iteration cap (full problem)");
  solve_cmd->add_option("--sub-max-iter", sol.sub_max_iter, "FISTA iteration cap (subproblems)");
  solve_cmd->add_option("--max-iterations", sol.max_iterations, "Active-set insertion cap (default k n)");
  solve_cmd->add_option("--time-limit", sol.time_limit, "Seconds before giving up (0 = none)");
  solve_cmd->add_option("--out", sol.out, "Activation CSV")->required();
  solve_cmd->add_option("--report", sol.report, "Solver report JSON");
  solve_cmd->add_option("--manifest", sol.manifest, "Manifest path");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score an estimate against ground truth");
  eval->fallthrough();
  eval->add_option("--truth", ev.truth, "Ground truth CSV")->required();
  eval->add_option("--est", ev.est, "Estimated activations CSV")->required();
  eval->add_option("--tol", ev.tol, "Matching tolerance in samples")->check(CLI::NonNegativeNumber);
  eval->add_option("--cp-width", ev.cp_width, "CP kernel width (odd)");
  eval->add_option("--t", ev.t, "Shape length; sets the CP width to t/2 rounded to odd");
  eval->add_flag("--binarize", ev.binarize, "CP on unit amplitudes");
  eval->add_flag("--any-neuron", ev.any_neuron, "Match spikes regardless of neuron");
  eval->add_option("--out", ev.out, "Result JSON")->required();
  eval->add_option("--manifest", ev.manifest, "Manifest path");

  OverlapArgs ov;
  auto* overlap = app.add_subcommand("overlap-stats", "Overlap group statistics of a spike train");
  overlap->fallthrough();
  overlap->add_option("--acts", ov.acts, "Activations CSV")->required();
  overlap->add_option("--t", ov.t, "Shape length in samples")->required();
  overlap->add_option("--mu", ov.mu, "Pooled intensity per sample (default: estimated)");
  overlap->add_option("--out", ov.out, "Result JSON")->required();
  overlap->add_option("--manifest", ov.manifest, "Manifest path");

  BenchArgs be;
  auto* bench = app.add_subcommand("bench", "Runtime versus n with log-log slope fits");
  bench->fallthrough();
  bench->add_option("--plan", be.plan, "Plan JSON (defaults apply when omitted)");
  bench->add_option("--out", be.out, "Per-run CSV")->required();
  bench->add_option("--summary", be.summary, "Summary JSON with slopes");
  bench->add_option("--solutions", be.solutions, "Per-run solution CSV (reproducible)");
  bench->add_option("--parallel", be.parallel, "Worker threads");
  bench->add_option("--reps", be.repetitions, "Repetitions per size");
  bench->add_option("--manifest", be.manifest, "Manifest path");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "F1 and CP over a lambda x SNR grid");
  sweep->fallthrough();
  sweep->add_option("--lambdas", sw.lambdas, "Comma-separated lambda values (rel:<x> allowed)");
  sweep->add_option("--snrs", sw.snrs, "Comma-separated SNRs in dB; inf is noiseless");
  sweep->add_option("--draws", sw.base.draws, "Draws per cell");
  sweep->add_option("--n", sw.base.n, "Signal length");
  sweep->add_option("--k", sw.base.k, "Neurons");
  sweep->add_option("--d", sw.base.d, "Electrodes");
  sweep->add_option("--t", sw.base.t, "Shape length");
  sweep->add_option("--rate-hz", sw.base.rate_hz, "Firing rate per neuron");
  sweep->add_option("--sample-rate-hz", sw.base.sample_rate_hz, "Sampling rate");
  sweep->add_flag("--no-jitter", sw.no_jitter, "Unit amplitudes");
  sweep->add_option("--seed", sw.base.seed, "Root seed");
  sweep->add_option("--tol", sw.base.match.tol, "F1 matching tolerance")->check(CLI::NonNegativeNumber);
  sweep->add_option("--cp-width", sw.base.cp_width, "CP kernel width (default t/2 odd)");
  sweep->add_option("--solver", sw.solver, "Solver mode")
      ->check(CLI::IsMember({"fista-full", "as-naive", "as-group", "as-window"}));
  sweep->add_option("--parallel", sw.base.parallel, "Worker threads");
  sweep->add_option("--out", sw.out, "Result CSV")->required();
  sweep->add_option("--manifest", sw.manifest, "Manifest path");

  std::string replay_manifest;
  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest and compare outputs");
  replay->fallthrough();
  replay->add_option("--manifest", replay_manifest, "Manifest to replay")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << SPIKELASSO_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }

  try {
    if (g.kernels != "auto") simd::select(simd::parse_isa(g.kernels.c_str()));
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "replay") return cmd_replay(replay_manifest, g, out, err);
    Session session(name, args);
    if (name == "simulate") return cmd_simulate(sim, g, session, out);
    if (name == "solve") return cmd_solve(sol, g, session, out);
    if (name == "eval") return cmd_eval(ev, g, session, out);
    if (name == "overlap-stats") return cmd_overlap(ov, g, session, out);
    if (name == "bench") return cmd_bench(be, g, session, out);
    if (name == "sweep") return cmd_sweep(sw, g, session, out);
    err << "error: unknown command " << name << "\n";
    return kInvalidInput;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace spikelasso::cli
