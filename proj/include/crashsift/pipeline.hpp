// Copyright 2026 The crashsift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The writing -> execution -> analysis cycle, run per trial, with function
// constraints and crash verdicts fed back into the agents' prompts. Agents
// exchange artifacts through a SharedRepository namespace per benchmark.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crashsift/agent.hpp"
#include "crashsift/analyzers.hpp"
#include "crashsift/backends.hpp"
#include "crashsift/executor.hpp"
#include "crashsift/shared_repo.hpp"
#include "crashsift/toolbox.hpp"

namespace crashsift {

struct ExecutorConfig {
  enum class Kind { Simulated, External };
  Kind kind = Kind::Simulated;
  std::filesystem::path simproject;  // Simulated
  ExternalBuild external;            // External
};

struct BenchmarkSpec {
  BenchmarkFunction function;
  std::filesystem::path project_dir;
  Language language = Language::C;
  ExecutorConfig executor;
};

// Multi-document YAML, one benchmark per document:
//   id: libraw-crxdecodeplane        # optional
//   project: libraw
//   function_signature: "int LibRaw::crxDecodePlane(void *p, uint32_t planeNumber)"
//   source_path: src/crx.cpp:12       # file[:line], relative to project_dir
//   language: c++
//   project_dir: projects/libraw      # relative to this file
//   executor: {simproject: sim.yaml}  # or {build_cmd, fuzz_cmd, coverage_file}
// Paths are resolved against the file's directory. Throws InvalidConfig.
std::vector<BenchmarkSpec> load_benchmarks(const std::filesystem::path& path);

struct RunConfig {
  std::filesystem::path benchmarks_file;
  std::optional<std::filesystem::path> scripted_dir;
  std::optional<LiveBackendConfig> live;
  bool constraints_enabled = true;
  bool validator_enabled = true;
  int n_trials = 10;
  int max_cycles = 5;
  double fuzz_duration_s = kDefaultFuzzDurationS;
  std::optional<std::filesystem::path> prices_file;
  std::filesystem::path output_dir = "crashsift-out";
  int parallel = 1;
  // Extra writer attempts per cycle after a malformed driver or build failure.
  int writer_retries = 2;
  int plateau_window = 2;
  double plateau_epsilon = 0.01;
  RunLimits limits;
};

// YAML mirroring RunConfig:
//   benchmarks: benchmarks.yaml
//   backend: {scripted: scripts/}   # or {live: {endpoint, model}}
//   constraints: true
//   validator: true
//   n_trials: 10
//   max_cycles: 5
//   fuzz_duration_s: 300
//   prices: prices.yaml
//   output_dir: out
//   parallel: 1
// Relative paths resolve against the file's directory. Throws InvalidConfig.
RunConfig load_run_config(const std::filesystem::path& path);
// Throws InvalidConfig unless exactly one backend is set and counts are sane.
void validate(const RunConfig& config);

enum class Termination { Running, TruePositive, MaxCycles, CoveragePlateau, Failed };
std::string_view to_string(Termination t);
Termination parse_termination(std::string_view text);

struct CrashRecord {
  std::string id;  // <trial>-c<cycle>
  int cycle = 0;
  CrashReport crash;
  std::optional<FeasibilityVerdict> verdict;
  // Validation ran but produced no verdict; the crash is kept (fail-open).
  bool validation_failed = false;

  bool operator==(const CrashRecord&) const = default;
};

struct TrialState {
  std::string benchmark_id;
  std::string trial_id;
  int cycle = 0;  // completed cycles
  FuzzDriver driver;
  std::optional<ExecutionResult> execution;
  std::vector<CrashRecord> crash_history;
  std::vector<double> coverage_history;
  Termination termination = Termination::Running;
  std::string failure;  // reason, when Failed
  bool constraints_used = false;
  std::map<std::string, TokenUsage> usage_by_agent;

  bool operator==(const TrialState&) const = default;
};

nlohmann::ordered_json to_json(const TrialState& state);
TrialState trial_state_from_json(const nlohmann::ordered_json& j);

// Pure. Precedence TruePositive > MaxCycles > CoveragePlateau. TruePositive:
// the current cycle crashed with a ProgramError and the validator is off,
// judged it feasible, or failed (fail-open). Plateau: with n >= W recorded
// cycles, h[n-1] - h[n-W] < epsilon.
Termination should_stop(const TrialState& state, const RunConfig& config);

// Everything a trial needs that is shared across trials of one benchmark.
struct BenchmarkContext {
  BenchmarkSpec spec;
  std::unique_ptr<ProjectCheckout> checkout;
  std::shared_ptr<const SymbolIndex> index;
  std::optional<SimulatedProject> simulated;
  // Set when the Function Analyzer succeeded (and constraints are enabled).
  std::optional<ConstraintReport> constraints;
  std::string function_analysis_failure;
  TokenUsage function_analysis_usage;
};

// Loads the checkout and its index (building and saving it when absent),
// fills in the function source from the index, loads the simulated project.
BenchmarkContext prepare_benchmark(const BenchmarkSpec& spec);

class Orchestrator {
 public:
  Orchestrator(RunConfig config, BackendProvider& backends);

  const RunConfig& config() const { return config_; }
  SharedRepository& repository() { return repo_; }
  std::filesystem::path bundles_dir() const { return config_.output_dir / "bundles"; }
  std::filesystem::path results_dir() const { return config_.output_dir / "results"; }

  // Runs the Function Analyzer when constraints are enabled and stores its
  // report under constraints/<hash>.xmlish in the benchmark namespace. Its
  // token usage goes to results/<bm>/function-analysis.json.
  void analyze_benchmark(BenchmarkContext& ctx);
  TrialState run_trial(const BenchmarkContext& ctx, const std::string& trial_id);
  // n_trials trials ("t01", "t02", ...), up to config.parallel at once. A
  // failing trial never aborts its siblings.
  std::vector<TrialState> run_benchmark(BenchmarkContext& ctx);

 private:
  struct StageResult {
    std::optional<AgentSession> session;
    std::string error;
    bool ok() const { return session && session->completed(); }
  };
  // One agent session: backend from the provider, live toolbox over the
  // checkout, transcript captured under bundles/.
  StageResult run_stage(const BenchmarkContext& ctx, const std::string& trial_id, int cycle,
                        const std::string& agent, const Bindings& bindings, int attempt);
  std::filesystem::path workspace_dir(const std::string& benchmark_id, const std::string& trial_id,
                                      int cycle, const std::string& agent, int attempt) const;
  ExecutionResult execute(const BenchmarkContext& ctx, const FuzzDriver& driver,
                          const std::string& trial_id) const;
  std::string constraint_text(const BenchmarkContext& ctx, const std::filesystem::path& ws) const;
  void save_state(const TrialState& state);

  RunConfig config_;
  BackendProvider& backends_;
  SharedRepository repo_;
};

struct RunSummary {
  std::vector<TrialState> trials;
  std::vector<std::string> failures;  // benchmark-level problems
  TokenUsage function_analysis_usage;
  int benchmarks = 0;
};

// The whole experiment: every benchmark in config.benchmarks_file. Writes
// results/, bundles/, repo/ under output_dir.
RunSummary run_experiment(const RunConfig& config, BackendProvider& backends);

// Everything under a results/ directory: <bm>/<trial>/state.json plus the
// per-benchmark <bm>/function-analysis.json. Trials are ordered by path.
struct ResultsTree {
  std::vector<TrialState> trials;
  TokenUsage function_analysis_usage;
  int benchmarks = 0;
};
ResultsTree load_results(const std::filesystem::path& results_dir);

}  // namespace crashsift
