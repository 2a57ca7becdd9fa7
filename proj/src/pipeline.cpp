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

#include "crashsift/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include <spdlog/spdlog.h>

#include "crashsift/agents.hpp"
#include "crashsift/error.hpp"
#include "crashsift/replay.hpp"
#include "crashsift/tool_runner.hpp"
#include "crashsift/util.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace crashsift {
namespace {

constexpr std::size_t kMaxPromptLogBytes = 16 * 1024;

// A private copy of the benchmark namespace for one agent stage. Files put
// here are synced back by commit(); the directory is always removed.
class StageWorkspace {
 public:
  StageWorkspace(SharedRepository& repo, const std::string& benchmark_id, const fs::path& dir)
      : repo_(repo), ws_(repo.provision(benchmark_id, dir)) {}
  ~StageWorkspace() {
    std::error_code ec;
    fs::remove_all(ws_.dir, ec);
  }
  StageWorkspace(const StageWorkspace&) = delete;
  StageWorkspace& operator=(const StageWorkspace&) = delete;

  const fs::path& dir() const { return ws_.dir; }
  std::optional<std::string> read(const std::string& rel) const {
    const fs::path p = ws_.dir / rel;
    if (!fs::is_regular_file(p)) return std::nullopt;
    return read_file(p);
  }
  void put(const std::string& rel, std::string_view content) { write_file_atomic(ws_.dir / rel, content); }
  SyncSummary commit() { return repo_.sync(ws_); }

 private:
  SharedRepository& repo_;
  Workspace ws_;
};

std::string capped(const std::string& s, std::size_t n) {
  if (s.size() <= n) return s;
  return s.substr(0, n) + "\n[truncated]";
}

std::string format_coverage(double c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f (project line coverage)", c);
  return buf;
}

std::string trial_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%02d", i);
  return buf;
}

ojson verdict_json(const FeasibilityVerdict& v) {
  ojson j;
  j["feasible"] = v.feasible;
  j["analysis"] = v.analysis;
  j["source_code_evidence"] = v.source_code_evidence;
  j["recommendations"] = v.recommendations;
  return j;
}

ojson execution_json(const ExecutionResult& r) {
  ojson j;
  j["built"] = r.built;
  j["crashed"] = r.crashed;
  j["coverage"] = r.coverage;
  j["duration_s"] = r.duration_s;
  j["crash"] = r.crash ? to_json(*r.crash) : ojson(nullptr);
  return j;
}

ExecutionResult execution_from_json(const ojson& j) {
  ExecutionResult r;
  r.built = j.at("built").get<bool>();
  r.crashed = j.at("crashed").get<bool>();
  r.coverage = j.at("coverage").get<double>();
  r.duration_s = j.at("duration_s").get<double>();
  if (!j.at("crash").is_null()) r.crash = crash_from_json(j.at("crash"));
  return r;
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Running: return "Running";
    case Termination::TruePositive: return "TruePositive";
    case Termination::MaxCycles: return "MaxCycles";
    case Termination::CoveragePlateau: return "CoveragePlateau";
    case Termination::Failed: return "Failed";
  }
  return "?";
}

Termination parse_termination(std::string_view text) {
  for (auto t : {Termination::Running, Termination::TruePositive, Termination::MaxCycles,
                 Termination::CoveragePlateau, Termination::Failed}) {
    if (to_string(t) == text) return t;
  }
  throw Error(ErrorKind::ParseError, "unknown termination '" + std::string(text) + "'");
}

ojson to_json(const TrialState& s) {
  ojson j;
  j["benchmark_id"] = s.benchmark_id;
  j["trial_id"] = s.trial_id;
  j["cycle"] = s.cycle;
  j["termination"] = std::string(to_string(s.termination));
  j["failure"] = s.failure;
  j["constraints_used"] = s.constraints_used;
  j["driver"] = {{"source", s.driver.source},
                 {"revision", s.driver.revision},
                 {"build_ok", s.driver.build_ok}};
  j["execution"] = s.execution ? execution_json(*s.execution) : ojson(nullptr);
  j["crash_history"] = ojson::array();
  for (const auto& c : s.crash_history) {
    ojson cj;
    cj["id"] = c.id;
    cj["cycle"] = c.cycle;
    cj["crash"] = to_json(c.crash);
    cj["verdict"] = c.verdict ? verdict_json(*c.verdict) : ojson(nullptr);
    cj["validation_failed"] = c.validation_failed;
    j["crash_history"].push_back(std::move(cj));
  }
  j["coverage_history"] = s.coverage_history;
  j["token_usage"] = ojson::object();
  for (const auto& [agent, u] : s.usage_by_agent) {
    j["token_usage"][agent] = {{"input", u.input}, {"tool", u.tool}, {"output", u.output}};
  }
  return j;
}

TrialState trial_state_from_json(const ojson& j) {
  TrialState s;
  try {
    s.benchmark_id = j.at("benchmark_id").get<std::string>();
    s.trial_id = j.at("trial_id").get<std::string>();
    s.cycle = j.at("cycle").get<int>();
    s.termination = parse_termination(j.at("termination").get<std::string>());
    s.failure = j.at("failure").get<std::string>();
    s.constraints_used = j.at("constraints_used").get<bool>();
    const auto& d = j.at("driver");
    s.driver.source = d.at("source").get<std::string>();
    s.driver.revision = d.at("revision").get<int>();
    s.driver.build_ok = d.at("build_ok").get<bool>();
    if (!j.at("execution").is_null()) s.execution = execution_from_json(j.at("execution"));
    for (const auto& cj : j.at("crash_history")) {
      CrashRecord c;
      c.id = cj.at("id").get<std::string>();
      c.cycle = cj.at("cycle").get<int>();
      c.crash = crash_from_json(cj.at("crash"));
      if (!cj.at("verdict").is_null()) {
        const auto& v = cj.at("verdict");
        c.verdict = FeasibilityVerdict{v.at("feasible").get<bool>(), v.at("analysis").get<std::string>(),
                                       v.at("source_code_evidence").get<std::string>(),
                                       v.at("recommendations").get<std::string>()};
      }
      c.validation_failed = cj.at("validation_failed").get<bool>();
      s.crash_history.push_back(std::move(c));
    }
    s.coverage_history = j.at("coverage_history").get<std::vector<double>>();
    for (const auto& [agent, u] : j.at("token_usage").items()) {
      s.usage_by_agent[agent] = TokenUsage{u.at("input").get<std::uint64_t>(), u.at("tool").get<std::uint64_t>(),
                                           u.at("output").get<std::uint64_t>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("trial state: ") + e.what());
  }
  return s;
}

Termination should_stop(const TrialState& state, const RunConfig& config) {
  if (!state.crash_history.empty()) {
    const auto& last = state.crash_history.back();
    if (last.cycle == state.cycle && last.crash.classification == CrashClassification::ProgramError) {
      const bool confirmed = !config.validator_enabled || last.validation_failed ||
                             !last.verdict || last.verdict->feasible;
      if (confirmed) return Termination::TruePositive;
    }
  }
  if (state.cycle >= config.max_cycles) return Termination::MaxCycles;
  const auto& h = state.coverage_history;
  const auto n = h.size();
  const auto w = static_cast<std::size_t>(config.plateau_window);
  if (n >= w && h[n - 1] - h[n - w] < config.plateau_epsilon) return Termination::CoveragePlateau;
  return Termination::Running;
}

BenchmarkContext prepare_benchmark(const BenchmarkSpec& spec) {
  BenchmarkContext ctx;
  ctx.spec = spec;
  ctx.checkout = std::make_unique<ProjectCheckout>(spec.function.project_name, spec.project_dir, spec.language);
  SymbolIndex index;
  try {
    index = load_index(ctx.checkout->index_path());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotFound) throw;
    index = build_symbol_index(*ctx.checkout);
    save_index(index, ctx.checkout->index_path());
  }
  ctx.index = std::make_shared<const SymbolIndex>(std::move(index));

  auto& fn = ctx.spec.function;
  if (fn.source_code.empty()) {
    std::vector<FunctionSource> found;
    try {
      found = function_search(*ctx.index, *ctx.checkout, fn.function_name);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotFound) throw;
    }
    const FunctionSource* best = nullptr;
    for (const auto& f : found) {
      if (!fn.source_file.empty() && f.file != fn.source_file) continue;
      if (best == nullptr ||
          std::abs(f.line_start - fn.source_line) < std::abs(best->line_start - fn.source_line)) {
        best = &f;
      }
    }
    if (best == nullptr) {
      throw Error(ErrorKind::InvalidConfig, fn.id + ": no definition of " + fn.function_name + " in " +
                                                (fn.source_file.empty() ? "the project" : fn.source_file));
    }
    fn.source_code = best->source_text;
    fn.source_file = best->file;
    fn.source_line = best->line_start;
  }
  ctx.checkout->resolve(fn.source_file);  // must stay inside the checkout

  if (spec.executor.kind == ExecutorConfig::Kind::Simulated) {
    ctx.simulated = SimulatedProject::load(spec.executor.simproject);
  }
  return ctx;
}

Orchestrator::Orchestrator(RunConfig config, BackendProvider& backends)
    : config_(std::move(config)), backends_(backends), repo_(config_.output_dir / "repo") {
  validate(config_);
}

fs::path Orchestrator::workspace_dir(const std::string& benchmark_id, const std::string& trial_id,
                                     int cycle, const std::string& agent, int attempt) const {
  return config_.output_dir / "workspaces" / benchmark_id / trial_id /
         ("c" + std::to_string(cycle) + "-" + agent + "-a" + std::to_string(attempt));
}

Orchestrator::StageResult Orchestrator::run_stage(const BenchmarkContext& ctx, const std::string& trial_id,
                                                  int cycle, const std::string& agent,
                                                  const Bindings& bindings, int attempt) {
  StageResult out;
  const std::string& bm = ctx.spec.function.id;
  try {
    auto backend = backends_.backend_for(SessionKey{bm, trial_id, cycle, agent, attempt});
    ToolboxRunner tools(*ctx.checkout, ctx.index);
    AgentSession session = run_agent(agent_spec(agent), bindings, *backend, tools, config_.limits);
    BundleMeta meta{agent, bm, trial_id, cycle, ""};
    capture_session(session, meta, bundles_dir() / bundle_relative_path(meta, attempt));
    if (!session.completed()) {
      out.error = std::string(to_string(session.outcome)) + (session.error.empty() ? "" : ": " + session.error);
    }
    out.session = std::move(session);
  } catch (const Error& e) {
    out.error = e.what();
  }
  if (!out.ok()) {
    spdlog::warn("{}/{} cycle {} {}: {}", bm, trial_id, cycle, agent, out.error);
  }
  return out;
}

std::string Orchestrator::constraint_text(const BenchmarkContext& ctx, const fs::path& ws) const {
  if (!config_.constraints_enabled) return std::string(kNoConstraints);
  const fs::path p = ws / "constraints" / (function_hash(ctx.spec.function) + ".xmlish");
  if (!fs::is_regular_file(p)) return std::string(kNoConstraints);
  ConstraintReport report = parse_constraint_report(read_file(p));
  return render_constraints_for_prompt(&report);
}

ExecutionResult Orchestrator::execute(const BenchmarkContext& ctx, const FuzzDriver& driver,
                                      const std::string& trial_id) const {
  if (ctx.simulated) return execute_driver(driver, *ctx.simulated, config_.fuzz_duration_s);
  return execute_driver(driver, ctx.spec.executor.external,
                        config_.output_dir / "work" / ctx.spec.function.id / trial_id,
                        config_.fuzz_duration_s);
}

void Orchestrator::save_state(const TrialState& state) {
  write_file_atomic(results_dir() / state.benchmark_id / state.trial_id / "state.json",
                    to_json(state).dump(2) + "\n");
}

void Orchestrator::analyze_benchmark(BenchmarkContext& ctx) {
  if (!config_.constraints_enabled) return;
  const auto& fn = ctx.spec.function;
  const std::string trial = "benchmark";
  StageWorkspace ws(repo_, fn.id, workspace_dir(fn.id, trial, 0, kFunctionAnalyzer, 1));
  auto stage = run_stage(ctx, trial, 0, kFunctionAnalyzer, function_analyzer_bindings(fn), 1);
  if (stage.session) ctx.function_analysis_usage += stage.session->token_usage;
  const auto& u = ctx.function_analysis_usage;
  ojson record;
  record["completed"] = stage.ok();
  record["failure"] = stage.error;
  record["token_usage"] = {{"input", u.input}, {"tool", u.tool}, {"output", u.output}};
  write_file_atomic(results_dir() / fn.id / "function-analysis.json", record.dump(2) + "\n");
  if (!stage.ok()) {
    // Trials go ahead without constraints.
    ctx.function_analysis_failure = stage.error;
    return;
  }
  ConstraintReport report = parse_constraint_report(stage.session->final_output);
  report.target = fn.project_name + "::" + fn.function_signature;
  ws.put("constraints/" + function_hash(fn) + ".xmlish", serialize_constraint_report(report));
  ws.commit();
  ctx.constraints = std::move(report);
}

TrialState Orchestrator::run_trial(const BenchmarkContext& ctx, const std::string& trial_id) {
  const auto& fn = ctx.spec.function;
  const std::string& bm = fn.id;
  TrialState st;
  st.benchmark_id = bm;
  st.trial_id = trial_id;

  auto usage = [&](const StageResult& r, const std::string& agent) {
    if (r.session) st.usage_by_agent[agent] += r.session->token_usage;
  };

  std::string feedback;  // bound into the next Enhancer prompt
  try {
    save_state(st);
    for (int cycle = 1; cycle <= config_.max_cycles; ++cycle) {
      // --- writing (+ build, with retries) ---------------------------------
      std::optional<ExecutionResult> exec;
      std::string last_error;
      for (int attempt = 1; attempt <= 1 + config_.writer_retries && !exec; ++attempt) {
        const std::string agent = st.driver.revision == 0 ? kPrototyper : kEnhancer;
        StageWorkspace ws(repo_, bm, workspace_dir(bm, trial_id, cycle, agent, attempt));
        const std::string constraints = constraint_text(ctx, ws.dir());
        st.constraints_used = constraints != kNoConstraints;
        Bindings b{{"project", fn.project_name},
                   {"function_signature", fn.function_signature},
                   {"function_source", fn.source_code},
                   {"constraints", constraints}};
        if (agent == kEnhancer) {
          const std::string prev = "drivers/" + trial_id + "/rev" + std::to_string(st.driver.revision) + ".cc";
          b["previous_driver"] = ws.read(prev).value_or(st.driver.source);
          std::string fb = feedback;
          if (!last_error.empty()) {
            fb += (fb.empty() ? "" : "\n\n") + std::string("The previous attempt failed:\n") + last_error;
          }
          b["feedback"] = fb.empty() ? "No feedback from the previous cycle." : fb;
        }
        auto stage = run_stage(ctx, trial_id, cycle, agent, b, attempt);
        usage(stage, agent);
        if (!stage.ok()) {
          last_error = stage.error;
          continue;
        }
        FuzzDriver driver{parse_fuzz_driver_output(stage.session->final_output), st.driver.revision + 1, false};
        ws.put("drivers/" + trial_id + "/rev" + std::to_string(driver.revision) + ".cc", driver.source);
        ws.commit();
        st.driver = driver;
        try {
          exec = execute(ctx, st.driver, trial_id);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::BuildFailure) throw;
          last_error = e.what();
          repo_.write(bm, "builds/" + trial_id + "/rev" + std::to_string(driver.revision) + ".log", last_error);
        }
      }
      if (!exec) {
        st.termination = Termination::Failed;
        st.failure = "cycle " + std::to_string(cycle) + ": no working driver after " +
                     std::to_string(1 + config_.writer_retries) + " attempts: " + last_error;
        save_state(st);
        return st;
      }

      // --- execution ---------------------------------------------------------
      st.driver.build_ok = true;
      st.execution = exec;
      st.coverage_history.push_back(exec->coverage);
      st.cycle = cycle;
      repo_.write(bm, "executions/" + trial_id + "/c" + std::to_string(cycle) + ".json",
                  execution_json(*exec).dump(2) + "\n");

      // --- analysis ----------------------------------------------------------
      feedback.clear();
      if (!exec->crashed) {
        StageWorkspace ws(repo_, bm, workspace_dir(bm, trial_id, cycle, kCoverageAnalyzer, 1));
        Bindings b{{"project", fn.project_name},
                   {"function_signature", fn.function_signature},
                   {"constraints", constraint_text(ctx, ws.dir())},
                   {"fuzz_driver", st.driver.source},
                   {"coverage", format_coverage(exec->coverage)}};
        auto stage = run_stage(ctx, trial_id, cycle, kCoverageAnalyzer, b, 1);
        usage(stage, kCoverageAnalyzer);
        if (stage.ok()) {
          const std::string suggestions = parse_coverage_analysis_output(stage.session->final_output);
          ws.put("coverage/" + trial_id + "/c" + std::to_string(cycle) + ".txt", suggestions + "\n");
          ws.commit();
          feedback = "Coverage analysis of the previous driver suggests:\n" + suggestions;
        }
      } else {
        CrashRecord rec;
        rec.id = trial_id + "-c" + std::to_string(cycle);
        rec.cycle = cycle;
        rec.crash = *exec->crash;
        const std::string crash_dir = "crashes/" + rec.id + "/";
        repo_.write(bm, crash_dir + "crash.json", to_json(rec.crash).dump(2) + "\n");

        {
          StageWorkspace ws(repo_, bm, workspace_dir(bm, trial_id, cycle, kCrashAnalyzer, 1));
          Bindings b{{"project", fn.project_name},
                     {"function_signature", fn.function_signature},
                     {"constraints", constraint_text(ctx, ws.dir())},
                     {"fuzz_driver", st.driver.source},
                     {"crash_type", rec.crash.crash_type},
                     {"stacktrace", rec.crash.stacktrace_text()},
                     {"crash_logs", capped(rec.crash.logs, kMaxPromptLogBytes)}};
          auto stage = run_stage(ctx, trial_id, cycle, kCrashAnalyzer, b, 1);
          usage(stage, kCrashAnalyzer);
          if (stage.ok()) {
            auto analysis = parse_crash_analysis_output(stage.session->final_output);
            rec.crash.classification = analysis.classification;
            rec.crash.root_cause = analysis.root_cause;
            ws.put(crash_dir + "analysis.xmlish", stage.session->final_output);
          } else {
            // Unclassified crashes are treated as program errors so they are
            // never silently dropped.
            rec.crash.classification = CrashClassification::ProgramError;
          }
          ws.put(crash_dir + "crash.json", to_json(rec.crash).dump(2) + "\n");
          ws.commit();
        }

        if (rec.crash.classification == CrashClassification::ProgramError && config_.validator_enabled) {
          StageWorkspace ws(repo_, bm, workspace_dir(bm, trial_id, cycle, kCrashValidator, 1));
          // The validator works from the crash as the analysis stage left it.
          const CrashReport crash = crash_from_json(ojson::parse(ws.read(crash_dir + "crash.json").value()));
          auto stage = run_stage(ctx, trial_id, cycle, kCrashValidator, crash_validator_bindings(fn, crash), 1);
          usage(stage, kCrashValidator);
          if (stage.ok()) {
            rec.verdict = parse_feasibility_output(stage.session->final_output);
            ws.put(crash_dir + "verdict.xmlish", serialize_feasibility(*rec.verdict));
            ws.commit();
            if (!rec.verdict->feasible) {
              feedback =
                  "The previous driver produced a crash that cannot be triggered from the project's "
                  "entry points. Fix recommendations from the crash validation:\n" +
                  rec.verdict->recommendations;
            }
          } else {
            rec.validation_failed = true;
          }
        } else if (rec.crash.classification == CrashClassification::FuzzDriverError) {
          feedback = "The previous driver crashed because of a fuzz driver error. Root cause:\n" +
                     rec.crash.root_cause;
        }
        st.crash_history.push_back(std::move(rec));
      }

      st.termination = should_stop(st, config_);
      save_state(st);
      if (st.termination != Termination::Running) break;
    }
  } catch (const std::exception& e) {
    st.termination = Termination::Failed;
    st.failure = e.what();
    spdlog::error("{}/{} failed: {}", bm, trial_id, e.what());
    try {
      save_state(st);
    } catch (const std::exception&) {
    }
  }
  return st;
}

std::vector<TrialState> Orchestrator::run_benchmark(BenchmarkContext& ctx) {
  std::vector<TrialState> results(static_cast<std::size_t>(config_.n_trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < config_.n_trials; i = next++) {
      results[static_cast<std::size_t>(i)] = run_trial(ctx, trial_name(i + 1));
    }
  };
  const int n = std::min(config_.parallel, config_.n_trials);
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

RunSummary run_experiment(const RunConfig& config, BackendProvider& backends) {
  Orchestrator orch(config, backends);
  RunSummary summary;
  for (const auto& spec : load_benchmarks(config.benchmarks_file)) {
    ++summary.benchmarks;
    try {
      BenchmarkContext ctx = prepare_benchmark(spec);
      orch.analyze_benchmark(ctx);
      summary.function_analysis_usage += ctx.function_analysis_usage;
      if (!ctx.function_analysis_failure.empty()) {
        summary.failures.push_back(spec.function.id + ": function analysis failed (" +
                                   ctx.function_analysis_failure + "); trials ran without constraints");
      }
      for (auto& t : orch.run_benchmark(ctx)) {
        if (t.termination == Termination::Failed) {
          summary.failures.push_back(t.benchmark_id + "/" + t.trial_id + ": " + t.failure);
        }
        summary.trials.push_back(std::move(t));
      }
    } catch (const Error& e) {
      summary.failures.push_back(spec.function.id + ": " + e.what());
    }
  }
  return summary;
}

ResultsTree load_results(const fs::path& results_dir) {
  if (!fs::is_directory(results_dir)) {
    throw Error(ErrorKind::NotFound, "no results directory at " + results_dir.string());
  }
  ResultsTree tree;
  std::vector<fs::path> bms;
  for (const auto& e : fs::directory_iterator(results_dir)) {
    if (e.is_directory()) bms.push_back(e.path());
  }
  std::sort(bms.begin(), bms.end());
  for (const auto& bm : bms) {
    ++tree.benchmarks;
    const fs::path fa = bm / "function-analysis.json";
    if (fs::is_regular_file(fa)) {
      try {
        const auto j = ojson::parse(read_file(fa));
        const auto& u = j.at("token_usage");
        tree.function_analysis_usage += TokenUsage{u.at("input").get<std::uint64_t>(),
                                                   u.at("tool").get<std::uint64_t>(),
                                                   u.at("output").get<std::uint64_t>()};
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, fa.string() + ": " + e.what());
      }
    }
    std::vector<fs::path> states;
    for (const auto& e : fs::directory_iterator(bm)) {
      if (e.is_directory() && fs::is_regular_file(e.path() / "state.json")) states.push_back(e.path() / "state.json");
    }
    std::sort(states.begin(), states.end());
    for (const auto& p : states) {
      try {
        tree.trials.push_back(trial_state_from_json(ojson::parse(read_file(p))));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, p.string() + ": " + e.what());
      } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, p.string() + ": " + e.what());
      }
    }
  }
  return tree;
}

}  // namespace crashsift
