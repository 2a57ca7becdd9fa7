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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "crashsift/agents.hpp"
#include "crashsift/analyzers.hpp"
#include "crashsift/backends.hpp"
#include "crashsift/metrics.hpp"
#include "crashsift/pipeline.hpp"
#include "crashsift/replay.hpp"
#include "crashsift/tool_runner.hpp"
#include "crashsift/util.hpp"

namespace fs = std::filesystem;

namespace crashsift::cli {
namespace {

constexpr const char* kStandaloneTrial = "standalone";

// Backend selection shared by the single-agent commands.
struct BackendFlags {
  std::string scripted;
  std::string endpoint;
  std::string model;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--scripted", scripted, "Scripted bundle file or bundle directory");
    cmd->add_option("--live-endpoint", endpoint, "OpenAI-compatible chat completions URL (key from $CRASHSIFT_API_KEY)");
    cmd->add_option("--model", model, "Model name for --live-endpoint");
  }

  std::unique_ptr<LlmBackend> make(const std::string& benchmark_id, const std::string& agent) const {
    if (scripted.empty() == endpoint.empty()) {
      throw Error(ErrorKind::InvalidConfig, "choose exactly one of --scripted or --live-endpoint");
    }
    if (!scripted.empty()) {
      if (fs::is_regular_file(scripted)) return std::make_unique<ScriptedBackend>(ScriptedBackend::from_bundle(load_bundle(scripted)));
      if (!fs::is_directory(scripted)) throw Error(ErrorKind::NotFound, "no bundle or directory at " + scripted);
      ScriptDirectoryProvider provider(scripted);
      return provider.backend_for(SessionKey{benchmark_id, kStandaloneTrial, 0, agent, 1});
    }
    if (model.empty()) throw Error(ErrorKind::InvalidConfig, "--live-endpoint needs --model");
    LiveBackendConfig c;
    c.endpoint = endpoint;
    c.model = model;
    return std::make_unique<LiveBackend>(c);
  }
};

// A benchmark from a benchmarks file, with its checkout indexed beforehand.
struct BenchmarkFlags {
  std::string file;
  std::string id;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--benchmarks", file, "Benchmarks YAML")->required();
    cmd->add_option("--id", id, "Benchmark id (default: the only benchmark in the file)");
  }

  BenchmarkContext load() const {
    const auto specs = load_benchmarks(file);
    const BenchmarkSpec* spec = nullptr;
    if (id.empty()) {
      if (specs.size() != 1) throw Error(ErrorKind::InvalidConfig, file + " has several benchmarks; pass --id");
      spec = &specs.front();
    } else {
      for (const auto& s : specs) {
        if (s.function.id == id) spec = &s;
      }
      if (!spec) throw Error(ErrorKind::NotFound, "no benchmark '" + id + "' in " + file);
    }
    const ProjectCheckout probe(spec->function.project_name, spec->project_dir, spec->language);
    if (!fs::is_regular_file(probe.index_path())) {
      throw Error(ErrorKind::NotFound, "no index for " + probe.root().string() + "; run `crashsift index " +
                                           spec->project_dir.string() + "` first");
    }
    return prepare_benchmark(*spec);
  }
};

void configure_logging(bool verbose) {
  auto logger = spdlog::get("crashsift");
  if (!logger) {
    logger = spdlog::stderr_color_mt("crashsift");
    spdlog::set_default_logger(logger);
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
}

std::string plural(std::size_t n, const std::string& word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

int session_exit(const AgentSession& s) {
  switch (s.outcome) {
    case SessionOutcome::Completed: return kExitOk;
    case SessionOutcome::MalformedOutput: return exit_code_for(ErrorKind::MalformedOutput);
    case SessionOutcome::ToolBudgetExhausted: return exit_code_for(ErrorKind::ToolBudgetExhausted);
  }
  return kExitAgent;
}

bool parse_switch(const std::string& v) { return v == "on"; }

// --- commands ----------------------------------------------------------------

int cmd_index(const std::string& dir, const std::string& name, const std::string& language, std::ostream& out) {
  const ProjectCheckout checkout(name.empty() ? fs::path(dir).lexically_normal().filename().string() : name, dir,
                                 parse_language(language));
  const SymbolIndex index = build_symbol_index(checkout);
  save_index(index, checkout.index_path());
  const auto edges = std::count_if(index.call_edges.begin(), index.call_edges.end(),
                                   [](const CallEdge& e) { return !e.external; });
  out << plural(index.definition_count(), "function") << ", " << plural(static_cast<std::size_t>(edges), "edge")
      << ", " << plural(entry_points(index).size(), "entry point") << "\n";
  return kExitOk;
}

int cmd_analyze(const BenchmarkFlags& bf, const BackendFlags& flags, bool simple, const std::string& out_file,
                const fs::path& output_dir, std::ostream& out, std::ostream& err) {
  BenchmarkContext ctx = bf.load();
  const auto& fn = ctx.spec.function;
  const PromptVariant variant = simple ? PromptVariant::Simple : PromptVariant::Detailed;
  const std::string agent = std::string(kFunctionAnalyzer) + (simple ? std::string(kSimpleSuffix) : "");
  auto backend = flags.make(fn.id, agent);
  ToolboxRunner tools(*ctx.checkout, ctx.index);
  FunctionAnalysis fa = run_function_analyzer(fn, *backend, tools, {}, variant);

  const fs::path bundle = output_dir / "bundles" / bundle_relative_path({agent, fn.id, kStandaloneTrial, 0, ""});
  capture_session(fa.session, {agent, fn.id, kStandaloneTrial, 0, ""}, bundle);
  if (!fa.report) {
    err << "function analysis failed: " << to_string(fa.session.outcome)
        << (fa.session.error.empty() ? "" : " (" + fa.session.error + ")") << "; transcript in " << bundle.string()
        << "\n";
    return session_exit(fa.session);
  }
  fa.report->target = fn.project_name + "::" + fn.function_signature;
  const fs::path dest =
      out_file.empty() ? output_dir / "constraints" / (function_hash(fn) + ".xmlish") : fs::path(out_file);
  write_file_atomic(dest, serialize_constraint_report(*fa.report));
  std::map<std::string, int> by_category;
  for (const auto& c : fa.report->constraints) ++by_category[std::string(to_string(c.category))];
  out << plural(fa.report->constraints.size(), "constraint");
  std::string sep = " (";
  for (const auto& [cat, n] : by_category) {
    out << sep << n << " " << cat;
    sep = ", ";
  }
  out << (by_category.empty() ? "" : ")") << " -> " << dest.string() << "\n";
  return kExitOk;
}

int cmd_validate(const BenchmarkFlags& bf, const BackendFlags& flags, bool simple, const std::string& crash_file,
                 const std::string& out_file, const fs::path& output_dir, std::ostream& out, std::ostream& err) {
  CrashReport crash;
  try {
    crash = crash_from_json(nlohmann::ordered_json::parse(read_file(crash_file)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, crash_file + ": " + e.what());
  }
  if (crash.classification != CrashClassification::ProgramError) {
    err << "refusing to validate " << crash_file << ": it is "
        << (crash.classification ? "classified " + std::string(to_string(*crash.classification)) : std::string("unclassified"))
        << "; only Program Error crashes are checked for feasibility\n";
    return kExitUsage;
  }
  BenchmarkContext ctx = bf.load();
  const auto& fn = ctx.spec.function;
  const PromptVariant variant = simple ? PromptVariant::Simple : PromptVariant::Detailed;
  const std::string agent = std::string(kCrashValidator) + (simple ? std::string(kSimpleSuffix) : "");
  auto backend = flags.make(fn.id, agent);
  ToolboxRunner tools(*ctx.checkout, ctx.index);
  CrashValidation cv = run_crash_validator(fn, crash, *backend, tools, {}, variant);

  const std::string stem = fs::path(crash_file).stem().string();
  const fs::path bundle = output_dir / "bundles" / bundle_relative_path({agent, fn.id, kStandaloneTrial, 0, ""});
  capture_session(cv.session, {agent, fn.id, kStandaloneTrial, 0, ""}, bundle);
  if (!cv.verdict) {
    err << "crash validation failed: " << to_string(cv.session.outcome)
        << (cv.session.error.empty() ? "" : " (" + cv.session.error + ")") << "; transcript in " << bundle.string()
        << "\n";
    return session_exit(cv.session);
  }
  const fs::path dest = out_file.empty() ? output_dir / "crashes" / stem / "verdict.xmlish" : fs::path(out_file);
  write_file_atomic(dest, serialize_feasibility(*cv.verdict));
  out << "feasible=" << (cv.verdict->feasible ? "true" : "false") << "\n";
  return kExitOk;
}

struct RunFlags {
  std::string config;
  std::string constraints;
  std::string validator;
  int parallel = 0;
  int n_trials = 0;
  std::string output_dir;
};

int cmd_run(const RunFlags& f, std::ostream& out, std::ostream& err) {
  RunConfig config = load_run_config(f.config);
  if (!f.constraints.empty()) config.constraints_enabled = parse_switch(f.constraints);
  if (!f.validator.empty()) config.validator_enabled = parse_switch(f.validator);
  if (f.parallel > 0) config.parallel = f.parallel;
  if (f.n_trials > 0) config.n_trials = f.n_trials;
  if (!f.output_dir.empty()) config.output_dir = f.output_dir;
  validate(config);

  std::unique_ptr<BackendProvider> provider;
  if (config.scripted_dir) provider = std::make_unique<ScriptDirectoryProvider>(*config.scripted_dir);
  else provider = std::make_unique<SharedLiveProvider>(*config.live);

  const RunSummary summary = run_experiment(config, *provider);
  const PriceTable prices = config.prices_file ? load_prices(*config.prices_file) : PriceTable{};

  const std::string label = config.constraints_enabled ? "with FC" : "w/o FC";
  ConfigurationSummary cs{label, {summarize_trials("all", summary.benchmarks, summary.trials)}};
  std::vector<CostRecord> costs;
  if (!summary.trials.empty()) costs = per_driver_costs(summary.trials, summary.function_analysis_usage, prices);
  const RenderedReport report = report_tables({cs}, costs);
  const fs::path rdir = config.output_dir / "report";
  write_file_atomic(rdir / "report.txt", report.text);
  write_file_atomic(rdir / "sets.csv", report.sets_csv);
  write_file_atomic(rdir / "costs.csv", report.costs_csv);

  std::map<std::string, int> by_termination;
  for (const auto& t : summary.trials) ++by_termination[std::string(to_string(t.termination))];
  out << plural(summary.trials.size(), "trial") << " over " << plural(summary.benchmarks, "benchmark") << ":";
  for (const auto& [k, n] : by_termination) out << " " << k << "=" << n;
  out << "\n\n" << report.text;
  if (!summary.failures.empty()) {
    err << "failures:\n";
    for (const auto& f : summary.failures) err << "  " << f << "\n";
  }
  return kExitOk;
}

struct ReplayFlags {
  std::string bundle;
  int times = 1;
  std::string agent;
  std::vector<std::string> variants;
  std::string endpoint;
  std::string model;
  std::string project_dir;
  std::string language = "c";
  std::string out_dir;
};

std::string run_verdict(const AgentSession& s) {
  std::string v = "outcome=" + std::string(to_string(s.outcome));
  if (!s.completed()) return v;
  if (base_agent_name(s.agent) == kCrashValidator) {
    try {
      return v + " feasible=" + (parse_feasibility_output(s.final_output).feasible ? "true" : "false");
    } catch (const Error&) {
    }
  }
  return v + " output=" + sha256_hex(s.final_output).substr(0, 16);
}

int cmd_replay(const ReplayFlags& f, std::ostream& out) {
  if (f.times < 1) throw Error(ErrorKind::InvalidConfig, "--times must be >= 1");
  const SessionBundle bundle = load_bundle(f.bundle);
  const AgentSpec spec = agent_spec(f.agent.empty() ? bundle.meta.agent : f.agent);
  std::vector<SessionBundle> variants;
  for (const auto& v : f.variants) variants.push_back(load_bundle(v));
  if (!variants.empty() && !f.endpoint.empty()) {
    throw Error(ErrorKind::InvalidConfig, "--variant and --live-endpoint are exclusive");
  }

  std::unique_ptr<ProjectCheckout> checkout;
  std::unique_ptr<ToolboxRunner> tools;
  std::shared_ptr<LiveBackend> live;
  if (!f.endpoint.empty()) {
    if (f.model.empty() || f.project_dir.empty()) {
      throw Error(ErrorKind::InvalidConfig, "a live replay needs --model and --project-dir");
    }
    checkout = std::make_unique<ProjectCheckout>(bundle.meta.benchmark_id, f.project_dir, parse_language(f.language));
    auto index = std::make_shared<const SymbolIndex>(load_index(checkout->index_path()));
    tools = std::make_unique<ToolboxRunner>(*checkout, index);
    LiveBackendConfig c;
    c.endpoint = f.endpoint;
    c.model = f.model;
    live = std::make_shared<LiveBackend>(c);
  }

  std::vector<std::string> verdicts;
  for (int i = 0; i < f.times; ++i) {
    AgentSession s;
    if (live) {
      s = replay_agent(bundle, spec, *live, tools.get());
    } else {
      SessionBundle source = bundle;
      if (!variants.empty()) {
        const auto& v = variants[static_cast<std::size_t>(i) % variants.size()];
        source.turns = v.turns;
        source.final_output = v.final_output;
        source.outcome = v.outcome;
      }
      ScriptedBackend backend = ScriptedBackend::from_bundle(source, BackendKind::Replay);
      s = replay_agent(source, spec, backend);
    }
    if (!f.out_dir.empty()) {
      BundleMeta meta = bundle.meta;
      meta.timestamp.clear();
      capture_session(s, meta, fs::path(f.out_dir) / ("run" + std::to_string(i + 1) + ".bundle.json"));
    }
    verdicts.push_back(run_verdict(s));
    out << "run " << (i + 1) << ": " << verdicts.back() << "\n";
  }
  if (f.times > 1) {
    const bool same = std::all_of(verdicts.begin(), verdicts.end(), [&](const auto& v) { return v == verdicts.front(); });
    out << (same ? "consistent" : "inconsistent") << "\n";
  }
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& results, const std::vector<std::string>& labels,
               const std::string& prices_file, const std::string& out_dir, std::ostream& out) {
  if (!labels.empty() && labels.size() != results.size()) {
    throw Error(ErrorKind::InvalidConfig, "give one --label per --results");
  }
  const PriceTable prices = prices_file.empty() ? PriceTable{} : load_prices(prices_file);
  std::vector<ConfigurationSummary> configs;
  std::vector<CostRecord> costs;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const ResultsTree tree = load_results(results[i]);
    const std::string label = labels.empty() ? fs::path(results[i]).lexically_normal().parent_path().filename().string()
                                             : labels[i];
    configs.push_back({label.empty() ? "config" + std::to_string(i + 1) : label,
                       {summarize_trials("all", tree.benchmarks, tree.trials)}});
    // Cost rows come from the last configuration given.
    costs = tree.trials.empty() ? std::vector<CostRecord>{}
                                : per_driver_costs(tree.trials, tree.function_analysis_usage, prices);
  }
  const RenderedReport report = report_tables(configs, costs);
  if (!out_dir.empty()) {
    write_file_atomic(fs::path(out_dir) / "report.txt", report.text);
    write_file_atomic(fs::path(out_dir) / "sets.csv", report.sets_csv);
    write_file_atomic(fs::path(out_dir) / "costs.csv", report.costs_csv);
  }
  out << report.text;
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::PreconditionViolation:
    case ErrorKind::SpecMismatch:
      return kExitUsage;
    case ErrorKind::ParseError:
    case ErrorKind::IOFailure:
    case ErrorKind::NotFound:
    case ErrorKind::EmptyProject:
    case ErrorKind::PathEscape:
    case ErrorKind::UnbalancedTags:
    case ErrorKind::MalformedOutput:
      return kExitParse;
    default:
      return kExitAgent;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"crashsift: agent-driven fuzz driver generation with crash validation"};
  app.name("crashsift");
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging on stderr");
  std::string output_dir = "crashsift-out";

  auto* index = app.add_subcommand("index", "Build the symbol index of a project");
  std::string index_dir, index_name, index_lang = "c";
  index->add_option("project_dir", index_dir, "Project directory")->required();
  index->add_option("--name", index_name, "Project name (default: directory name)");
  index->add_option("--language", index_lang, "c or c++")->check(CLI::IsMember({"c", "c++", "cpp"}));

  auto* analyze = app.add_subcommand("analyze-function", "Run the Function Analyzer on one benchmark");
  BenchmarkFlags analyze_bm;
  BackendFlags analyze_backend;
  bool analyze_simple = false;
  std::string analyze_out;
  analyze_bm.add_to(analyze);
  analyze_backend.add_to(analyze);
  analyze->add_flag("--simple", analyze_simple, "Use the task-only prompt");
  analyze->add_option("--out", analyze_out, "Constraint report path");
  analyze->add_option("--output-dir", output_dir, "Where bundles and reports go");

  auto* validate_cmd = app.add_subcommand("validate-crash", "Run Crash Validation on one crash");
  BenchmarkFlags validate_bm;
  BackendFlags validate_backend;
  bool validate_simple = false;
  std::string crash_file, validate_out;
  validate_bm.add_to(validate_cmd);
  validate_backend.add_to(validate_cmd);
  validate_cmd->add_option("--crash", crash_file, "Crash JSON")->required();
  validate_cmd->add_flag("--simple", validate_simple, "Use the task-only prompt");
  validate_cmd->add_option("--out", validate_out, "Verdict path");
  validate_cmd->add_option("--output-dir", output_dir, "Where bundles and verdicts go");

  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline from a config file");
  RunFlags rf;
  run_cmd->add_option("config", rf.config, "Run config YAML")->required();
  run_cmd->add_option("--constraints", rf.constraints, "on|off")->check(CLI::IsMember({"on", "off"}));
  run_cmd->add_option("--validator", rf.validator, "on|off")->check(CLI::IsMember({"on", "off"}));
  run_cmd->add_option("--parallel", rf.parallel, "Concurrent trials")->check(CLI::PositiveNumber);
  run_cmd->add_option("--n-trials", rf.n_trials, "Trials per benchmark")->check(CLI::PositiveNumber);
  run_cmd->add_option("--output-dir", rf.output_dir, "Override output_dir");

  auto* replay = app.add_subcommand("replay", "Re-run a captured agent session");
  ReplayFlags pf;
  replay->add_option("bundle", pf.bundle, "Session bundle")->required();
  replay->add_option("--times", pf.times, "Number of replays");
  replay->add_option("--agent", pf.agent, "Agent to replay as (default: the bundle's)");
  replay->add_option("--variant", pf.variants, "Scripted response bundles, used round-robin");
  replay->add_option("--live-endpoint", pf.endpoint, "Replay against a live model");
  replay->add_option("--model", pf.model, "Model for --live-endpoint");
  replay->add_option("--project-dir", pf.project_dir, "Indexed checkout serving live tool calls");
  replay->add_option("--language", pf.language, "c or c++");
  replay->add_option("--out-dir", pf.out_dir, "Save each replayed session here");

  auto* report = app.add_subcommand("report", "Render tables from results directories");
  std::vector<std::string> report_results, report_labels;
  std::string report_prices, report_out;
  report->add_option("--results", report_results, "results/ directory of one configuration (repeatable)")->required();
  report->add_option("--label", report_labels, "Configuration label, one per --results");
  report->add_option("--prices", report_prices, "prices.yaml");
  report->add_option("--out-dir", report_out, "Also write report.txt, sets.csv, costs.csv here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  configure_logging(verbose);

  try {
    if (*index) return cmd_index(index_dir, index_name, index_lang, out);
    if (*analyze) return cmd_analyze(analyze_bm, analyze_backend, analyze_simple, analyze_out, output_dir, out, err);
    if (*validate_cmd) {
      return cmd_validate(validate_bm, validate_backend, validate_simple, crash_file, validate_out, output_dir, out, err);
    }
    if (*run_cmd) return cmd_run(rf, out, err);
    if (*replay) return cmd_replay(pf, out);
    if (*report) return cmd_report(report_results, report_labels, report_prices, report_out, out);
  } catch (const Error& e) {
    err << "crashsift: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "crashsift: " << e.what() << "\n";
    return kExitAgent;
  }
  return kExitUsage;
}

}  // namespace crashsift::cli
