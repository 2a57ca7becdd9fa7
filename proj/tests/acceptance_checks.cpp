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

#include "acceptance_checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "crashsift/agents.hpp"
#include "crashsift/analyzers.hpp"
#include "crashsift/backends.hpp"
#include "crashsift/bundle.hpp"
#include "crashsift/crash.hpp"
#include "crashsift/error.hpp"
#include "crashsift/metrics.hpp"
#include "crashsift/pipeline.hpp"
#include "crashsift/replay.hpp"
#include "crashsift/shared_repo.hpp"
#include "crashsift/toolbox.hpp"
#include "generators.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace crashsift::acceptance {

using testing::TempDir;

struct PipelineRun {
  TempDir tmp{"crashsift-accept"};
  fs::path fixture;
  fs::path out;
  int exit_code = -1;
  double seconds = 0;
  std::string stdout_text;
  std::string stderr_text;
  ResultsTree results;
  std::vector<SessionBundle> bundles;
};

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

std::vector<SessionBundle> load_all_bundles(const fs::path& dir) {
  std::vector<fs::path> paths;
  if (fs::exists(dir)) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      auto name = e.path().filename().string();
      if (e.is_regular_file() && name.size() > 12 && name.substr(name.size() - 12) == ".bundle.json") {
        paths.push_back(e.path());
      }
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<SessionBundle> out;
  for (const auto& p : paths) out.push_back(load_bundle(p));
  return out;
}

// Constraint statements the fixture's scripted Function Analyzer emits,
// per benchmark.
std::map<std::string, std::vector<std::string>> scripted_statements() {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& e : fs::directory_iterator(testing::fixture_path("pipeline/scripts"))) {
    auto fa = e.path() / "function-analyzer.bundle.json";
    if (!fs::exists(fa)) continue;
    auto report = parse_constraint_report(load_bundle(fa).final_output);
    for (const auto& c : report.constraints) out[e.path().filename().string()].push_back(c.statement);
  }
  return out;
}

const TrialState* find_trial(const ResultsTree& r, const std::string& bm, const std::string& trial) {
  for (const auto& t : r.trials) {
    if (t.benchmark_id == bm && t.trial_id == trial) return &t;
  }
  return nullptr;
}

bool near(double a, double b) { return std::fabs(a - b) < 1e-9; }

}  // namespace

Suite::Suite() = default;
Suite::~Suite() = default;

const PipelineRun& Suite::pipeline(bool constraints) {
  auto& slot = constraints ? with_constraints_ : without_constraints_;
  if (slot) return *slot;
  slot = std::make_unique<PipelineRun>();
  auto& run = *slot;
  run.fixture = testing::copy_fixture("pipeline", run.tmp / "fixture");
  run.out = run.tmp / "out";
  std::ostringstream out, err;
  auto t0 = Clock::now();
  run.exit_code = cli::run({"run", (run.fixture / "run.yaml").string(), "--constraints", constraints ? "on" : "off",
                            "--validator", "on", "--output-dir", run.out.string()},
                           out, err);
  run.seconds = seconds_since(t0);
  run.stdout_text = out.str();
  run.stderr_text = err.str();
  if (fs::exists(run.out / "results")) run.results = load_results(run.out / "results");
  run.bundles = load_all_bundles(run.out / "bundles");
  return run;
}

// --- 1 ----------------------------------------------------------------------

CheckResult Suite::metric_reproduction() {
  CheckResult r{1, "metric reproduction", false, false, ""};
  auto t0 = Clock::now();
  std::vector<std::string> bad;
  auto expect = [&](const std::string& what, double got, const std::string& want) {
    if (format_percent(got) != want) bad.push_back(what + "=" + format_percent(got) + " want " + want);
  };
  // Crash counts with and without constraints, per set.
  expect("set1 diff", percent_reduction(1858, 1810), "2.6");
  expect("set2 diff", percent_reduction(1577, 1450), "8.1");
  expect("set3 diff", percent_reduction(1645, 1575), "4.3");
  // Program-error crashes and those the validator filtered.
  expect("set1 filtered", fp_filter_rate(1092, 626), "57.3");
  expect("set2 filtered", fp_filter_rate(840, 548), "65.2");
  expect("set3 filtered", fp_filter_rate(853, 522), "61.2");

  // 200 crashes: 130 agree infeasible, 6 agree feasible, 1 agrees on a failed
  // run, 63 disagree.
  std::vector<std::vector<std::optional<bool>>> runs;
  for (int i = 0; i < 130; ++i) runs.push_back({false, false, false});
  for (int i = 0; i < 6; ++i) runs.push_back({true, true, true});
  runs.push_back({std::nullopt, std::nullopt, std::nullopt});
  for (int i = 0; i < 63; ++i) runs.push_back({false, true, false});
  auto cs = consistency_stats(runs);
  if (cs.crashes != 200 || cs.consistent != 137) bad.push_back("consistent count " + std::to_string(cs.consistent));
  if (!(cs.consistent_pct >= 68.0 && cs.consistent_pct <= 69.0)) bad.push_back("consistency " + fmt(cs.consistent_pct));
  expect("consistent fp", cs.consistent_fp_pct, "65.0");
  expect("consistent tp", cs.consistent_tp_pct, "3.0");

  // Function Analyzer row: token counts chosen so each component lands on
  // the published cents at the default prices.
  TokenUsage usage;
  usage.input = 3200;    // 3200 * 1.25 $/Mtok = $0.004
  usage.tool = 12800;    // priced as input: $0.016
  usage.output = 400;    // 400 * 10 $/Mtok = $0.004
  auto cost = compute_cost("Function Analyzer", usage, PriceTable{});
  if (cost.input_micros != 4000 || cost.tool_micros != 16000 || cost.output_micros != 4000 ||
      cost.total_micros != 24000) {
    bad.push_back("cost row " + format_dollars_exact(cost.total_micros));
  }
  if (format_dollars(cost.input_micros) != "$0.004" || format_dollars(cost.tool_micros) != "$0.016" ||
      format_dollars(cost.total_micros) != "$0.024") {
    bad.push_back("cost formatting");
  }
  if (cost.input_micros + cost.tool_micros + cost.output_micros != cost.total_micros) bad.push_back("cost sum");

  double secs = seconds_since(t0);
  if (secs >= 1.0) bad.push_back("runtime " + fmt(secs) + " s");
  r.pass = bad.empty();
  r.detail = r.pass ? "diff 2.6/8.1/4.3, filtered 57.3/65.2/61.2, consistency " + format_percent(cs.consistent_pct) +
                          "%, cost $0.004+$0.016+$0.004=$0.024 (" + fmt(secs * 1000) + " ms)"
                    : bad.front();
  return r;
}

// --- 2 ----------------------------------------------------------------------

CheckResult Suite::scripted_pipeline() {
  CheckResult r{2, "end-to-end scripted pipeline", false, false, ""};
  const auto& run = pipeline(true);
  std::vector<std::string> bad;
  if (run.exit_code != 0) bad.push_back("run exited " + std::to_string(run.exit_code) + ": " + run.stderr_text);
  if (run.seconds >= 30.0) bad.push_back("run took " + fmt(run.seconds) + " s");
  if (run.results.trials.size() != 6) bad.push_back(std::to_string(run.results.trials.size()) + " trials");

  int rec_checks = 0;
  for (const std::string bm : {"imgdec-decode-plane", "imgdec-parse-header"}) {
    const auto* tp = find_trial(run.results, bm, "t01");
    const auto* plateau = find_trial(run.results, bm, "t02");
    const auto* maxc = find_trial(run.results, bm, "t03");
    if (!tp || !plateau || !maxc) {
      bad.push_back(bm + ": missing trial");
      continue;
    }
    if (tp->termination != Termination::TruePositive || tp->cycle != 1 || tp->crash_history.size() != 1 ||
        !tp->crash_history[0].verdict || !tp->crash_history[0].verdict->feasible) {
      bad.push_back(bm + "/t01 ended " + std::string(to_string(tp->termination)));
    }
    if (plateau->termination != Termination::CoveragePlateau || plateau->cycle != 2 ||
        plateau->coverage_history.size() != 2 || !near(plateau->coverage_history[0], 0.30) ||
        !near(plateau->coverage_history[1], 0.30) || !plateau->crash_history.empty()) {
      bad.push_back(bm + "/t02 ended " + std::string(to_string(plateau->termination)));
    }
    bool maxc_ok = maxc->termination == Termination::MaxCycles && maxc->cycle == 5 &&
                   maxc->crash_history.size() == 5 && maxc->coverage_history.size() == 5;
    for (std::size_t k = 0; maxc_ok && k < 5; ++k) {
      const auto& rec = maxc->crash_history[k];
      maxc_ok = rec.cycle == static_cast<int>(k) + 1 && rec.verdict && !rec.verdict->feasible &&
                near(maxc->coverage_history[k], 0.1 * static_cast<double>(k + 1));
    }
    if (!maxc_ok) bad.push_back(bm + "/t03 ended " + std::string(to_string(maxc->termination)));

    // Recommendations of every infeasible verdict reach the next Enhancer.
    for (const auto* t : {tp, plateau, maxc}) {
      for (const auto& rec : t->crash_history) {
        if (!rec.verdict || rec.verdict->feasible || rec.cycle >= t->cycle) continue;
        bool found = false;
        bool seen = false;
        for (const auto& b : run.bundles) {
          if (b.meta.benchmark_id != bm || b.meta.trial_id != t->trial_id || b.meta.cycle != rec.cycle + 1 ||
              b.meta.agent != kEnhancer) {
            continue;
          }
          seen = true;
          auto prompt = reconstruct_prompt(b, agent_spec(kEnhancer));
          if (prompt.find(rec.verdict->recommendations) != std::string::npos) found = true;
        }
        ++rec_checks;
        if (!seen || !found) bad.push_back(bm + "/" + t->trial_id + " cycle " + std::to_string(rec.cycle + 1) +
                                           ": recommendations missing from the Enhancer prompt");
      }
    }
  }
  if (rec_checks != 8) bad.push_back(std::to_string(rec_checks) + " recommendation hand-offs, want 8");
  r.pass = bad.empty();
  r.detail = r.pass ? "6 trials (TruePositive/CoveragePlateau/MaxCycles x2) in " + fmt(run.seconds) +
                          " s; 8/8 recommendation hand-offs found in Enhancer prompts"
                    : bad.front();
  return r;
}

// --- 3 ----------------------------------------------------------------------

CheckResult Suite::constraint_wiring() {
  CheckResult r{3, "constraint wiring A/B", false, false, ""};
  auto statements = scripted_statements();
  std::vector<std::string> bad;
  int on_prompts = 0, on_full = 0, off_prompts = 0, off_any = 0;
  for (bool on : {true, false}) {
    const auto& run = pipeline(on);
    if (run.exit_code != 0) bad.push_back(std::string(on ? "on" : "off") + " run exited " + std::to_string(run.exit_code));
    for (const auto& b : run.bundles) {
      if (!receives_constraints(b.meta.agent)) continue;
      auto prompt = reconstruct_prompt(b, agent_spec(b.meta.agent));
      const auto& wanted = statements[b.meta.benchmark_id];
      if (wanted.empty()) bad.push_back("no scripted constraints for " + b.meta.benchmark_id);
      int hits = 0;
      for (const auto& s : wanted) hits += prompt.find(s) != std::string::npos ? 1 : 0;
      if (on) {
        ++on_prompts;
        if (hits == static_cast<int>(wanted.size())) ++on_full;
      } else {
        ++off_prompts;
        if (hits > 0) ++off_any;
      }
    }
  }
  if (on_prompts == 0 || off_prompts == 0) bad.push_back("no writer/analyzer prompts captured");
  if (on_full != on_prompts) bad.push_back("constraints on: " + std::to_string(on_full) + "/" + std::to_string(on_prompts));
  if (off_any != 0) bad.push_back("constraints off: " + std::to_string(off_any) + "/" + std::to_string(off_prompts));
  r.pass = bad.empty();
  r.detail = r.pass ? "on: " + std::to_string(on_full) + "/" + std::to_string(on_prompts) +
                          " prompts carry every statement; off: 0/" + std::to_string(off_prompts)
                    : bad.front();
  return r;
}

// --- 4 ----------------------------------------------------------------------

CheckResult Suite::replay_fidelity() {
  CheckResult r{4, "replay fidelity", false, false, ""};
  const auto& run = pipeline(true);
  int total = 0, identical = 0;
  std::string first_bad;
  for (const auto& b : run.bundles) {
    ++total;
    try {
      auto backend = ScriptedBackend::from_bundle(b, BackendKind::Replay);
      auto session = replay_agent(b, agent_spec(b.meta.agent), backend, nullptr, recorded_limits(b));
      if (session.final_output == b.final_output && session.outcome == b.outcome) {
        ++identical;
      } else if (first_bad.empty()) {
        first_bad = b.meta.benchmark_id + "/" + b.meta.trial_id + "/" + b.meta.agent + " diverged";
      }
    } catch (const std::exception& e) {
      if (first_bad.empty()) first_bad = b.meta.agent + ": " + e.what();
    }
  }
  r.pass = total > 0 && identical == total;
  r.detail = std::to_string(identical) + "/" + std::to_string(total) + " sessions byte-identical" +
             (first_bad.empty() ? "" : "; " + first_bad);
  return r;
}

// --- 5 ----------------------------------------------------------------------

CheckResult Suite::toolbox_oracle() {
  CheckResult r{5, "toolbox oracle equivalence and sandbox", false, false, ""};
  std::vector<std::string> bad;
  TempDir tmp("crashsift-oracle");
  struct Project {
    std::string fixture;
    std::string name;
    Language lang;
  };
  const std::vector<Project> projects = {
      {"pipeline/imgdec", "imgdec", Language::C},
      {"libraw/src", "libraw", Language::CPlusPlus},
      {"tiny", "tiny", Language::C},
  };
  int names_checked = 0;
  for (const auto& p : projects) {
    auto root = testing::copy_fixture(p.fixture, tmp / p.name);
    ProjectCheckout checkout(p.name, root, p.lang);
    auto index = build_symbol_index(checkout);
    auto scan = testing::oracle_scan(root);
    std::set<std::string> names;
    for (const auto& d : scan.definitions) names.insert(d.name);
    for (const auto& c : scan.calls) names.insert(c.callee);
    for (const auto& n : names) {
      std::vector<std::tuple<std::string, std::string, int>> got;
      for (const auto& c : find_callers(index, n)) got.emplace_back(c.caller, c.file, c.line);
      std::sort(got.begin(), got.end());
      if (got != testing::oracle_callers(scan, n)) bad.push_back(p.name + ": callers of " + n + " differ");
      ++names_checked;
    }
    auto ep = entry_points(index);
    std::set<std::string> got_ep(ep.begin(), ep.end());
    if (got_ep != testing::oracle_entry_points(scan) || got_ep.empty()) {
      bad.push_back(p.name + ": entry points differ");
    }
  }

  // Adversarial commands against a scratch checkout with a symlink pointing
  // outside of it.
  auto root = testing::copy_fixture("tiny", tmp / "sandbox");
  testing::write_text(tmp / "outside" / "passwd", "secret\n");
  fs::create_directory_symlink(tmp / "outside", root / "escape_link");
  ProjectCheckout checkout("tiny", root, Language::C);
  auto before = hash_tree(root);
  int cases = 0, rejected = 0;
  std::istringstream corpus(testing::read_text(testing::fixture_path("sandbox/adversarial.txt")));
  for (std::string line; std::getline(corpus, line);) {
    if (line.empty() || line[0] == '#') continue;
    ++cases;
    try {
      code_search(checkout, line);
      bad.push_back("sandbox ran: " + line);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DisallowedCommand || e.kind() == ErrorKind::PathEscape) {
        ++rejected;
      } else {
        bad.push_back("sandbox: " + line + " -> " + e.what());
      }
    }
  }
  if (cases != 20) bad.push_back("corpus has " + std::to_string(cases) + " cases");
  if (hash_tree(root) != before) bad.push_back("sandbox checkout changed");
  // The sandbox still answers ordinary searches.
  auto ok = code_search(checkout, "grep -rn helper lib.c");
  if (ok.exit_status != 0 || ok.stdout_text.find("helper") == std::string::npos) bad.push_back("grep refused");

  r.pass = bad.empty();
  r.detail = r.pass ? std::to_string(names_checked) + " caller queries and 3 entry-point sets match the oracle; " +
                          std::to_string(rejected) + "/" + std::to_string(cases) + " adversarial commands rejected"
                    : bad.front();
  return r;
}

// --- 6 ----------------------------------------------------------------------

CheckResult Suite::parser_robustness() {
  CheckResult r{6, "parser robustness", false, false, ""};
  std::vector<std::string> bad;

  // Well-formed fixtures.
  auto hbo = parse_sanitizer_report(testing::read_text(testing::fixture_path("parsers/asan_hbo.log")));
  if (hbo.crash_type != "heap-buffer-overflow" || hbo.stacktrace.size() < 2 ||
      hbo.stacktrace[0].function != "flexbuffers::GetRoot(unsigned char const*, unsigned long)" ||
      hbo.stacktrace[0].file != "/src/flatbuffers/include/flatbuffers/flexbuffers.h" ||
      hbo.stacktrace[0].line != 1643 || hbo.stacktrace[1].function != "LLVMFuzzerTestOneInput") {
    bad.push_back("heap-buffer-overflow fixture");
  }
  for (const auto& f : hbo.stacktrace) {
    if (f.function.find("operator new") != std::string::npos) bad.push_back("allocation stack leaked into crash stack");
  }
  auto segv = parse_sanitizer_report(testing::read_text(testing::fixture_path("parsers/asan_segv.log")));
  if (segv.crash_type != "SEGV" || segv.stacktrace.size() != 3 ||
      segv.stacktrace[0].function != "LibRaw::crxDecodePlane(void*, unsigned int)" || segv.stacktrace[0].line != 2434) {
    bad.push_back("SEGV fixture");
  }
  auto verdict = parse_feasibility_output(testing::read_text(testing::fixture_path("parsers/infeasible_verdict.txt")));
  if (verdict.feasible || verdict.analysis.rfind("The crash is a heap-buffer-overflow read in `flexbuffers::GetRoot`", 0) != 0 ||
      verdict.analysis.find("at least 3 bytes long") == std::string::npos || verdict.source_code_evidence != "..." ||
      verdict.recommendations != "...") {
    bad.push_back("flexbuffers verdict fixture");
  }

  // Fuzzing: only the library's own errors may escape; anything else, or a
  // crash, fails.
  auto fuzz = [&](const std::string& which, auto&& parse, const std::vector<std::string>& seeds,
                  const std::vector<std::string>& dict, std::uint64_t seed) {
    testing::Mutator m(seed, seeds, dict);
    int accepted = 0;
    for (int i = 0; i < 10000; ++i) {
      auto input = m.next();
      try {
        if (parse(input)) ++accepted;
      } catch (const Error&) {
      } catch (const std::exception& e) {
        bad.push_back(which + " threw " + e.what());
        return accepted;
      }
    }
    return accepted;
  };
  int acc_san = fuzz(
      "parse_sanitizer_report",
      [](const std::string& s) {
        auto c = parse_sanitizer_report(s);
        return !c.stacktrace.empty() && !c.crash_type.empty();
      },
      testing::sanitizer_seeds(), testing::sanitizer_dictionary(), 0x5eed0001);
  int acc_feas = fuzz(
      "parse_feasibility_output",
      [](const std::string& s) {
        auto v = parse_feasibility_output(s);
        return !v.analysis.empty() && (v.feasible || !v.recommendations.empty());
      },
      testing::feasibility_seeds(), testing::feasibility_dictionary(), 0x5eed0002);
  r.pass = bad.empty();
  r.detail = r.pass ? "fixtures parse; 2x10000 fuzzed inputs survived (" + std::to_string(acc_san) + " / " +
                          std::to_string(acc_feas) + " accepted)"
                    : bad.front();
  return r;
}

// --- 7 ----------------------------------------------------------------------

CheckResult Suite::shared_repository() {
  CheckResult r{7, "shared-repository property", false, false, ""};
  TempDir tmp("crashsift-repo");
  auto result = testing::run_repo_schedules(tmp.path(), 1000, 0xAB5EED);
  r.pass = result.failures.empty() && result.schedules == 1000;
  r.detail = std::to_string(result.schedules) + " schedules, " + std::to_string(result.stages) + " stages, " +
             std::to_string(result.files_checked) + " file checks" +
             (result.failures.empty() ? "" : "; " + result.failures.front());
  return r;
}

// --- 8 ----------------------------------------------------------------------

CheckResult Suite::satisfaction_aggregation() {
  CheckResult r{8, "satisfaction aggregation", false, false, ""};
  std::vector<std::string> bad;
  auto results = testing::published_satisfaction_multiset();
  auto s = aggregate_satisfaction(results);
  if (format_percent(s.pct_all) != "63.1" || format_percent(s.pct_at_least_n_minus_1) != "88.2" ||
      format_percent(s.overall_pct) != "86.9" || !near(s.avg_constraints, 4.25) || s.drivers != 900) {
    bad.push_back("aggregate " + render_satisfaction(s));
  }
  auto mono = testing::monotonicity_trials(1000, 0x7AB1E4);
  if (mono.violations != 0) bad.push_back(std::to_string(mono.violations) + " monotonicity violations");
  r.pass = bad.empty();
  r.detail = r.pass ? "900 drivers -> 63.1/88.2/86.9 (avg 4.25); " + std::to_string(mono.trials) +
                          " flag flips monotone"
                    : bad.front();
  return r;
}

// --- 9 ----------------------------------------------------------------------

CheckResult Suite::live_function_analysis() {
  CheckResult r{9, "live Function Analyzer smoke test", false, false, ""};
  const char* endpoint = std::getenv("CRASHSIFT_LIVE_ENDPOINT");
  const char* model = std::getenv("CRASHSIFT_LIVE_MODEL");
  if (!endpoint || !*endpoint || !model || !*model) {
    r.skipped = true;
    r.detail = "no live endpoint (set CRASHSIFT_LIVE_ENDPOINT, CRASHSIFT_LIVE_MODEL, CRASHSIFT_API_KEY)";
    return r;
  }
  TempDir tmp("crashsift-live");
  auto root = testing::copy_fixture("libraw", tmp / "libraw");
  std::ostringstream out, err;
  int code = cli::run({"index", root.string(), "--name", "libraw", "--language", "c++"}, out, err);
  if (code != 0) {
    r.detail = "index failed: " + err.str();
    return r;
  }
  auto report_path = tmp / "report.xmlish";
  code = cli::run({"analyze-function", "--benchmarks", (root / "benchmark.yaml").string(), "--live-endpoint",
                   endpoint, "--model", model, "--out", report_path.string(), "--output-dir", (tmp / "out").string()},
                  out, err);
  if (code != 0) {
    r.detail = "analyze-function exited " + std::to_string(code) + ": " + err.str();
    return r;
  }
  try {
    auto report = parse_constraint_report(testing::read_text(report_path));
    int variable = 0;
    for (const auto& c : report.constraints) variable += c.category == ConstraintCategory::VariableConstraint ? 1 : 0;
    r.pass = variable >= 1;
    r.detail = std::to_string(report.constraints.size()) + " constraints, " + std::to_string(variable) +
               " VariableConstraint";
  } catch (const std::exception& e) {
    r.detail = e.what();
  }
  return r;
}

std::vector<CheckResult> Suite::run_all() {
  std::vector<CheckResult> out;
  auto guarded = [&](int id, const char* title, CheckResult (Suite::*fn)()) {
    try {
      out.push_back((this->*fn)());
    } catch (const std::exception& e) {
      out.push_back({id, title, false, false, std::string("exception: ") + e.what()});
    }
  };
  guarded(1, "metric reproduction", &Suite::metric_reproduction);
  guarded(2, "end-to-end scripted pipeline", &Suite::scripted_pipeline);
  guarded(3, "constraint wiring A/B", &Suite::constraint_wiring);
  guarded(4, "replay fidelity", &Suite::replay_fidelity);
  guarded(5, "toolbox oracle equivalence and sandbox", &Suite::toolbox_oracle);
  guarded(6, "parser robustness", &Suite::parser_robustness);
  guarded(7, "shared-repository property", &Suite::shared_repository);
  guarded(8, "satisfaction aggregation", &Suite::satisfaction_aggregation);
  guarded(9, "live Function Analyzer smoke test", &Suite::live_function_analysis);
  return out;
}

std::string format_line(const CheckResult& r) {
  std::string status = r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL");
  return status + " criterion " + std::to_string(r.id) + " (" + r.title + "): " + r.detail;
}

}  // namespace crashsift::acceptance
