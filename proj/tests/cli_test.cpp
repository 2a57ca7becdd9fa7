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


#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "crashsift/agents.hpp"
#include "crashsift/analyzers.hpp"
#include "crashsift/backends.hpp"
#include "crashsift/bundle.hpp"
#include "crashsift/crash.hpp"
#include "crashsift/pipeline.hpp"
#include "crashsift/replay.hpp"
#include "support.hpp"

namespace crashsift {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

constexpr const char* kBm = "imgdec-decode-plane";

// A copy of the pipeline fixture with one benchmark and an indexed checkout.
struct Workspace {
  TempDir tmp;
  fs::path dir = testing::copy_fixture("pipeline", tmp / "pipeline");
  std::string benchmarks = (dir / "benchmarks.yaml").string();
  fs::path scripts = dir / "scripts" / kBm;

  Result index() { return run({"index", (dir / "imgdec").string()}); }
  std::vector<std::string> bench_args() const { return {"--benchmarks", benchmarks, "--id", kBm}; }
};

TEST(Cli, ExitCodeMapping) {
  EXPECT_EQ(cli::exit_code_for(ErrorKind::InvalidConfig), cli::kExitUsage);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::SpecMismatch), cli::kExitUsage);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::ParseError), cli::kExitParse);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::IOFailure), cli::kExitParse);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::NotFound), cli::kExitParse);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::MalformedOutput), cli::kExitParse);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::ToolBudgetExhausted), cli::kExitAgent);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::BackendUnavailable), cli::kExitAgent);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::BuildFailure), cli::kExitAgent);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"index"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST(Cli, IndexTinyProject) {
  TempDir tmp;
  auto dir = testing::copy_fixture("tiny", tmp / "tiny");
  auto r = run({"index", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "3 functions, 2 edges, 1 entry point\n");
  EXPECT_EQ(run({"index", (tmp / "missing").string()}).code, cli::kExitParse);
}

TEST(Cli, AnalyzeFunctionNeedsAnIndex) {
  Workspace w;
  auto args = w.bench_args();
  args.insert(args.begin(), "analyze-function");
  args.insert(args.end(), {"--scripted", (w.scripts / "function-analyzer.bundle.json").string()});
  auto r = run(args);
  EXPECT_EQ(r.code, cli::kExitParse);
  EXPECT_NE(r.err.find("NotFound"), std::string::npos) << r.err;

  ASSERT_EQ(w.index().code, 0);
  args.insert(args.end(), {"--output-dir", (w.tmp / "out").string()});
  r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("constraints ("), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(w.tmp / "out/bundles" / kBm / "standalone/0/function-analyzer.bundle.json"));

  // Replaying the captured session twice gives the same answer.
  auto replay = run({"replay", (w.tmp / "out/bundles" / kBm / "standalone/0/function-analyzer.bundle.json").string(),
                     "--times", "2"});
  EXPECT_EQ(replay.code, 0) << replay.err;
  EXPECT_NE(replay.out.find("outcome=Completed"), std::string::npos) << replay.out;
  EXPECT_NE(replay.out.find("consistent\n"), std::string::npos) << replay.out;
  EXPECT_EQ(replay.out.find("inconsistent"), std::string::npos);
}

TEST(Cli, AnalyzeFunctionWithUnparseableAnswer) {
  Workspace w;
  ASSERT_EQ(w.index().code, 0);
  SessionBundle b;
  b.meta.agent = "function-analyzer";
  b.final_output = "no sections here";
  save_bundle(b, w.tmp / "bad.bundle.json");
  auto args = w.bench_args();
  args.insert(args.begin(), "analyze-function");
  args.insert(args.end(), {"--scripted", (w.tmp / "bad.bundle.json").string(), "--output-dir", (w.tmp / "o").string()});
  auto r = run(args);
  EXPECT_EQ(r.code, cli::kExitAgent) << r.err;  // the single response runs out before the reprompt
}

TEST(Cli, ValidateCrash) {
  Workspace w;
  ASSERT_EQ(w.index().code, 0);
  CrashReport crash = parse_sanitizer_report(testing::read_text(w.dir / "logs/decode-plane-tp.log"));
  crash.classification = CrashClassification::FuzzDriverError;
  testing::write_text(w.tmp / "driver-error.json", to_json(crash).dump());
  crash.classification = CrashClassification::ProgramError;
  testing::write_text(w.tmp / "program-error.json", to_json(crash).dump());

  auto base = w.bench_args();
  base.insert(base.begin(), "validate-crash");
  base.insert(base.end(), {"--scripted", (w.scripts / "t01/1/crash-validator.bundle.json").string(),
                           "--output-dir", (w.tmp / "out").string()});
  auto with = [&](const std::string& crash_file) {
    auto a = base;
    a.insert(a.end(), {"--crash", (w.tmp / crash_file).string()});
    return run(a);
  };
  auto refused = with("driver-error.json");
  EXPECT_EQ(refused.code, cli::kExitUsage);
  EXPECT_NE(refused.err.find("FuzzDriverError"), std::string::npos) << refused.err;
  auto ok = with("program-error.json");
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.out, "feasible=true\n");
  EXPECT_TRUE(fs::exists(w.tmp / "out/crashes/program-error/verdict.xmlish"));
  testing::write_text(w.tmp / "garbled.json", "{not json");
  EXPECT_EQ(with("garbled.json").code, cli::kExitParse);
}

TEST(Cli, RunAndReport) {
  Workspace w;
  auto out = w.tmp / "run-out";
  auto r = run({"run", (w.dir / "run.yaml").string(), "--n-trials", "2", "--output-dir", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("4 trials over 2 benchmarks: CoveragePlateau=2 TruePositive=2"), std::string::npos) << r.out;
  for (const char* f : {"report.txt", "sets.csv", "costs.csv"}) EXPECT_TRUE(fs::exists(out / "report" / f)) << f;

  auto rep = run({"report", "--results", (out / "results").string(), "--label", "fc", "--prices",
                  (w.dir / "prices.yaml").string(), "--out-dir", (w.tmp / "rep").string()});
  EXPECT_EQ(rep.code, 0) << rep.err;
  EXPECT_EQ(testing::read_text(w.tmp / "rep/costs.csv"), testing::read_text(out / "report/costs.csv"));
  EXPECT_EQ(run({"report", "--results", (w.tmp / "nothing").string()}).code, cli::kExitParse);
  EXPECT_EQ(run({"report", "--results", (out / "results").string(), "--label", "a", "--label", "b"}).code,
            cli::kExitUsage);
}

TEST(Cli, RunRejectsBadConfig) {
  TempDir tmp;
  testing::write_text(tmp / "run.yaml", "benchmarks: b.yaml\nbackend: {scripted: s}\nn_trials: 0\n");
  auto r = run({"run", (tmp / "run.yaml").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("InvalidConfig"), std::string::npos) << r.err;
  testing::write_text(tmp / "broken.yaml", "benchmarks: [\n");
  EXPECT_NE(run({"run", (tmp / "broken.yaml").string()}).code, 0);
  EXPECT_EQ(run({"run", (tmp / "run.yaml").string(), "--constraints", "maybe"}).code, cli::kExitUsage);
}

TEST(Cli, IndexEmptyProjectAndDeterminism) {
  TempDir tmp;
  fs::create_directories(tmp / "empty");
  auto r = run({"index", (tmp / "empty").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("EmptyProject"), std::string::npos) << r.err;

  auto dir = testing::copy_fixture("libraw", tmp / "libraw");
  ASSERT_EQ(run({"index", dir.string(), "--language", "c++"}).code, 0);
  ProjectCheckout checkout("libraw", dir, Language::CPlusPlus);
  const auto first = testing::read_text(checkout.index_path());
  ASSERT_EQ(run({"index", dir.string(), "--language", "c++"}).code, 0);
  EXPECT_EQ(testing::read_text(checkout.index_path()), first);
}

// The libraw fixture, indexed, with standalone bundles written next to it.
struct LibrawWorkspace {
  TempDir tmp;
  fs::path dir = testing::copy_fixture("libraw", tmp / "libraw");
  std::string benchmarks = (dir / "benchmark.yaml").string();

  LibrawWorkspace() { EXPECT_EQ(run({"index", dir.string(), "--language", "c++"}).code, 0); }

  fs::path answer(const std::string& name, const std::string& agent, const std::string& final_output) {
    SessionBundle b;
    b.meta.agent = agent;
    b.final_output = final_output;
    b.outcome = SessionOutcome::Completed;
    auto path = tmp / (name + ".bundle.json");
    save_bundle(b, path);
    return path;
  }
  fs::path program_error_crash() {
    auto crash = parse_sanitizer_report(testing::read_text(testing::fixture_path("parsers/asan_hbo.log")));
    crash.classification = CrashClassification::ProgramError;
    testing::write_text(tmp / "crash.json", to_json(crash).dump(2));
    return tmp / "crash.json";
  }
};

const char* kCrxReport =
    "<description>Decodes one plane of a CRX image.</description>\n"
    "<constraint category=\"VariableConstraint\"><statement>The first argument must be a valid pointer to a "
    "'CrxImage' structure.</statement><rationale>p is cast and dereferenced without checks</rationale>"
    "<symbols>p, CrxImage</symbols></constraint>\n"
    "<constraint category=\"SetupTeardown\"><statement>The 'crxSetupImageData' function must be called before "
    "calling 'crxDecodePlane'.</statement><rationale>it initializes the image</rationale>"
    "<symbols>crxSetupImageData</symbols></constraint>";

TEST(Cli, AnalyzeFunctionOnTheCrxFixture) {
  LibrawWorkspace w;
  auto bundle = w.answer("fa", kFunctionAnalyzer, kCrxReport);
  auto dest = w.tmp / "crx.xmlish";
  auto r = run({"analyze-function", "--benchmarks", w.benchmarks, "--scripted", bundle.string(), "--out",
                dest.string(), "--output-dir", (w.tmp / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "2 constraints (1 SetupTeardown, 1 VariableConstraint) -> " + dest.string() + "\n");
  auto report = parse_constraint_report(testing::read_text(dest));
  EXPECT_NE(report.constraints.at(0).statement.find("valid pointer to a 'CrxImage'"), std::string::npos);
}

TEST(Cli, AnalyzeFunctionBudgetExhaustion) {
  LibrawWorkspace w;
  // A model that never stops calling tools.
  struct Echo : ToolRunner {
    std::string run(const ToolDirective&) override { return "ok"; }
  } echo;
  ScriptedBackend endless(std::vector<std::string>(40, "<tool name=\"entry_points\"></tool>"));
  BenchmarkFunction fn;
  fn.project_name = "libraw";
  fn.function_signature = "int LibRaw::crxDecodePlane(void *p, uint32_t planeNumber)";
  fn.source_code = "int x;";
  auto session = run_function_analyzer(fn, endless, echo).session;
  ASSERT_EQ(session.outcome, SessionOutcome::ToolBudgetExhausted);
  save_bundle(make_bundle(session, {}), w.tmp / "endless.bundle.json");

  auto out = w.tmp / "out";
  auto r = run({"analyze-function", "--benchmarks", w.benchmarks, "--scripted",
                (w.tmp / "endless.bundle.json").string(), "--output-dir", out.string()});
  EXPECT_EQ(r.code, cli::kExitAgent) << r.err;
  auto captured = load_bundle(out / "bundles/libraw-crxdecodeplane/standalone/0/function-analyzer.bundle.json");
  EXPECT_EQ(captured.outcome, SessionOutcome::ToolBudgetExhausted);
  EXPECT_FALSE(captured.turns.empty());
}

TEST(Cli, ValidateInfeasibleCrashAndReplayVariants) {
  LibrawWorkspace w;
  const auto verdict_text = testing::read_text(testing::fixture_path("parsers/infeasible_verdict.txt"));
  auto infeasible = w.answer("f", kCrashValidator, verdict_text);
  auto out = w.tmp / "out";
  auto r = run({"validate-crash", "--benchmarks", w.benchmarks, "--scripted", infeasible.string(), "--crash",
                w.program_error_crash().string(), "--output-dir", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "feasible=false\n");

  auto captured = out / "bundles/libraw-crxdecodeplane/standalone/0/crash-validator.bundle.json";
  auto feasible = w.answer("t", kCrashValidator, "<feasible>True</feasible><analysis>reachable</analysis>");
  auto variants = run({"replay", captured.string(), "--times", "3", "--variant", infeasible.string(), "--variant",
                       feasible.string()});
  EXPECT_EQ(variants.code, 0) << variants.err;
  EXPECT_EQ(variants.out,
            "run 1: outcome=Completed feasible=false\nrun 2: outcome=Completed feasible=true\n"
            "run 3: outcome=Completed feasible=false\ninconsistent\n");
  auto same = run({"replay", captured.string(), "--times", "3"});
  EXPECT_EQ(same.out, "run 1: outcome=Completed feasible=false\nrun 2: outcome=Completed feasible=false\n"
                      "run 3: outcome=Completed feasible=false\nconsistent\n");
  auto once = run({"replay", captured.string()});
  EXPECT_EQ(once.out, "run 1: outcome=Completed feasible=false\n");
  // Replaying as a different agent is refused.
  EXPECT_EQ(run({"replay", captured.string(), "--agent", kFunctionAnalyzer}).code, cli::kExitUsage);
}

// Kills the real binary at several points of a run; whatever it managed to
// write must parse.
TEST(Cli, InterruptedRunLeavesReadableResults) {
  Workspace w;
  int checked = 0;
  for (const char* delay : {"0.05", "0.15", "0.3", "0.6"}) {
    auto out = w.tmp / (std::string("killed-") + delay);
    const std::string cmd = std::string("timeout -s KILL ") + delay + " '" + CRASHSIFT_TOOL + "' run '" +
                            (w.dir / "run.yaml").string() + "' --output-dir '" + out.string() +
                            "' >/dev/null 2>&1";
    [[maybe_unused]] const int rc = std::system(cmd.c_str());  // killed or finished
    if (!fs::exists(out / "results")) continue;
    for (const auto& e : fs::recursive_directory_iterator(out)) {
      const auto name = e.path().filename().string();
      if (name == "state.json") {
        EXPECT_NO_THROW(trial_state_from_json(nlohmann::ordered_json::parse(testing::read_text(e.path()))))
            << e.path();
        ++checked;
      } else if (e.path().extension() == ".json" && name.find(".bundle.") != std::string::npos) {
        EXPECT_NO_THROW(load_bundle(e.path())) << e.path();
      }
    }
  }
  EXPECT_GT(checked, 0);
}

}  // namespace
}  // namespace crashsift
