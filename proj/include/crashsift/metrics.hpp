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

// Evaluation arithmetic: crash and coverage deltas, false-positive filter
// rates, constraint satisfaction, repeated-run consistency, prompt-variant
// comparison and token cost. Percentages are computed from integer ratios and
// rounded half away from zero to one decimal; money is integer micro-dollars.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crashsift/agent.hpp"
#include "crashsift/analyzers.hpp"
#include "crashsift/executor.hpp"

namespace crashsift {

struct TrialState;

// round(100 * num / den, 1), exact. den must be > 0.
double percent_of(std::int64_t num, std::int64_t den);
// "2.6", "-0.5", "100.0".
std::string format_percent(double pct);

// 100 * (before - after) / before. Throws InvalidBaseline when before <= 0.
double percent_reduction(std::int64_t before, std::int64_t after);
// 100 * filtered / program_error_crashes. Throws InvalidBaseline unless
// program_error_crashes > 0 and 0 <= filtered <= program_error_crashes.
double fp_filter_rate(std::int64_t program_error_crashes, std::int64_t filtered);

// --- constraint satisfaction -------------------------------------------------

struct SatisfactionResult {
  std::string driver_id;
  int n_constraints = 0;
  std::vector<bool> satisfied_flags;  // size n_constraints
  // Constraints the judge could not decide; their flag is false.
  int unknown = 0;
};

// nullopt when the judge cannot decide.
using ConstraintJudge = std::function<std::optional<bool>(const FuzzDriver&, const FunctionConstraint&)>;

// Throws PreconditionViolation when the report has no constraints.
SatisfactionResult score_constraint_satisfaction(const std::string& driver_id, const FuzzDriver& driver,
                                                 const ConstraintReport& report, const ConstraintJudge& judge);

// A textual check attached to one constraint statement.
struct JudgeRule {
  std::vector<std::string> contains;  // all must occur in the driver
  std::vector<std::string> absent;    // none may occur
  // Every ConsumeIntegralInRange<...>(lo, hi) in the driver must stay within.
  std::optional<std::pair<long long, long long>> range_within;
};

// Decides constraints by exact statement lookup; statements without a rule
// are unknown.
class RuleJudge {
 public:
  RuleJudge() = default;
  explicit RuleJudge(std::map<std::string, JudgeRule> rules) : rules_(std::move(rules)) {}

  // YAML list of {statement, contains: [..], absent: [..], range: [lo, hi]}.
  // Throws InvalidConfig.
  static RuleJudge from_yaml(const std::string& text);

  void add(const std::string& statement, JudgeRule rule) { rules_[statement] = std::move(rule); }
  std::optional<bool> operator()(const FuzzDriver& driver, const FunctionConstraint& c) const;

 private:
  std::map<std::string, JudgeRule> rules_;
};

struct SatisfactionSummary {
  int drivers = 0;
  double pct_all = 0;
  double pct_at_least_n_minus_1 = 0;
  // Satisfied flags over all flags (flag-weighted, not a mean of per-driver
  // shares).
  double overall_pct = 0;
  double avg_constraints = 0;
  int unknown = 0;
};

// Throws PreconditionViolation on an empty list or a result whose flags do
// not match n_constraints.
SatisfactionSummary aggregate_satisfaction(const std::vector<SatisfactionResult>& results);
std::string render_satisfaction(const SatisfactionSummary& s);

// --- repeated-run consistency -----------------------------------------------

struct ConsistencyStats {
  int crashes = 0;
  int consistent = 0;
  int consistent_fp = 0;  // all runs: infeasible
  int consistent_tp = 0;  // all runs: feasible
  // Consistent crashes with no verdict (every run failed alike); reported
  // rather than folded into either side.
  int remainder = 0;
  double consistent_pct = 0;
  double consistent_fp_pct = 0;
  double consistent_tp_pct = 0;
};

// One inner list per crash, one entry per run; nullopt is a failed run. A
// crash is consistent when all its runs are equal. Throws
// PreconditionViolation when a crash has fewer than two runs.
ConsistencyStats consistency_stats(const std::vector<std::vector<std::optional<bool>>>& runs_per_crash);

// --- prompt variants -------------------------------------------------------

struct VariantSession {
  std::string crash_id;
  std::optional<bool> feasible;
  std::uint64_t output_tokens = 0;
  int tool_calls = 0;
};

// Verdict parsed from the session's final output (absent when the session did
// not complete or the output does not parse), output tokens per record_usage.
VariantSession summarize_variant_session(const std::string& crash_id, const AgentSession& session);

struct VariantComparison {
  int pairs = 0;
  double divergence_pct = 0;
  double avg_output_tokens_a = 0;
  double avg_output_tokens_b = 0;
  double avg_tool_calls_a = 0;
  double avg_tool_calls_b = 0;
};

// Pairs are matched by position and must share crash_id. Throws PairMismatch
// on differing lengths, differing ids or empty input.
VariantComparison prompt_variant_compare(const std::vector<VariantSession>& a,
                                         const std::vector<VariantSession>& b);

// --- cost ------------------------------------------------------------------

enum class ToolPricing { Input, Output };

struct PriceTable {
  // Micro-dollars per million tokens (i.e. dollars per token).
  std::int64_t input_per_mtok_micros = 1'250'000;
  std::int64_t output_per_mtok_micros = 10'000'000;
  ToolPricing tool_as = ToolPricing::Input;
};

// {input_per_mtok, output_per_mtok, tool_as: input|output}, prices in
// dollars. Throws InvalidConfig on negative prices or unknown keys' values.
PriceTable parse_prices(const std::string& yaml_text);
PriceTable load_prices(const std::filesystem::path& path);

struct CostRecord {
  std::string agent;
  std::int64_t input_micros = 0;
  std::int64_t tool_micros = 0;
  std::int64_t output_micros = 0;
  std::int64_t total_micros = 0;

  bool operator==(const CostRecord&) const = default;
};

// Each component is rounded to the nearest micro-dollar; total is their sum.
CostRecord compute_cost(const std::string& agent, const TokenUsage& usage, const PriceTable& prices);
// Component-wise sum.
CostRecord sum_costs(const std::string& label, const std::vector<CostRecord>& rows);
// Per-driver averages in three rows: "Function Analyzer" (function analysis
// usage spread over all trials), "Crash Validation" and "Existing agents".
// Throws PreconditionViolation when there are no trials.
std::vector<CostRecord> per_driver_costs(const std::vector<TrialState>& trials,
                                         const TokenUsage& function_analysis, const PriceTable& prices);
// "$0.024" (3 decimals, half up) and "0.024000" (exact).
std::string format_dollars(std::int64_t micros);
std::string format_dollars_exact(std::int64_t micros);

// --- reports ---------------------------------------------------------------

struct SetSummary {
  std::string set;
  int benchmarks = 0;
  std::int64_t crashes = 0;
  std::int64_t false_positives = 0;
  double coverage = 0;  // fraction
};

struct ConfigurationSummary {
  std::string name;
  std::vector<SetSummary> sets;
};

// One configuration's row from finished trials: a crash is a false positive
// when it was classified as a driver error or judged infeasible; coverage is
// the mean of each trial's last recorded coverage.
SetSummary summarize_trials(const std::string& set, int benchmarks, const std::vector<TrialState>& trials);

struct RenderedReport {
  std::string text;
  std::string sets_csv;
  std::string costs_csv;
};

// Per-set rows across configurations (the first is the baseline for
// "% diff") plus cost rows and their sum. Set rows are matched by name;
// configurations missing a set leave its cells empty.
//
// sets_csv columns: set, benchmarks, then per configuration <c>_crashes,
// <c>_false_positives, then <c>_pct_diff for every configuration after the
// first, then <c>_coverage_pct; <c> is the configuration name slugged.
// costs_csv columns: agent, input_usd, tool_usd, output_usd, total_usd.
RenderedReport report_tables(const std::vector<ConfigurationSummary>& configs,
                             const std::vector<CostRecord>& costs);

// RFC 4180-style CSV reader for the files above.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace crashsift
