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

#include "crashsift/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "crashsift/agents.hpp"
#include "crashsift/error.hpp"
#include "crashsift/pipeline.hpp"
#include "crashsift/util.hpp"

namespace crashsift {
namespace {

// round(num / den) half away from zero; den > 0.
std::int64_t div_round(std::int64_t num, std::int64_t den) {
  const bool neg = num < 0;
  const auto a = static_cast<unsigned __int128>(neg ? -static_cast<__int128>(num) : num);
  const auto d = static_cast<unsigned __int128>(den);
  const auto q = static_cast<std::int64_t>((2 * a + d) / (2 * d));
  return neg ? -q : q;
}

std::string tenths_text(std::int64_t t) {
  const bool neg = t < 0;
  const std::int64_t a = neg ? -t : t;
  return (neg ? "-" : "") + std::to_string(a / 10) + "." + std::to_string(a % 10);
}

std::string column_slug(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!out.empty() && out.back() != '_') {
      out.push_back('_');
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "config" : out;
}

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

std::string csv_line(const std::vector<std::string>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ",";
    out += csv_field(row[i]);
  }
  return out + "\n";
}

std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::string line;
    for (std::size_t i = 0; i < rows[k].size(); ++i) {
      if (i) line += "  ";
      line += rows[k][i];
      if (i + 1 < rows[k].size()) line.append(width[i] - rows[k][i].size(), ' ');
    }
    out += line + "\n";
    if (k == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out += std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') + "\n";
    }
  }
  return out;
}

std::string coverage_text(double fraction) { return tenths_text(std::llround(fraction * 1000.0)); }

}  // namespace

double percent_of(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw Error(ErrorKind::InvalidBaseline, "denominator must be positive");
  return static_cast<double>(div_round(num * 1000, den)) / 10.0;
}

std::string format_percent(double pct) { return tenths_text(std::llround(pct * 10.0)); }

double percent_reduction(std::int64_t before, std::int64_t after) {
  if (before <= 0) throw Error(ErrorKind::InvalidBaseline, "baseline count must be positive");
  return percent_of(before - after, before);
}

double fp_filter_rate(std::int64_t program_error_crashes, std::int64_t filtered) {
  if (program_error_crashes <= 0) {
    throw Error(ErrorKind::InvalidBaseline, "no program-error crashes to filter");
  }
  if (filtered < 0 || filtered > program_error_crashes) {
    throw Error(ErrorKind::InvalidBaseline, "filtered count outside [0, program-error crashes]");
  }
  return percent_of(filtered, program_error_crashes);
}

// --- constraint satisfaction -------------------------------------------------

SatisfactionResult score_constraint_satisfaction(const std::string& driver_id, const FuzzDriver& driver,
                                                 const ConstraintReport& report, const ConstraintJudge& judge) {
  if (report.constraints.empty()) {
    throw Error(ErrorKind::PreconditionViolation, "constraint report for " + driver_id + " is empty");
  }
  SatisfactionResult r;
  r.driver_id = driver_id;
  r.n_constraints = static_cast<int>(report.constraints.size());
  for (const auto& c : report.constraints) {
    std::optional<bool> v;
    try {
      v = judge(driver, c);
    } catch (const std::exception&) {
      v.reset();
    }
    if (!v) ++r.unknown;
    r.satisfied_flags.push_back(v.value_or(false));
  }
  return r;
}

RuleJudge RuleJudge::from_yaml(const std::string& text) {
  RuleJudge judge;
  try {
    const YAML::Node doc = YAML::Load(text);
    if (!doc.IsSequence()) throw Error(ErrorKind::InvalidConfig, "judge rules: expected a list");
    for (const auto& n : doc) {
      if (!n["statement"]) throw Error(ErrorKind::InvalidConfig, "judge rule without 'statement'");
      JudgeRule rule;
      if (n["contains"]) rule.contains = n["contains"].as<std::vector<std::string>>();
      if (n["absent"]) rule.absent = n["absent"].as<std::vector<std::string>>();
      if (n["range"]) {
        auto r = n["range"].as<std::vector<long long>>();
        if (r.size() != 2 || r[0] > r[1]) throw Error(ErrorKind::InvalidConfig, "judge rule range must be [lo, hi]");
        rule.range_within = std::make_pair(r[0], r[1]);
      }
      judge.add(normalize_whitespace(n["statement"].as<std::string>()), std::move(rule));
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("judge rules: ") + e.what());
  }
  return judge;
}

std::optional<bool> RuleJudge::operator()(const FuzzDriver& driver, const FunctionConstraint& c) const {
  const auto it = rules_.find(normalize_whitespace(c.statement));
  if (it == rules_.end()) return std::nullopt;
  const JudgeRule& rule = it->second;
  const std::string& src = driver.source;
  for (const auto& s : rule.contains) {
    if (src.find(s) == std::string::npos) return false;
  }
  for (const auto& s : rule.absent) {
    if (src.find(s) != std::string::npos) return false;
  }
  if (rule.range_within) {
    static const std::regex kRange(R"(ConsumeIntegralInRange\s*<[^>]*>\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\))");
    bool any = false;
    for (auto m = std::sregex_iterator(src.begin(), src.end(), kRange); m != std::sregex_iterator(); ++m) {
      any = true;
      const long long lo = std::stoll((*m)[1].str());
      const long long hi = std::stoll((*m)[2].str());
      if (lo < rule.range_within->first || hi > rule.range_within->second) return false;
    }
    if (!any) return false;
  }
  return true;
}

SatisfactionSummary aggregate_satisfaction(const std::vector<SatisfactionResult>& results) {
  if (results.empty()) throw Error(ErrorKind::PreconditionViolation, "no satisfaction results");
  std::int64_t all = 0, near = 0, flags = 0, satisfied = 0;
  SatisfactionSummary s;
  for (const auto& r : results) {
    if (r.n_constraints < 1 || static_cast<int>(r.satisfied_flags.size()) != r.n_constraints) {
      throw Error(ErrorKind::PreconditionViolation, r.driver_id + ": flag count does not match n_constraints");
    }
    const auto t = std::count(r.satisfied_flags.begin(), r.satisfied_flags.end(), true);
    if (t == r.n_constraints) ++all;
    if (t >= r.n_constraints - 1) ++near;
    flags += r.n_constraints;
    satisfied += t;
    s.unknown += r.unknown;
  }
  const auto n = static_cast<std::int64_t>(results.size());
  s.drivers = static_cast<int>(n);
  s.pct_all = percent_of(all, n);
  s.pct_at_least_n_minus_1 = percent_of(near, n);
  s.overall_pct = percent_of(satisfied, flags);
  s.avg_constraints = static_cast<double>(flags) / static_cast<double>(n);
  return s;
}

std::string render_satisfaction(const SatisfactionSummary& s) {
  char avg[32];
  std::snprintf(avg, sizeof avg, "%.2f", s.avg_constraints);
  std::vector<std::vector<std::string>> rows = {
      {"Metric", "Value"},
      {"# Fuzz drivers analyzed", std::to_string(s.drivers)},
      {"Avg constraints per driver", avg},
      {"% satisfying all constraints", format_percent(s.pct_all) + "%"},
      {"% satisfying >= (n-1) constraints", format_percent(s.pct_at_least_n_minus_1) + "%"},
      {"Overall constraint satisfaction", format_percent(s.overall_pct) + "%"},
      {"Unknown (judge failed)", std::to_string(s.unknown)},
  };
  return aligned(rows) + "Overall = satisfied constraints / all constraints; unknown verdicts count as unsatisfied.\n";
}

// --- consistency -------------------------------------------------------------

ConsistencyStats consistency_stats(const std::vector<std::vector<std::optional<bool>>>& runs_per_crash) {
  ConsistencyStats s;
  for (const auto& runs : runs_per_crash) {
    if (runs.size() < 2) throw Error(ErrorKind::PreconditionViolation, "each crash needs at least two runs");
    ++s.crashes;
    if (!std::all_of(runs.begin(), runs.end(), [&](const auto& v) { return v == runs.front(); })) continue;
    ++s.consistent;
    if (!runs.front()) ++s.remainder;
    else if (*runs.front()) ++s.consistent_tp;
    else ++s.consistent_fp;
  }
  if (s.crashes > 0) {
    s.consistent_pct = percent_of(s.consistent, s.crashes);
    s.consistent_fp_pct = percent_of(s.consistent_fp, s.crashes);
    s.consistent_tp_pct = percent_of(s.consistent_tp, s.crashes);
  }
  return s;
}

// --- prompt variants -----------------------------------------------------------

VariantSession summarize_variant_session(const std::string& crash_id, const AgentSession& session) {
  VariantSession v;
  v.crash_id = crash_id;
  v.output_tokens = record_usage(session).output;
  v.tool_calls = session.tool_call_count();
  if (session.completed()) {
    try {
      v.feasible = parse_feasibility_output(session.final_output).feasible;
    } catch (const Error&) {
    }
  }
  return v;
}

VariantComparison prompt_variant_compare(const std::vector<VariantSession>& a,
                                         const std::vector<VariantSession>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::PairMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " sessions");
  }
  if (a.empty()) throw Error(ErrorKind::PairMismatch, "no session pairs");
  VariantComparison c;
  std::int64_t diverged = 0;
  std::uint64_t ta = 0, tb = 0;
  std::int64_t ca = 0, cb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].crash_id != b[i].crash_id) {
      throw Error(ErrorKind::PairMismatch, "pair " + std::to_string(i) + ": " + a[i].crash_id + " vs " + b[i].crash_id);
    }
    if (a[i].feasible != b[i].feasible) ++diverged;
    ta += a[i].output_tokens;
    tb += b[i].output_tokens;
    ca += a[i].tool_calls;
    cb += b[i].tool_calls;
  }
  const auto n = static_cast<double>(a.size());
  c.pairs = static_cast<int>(a.size());
  c.divergence_pct = percent_of(diverged, static_cast<std::int64_t>(a.size()));
  c.avg_output_tokens_a = static_cast<double>(ta) / n;
  c.avg_output_tokens_b = static_cast<double>(tb) / n;
  c.avg_tool_calls_a = static_cast<double>(ca) / n;
  c.avg_tool_calls_b = static_cast<double>(cb) / n;
  return c;
}

// --- cost --------------------------------------------------------------------

PriceTable parse_prices(const std::string& yaml_text) {
  PriceTable p;
  try {
    const YAML::Node doc = YAML::Load(yaml_text);
    if (!doc.IsMap()) throw Error(ErrorKind::InvalidConfig, "prices: expected a mapping");
    auto micros = [&](const char* key, std::int64_t& out) {
      if (!doc[key]) return;
      const double d = doc[key].as<double>();
      if (!(d >= 0) || !std::isfinite(d)) throw Error(ErrorKind::InvalidConfig, std::string("prices: ") + key + " must be >= 0");
      out = std::llround(d * 1e6);
    };
    micros("input_per_mtok", p.input_per_mtok_micros);
    micros("output_per_mtok", p.output_per_mtok_micros);
    if (doc["tool_as"]) {
      const std::string t = doc["tool_as"].as<std::string>();
      if (t == "input") p.tool_as = ToolPricing::Input;
      else if (t == "output") p.tool_as = ToolPricing::Output;
      else throw Error(ErrorKind::InvalidConfig, "prices: tool_as must be 'input' or 'output'");
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("prices: ") + e.what());
  }
  return p;
}

PriceTable load_prices(const std::filesystem::path& path) { return parse_prices(read_file(path)); }

namespace {
std::int64_t token_cost(std::uint64_t tokens, std::int64_t per_mtok_micros) {
  const auto num = static_cast<unsigned __int128>(tokens) * static_cast<unsigned __int128>(per_mtok_micros);
  return static_cast<std::int64_t>((num + 500'000) / 1'000'000);
}
}  // namespace

CostRecord compute_cost(const std::string& agent, const TokenUsage& usage, const PriceTable& prices) {
  CostRecord c;
  c.agent = agent;
  c.input_micros = token_cost(usage.input, prices.input_per_mtok_micros);
  c.tool_micros = token_cost(usage.tool, prices.tool_as == ToolPricing::Input ? prices.input_per_mtok_micros
                                                                               : prices.output_per_mtok_micros);
  c.output_micros = token_cost(usage.output, prices.output_per_mtok_micros);
  c.total_micros = c.input_micros + c.tool_micros + c.output_micros;
  return c;
}

CostRecord sum_costs(const std::string& label, const std::vector<CostRecord>& rows) {
  CostRecord s;
  s.agent = label;
  for (const auto& r : rows) {
    s.input_micros += r.input_micros;
    s.tool_micros += r.tool_micros;
    s.output_micros += r.output_micros;
    s.total_micros += r.total_micros;
  }
  return s;
}

std::vector<CostRecord> per_driver_costs(const std::vector<TrialState>& trials,
                                         const TokenUsage& function_analysis, const PriceTable& prices) {
  if (trials.empty()) throw Error(ErrorKind::PreconditionViolation, "no trials to average over");
  TokenUsage validation, existing;
  for (const auto& t : trials) {
    for (const auto& [agent, u] : t.usage_by_agent) {
      if (agent.rfind(kCrashValidator, 0) == 0) validation += u;
      else if (agent.rfind(kFunctionAnalyzer, 0) == 0) continue;
      else existing += u;
    }
  }
  const auto n = static_cast<std::int64_t>(trials.size());
  auto per_driver = [&](const std::string& label, const TokenUsage& u) {
    CostRecord c = compute_cost(label, u, prices);
    c.input_micros = div_round(c.input_micros, n);
    c.tool_micros = div_round(c.tool_micros, n);
    c.output_micros = div_round(c.output_micros, n);
    c.total_micros = c.input_micros + c.tool_micros + c.output_micros;
    return c;
  };
  return {per_driver("Function Analyzer", function_analysis), per_driver("Crash Validation", validation),
          per_driver("Existing agents", existing)};
}

std::string format_dollars(std::int64_t micros) {
  const bool neg = micros < 0;
  const std::int64_t milli = div_round(neg ? -micros : micros, 1000);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s$%lld.%03lld", neg ? "-" : "", static_cast<long long>(milli / 1000),
                static_cast<long long>(milli % 1000));
  return buf;
}

std::string format_dollars_exact(std::int64_t micros) {
  const bool neg = micros < 0;
  const std::int64_t a = neg ? -micros : micros;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%06lld", neg ? "-" : "", static_cast<long long>(a / 1'000'000),
                static_cast<long long>(a % 1'000'000));
  return buf;
}

// --- reports -------------------------------------------------------------------

SetSummary summarize_trials(const std::string& set, int benchmarks, const std::vector<TrialState>& trials) {
  SetSummary s;
  s.set = set;
  s.benchmarks = benchmarks;
  double cov = 0;
  int with_cov = 0;
  for (const auto& t : trials) {
    for (const auto& c : t.crash_history) {
      ++s.crashes;
      const bool fp = c.crash.classification == CrashClassification::FuzzDriverError ||
                      (c.verdict && !c.verdict->feasible);
      if (fp) ++s.false_positives;
    }
    if (!t.coverage_history.empty()) {
      cov += t.coverage_history.back();
      ++with_cov;
    }
  }
  s.coverage = with_cov ? cov / with_cov : 0.0;
  return s;
}

RenderedReport report_tables(const std::vector<ConfigurationSummary>& configs,
                             const std::vector<CostRecord>& costs) {
  RenderedReport out;

  // Set names in first-seen order.
  std::vector<std::string> sets;
  std::set<std::string> seen;
  for (const auto& c : configs) {
    for (const auto& s : c.sets) {
      if (seen.insert(s.set).second) sets.push_back(s.set);
    }
  }
  auto find = [](const ConfigurationSummary& c, const std::string& name) -> const SetSummary* {
    for (const auto& s : c.sets) {
      if (s.set == name) return &s;
    }
    return nullptr;
  };

  std::vector<std::string> csv_head = {"set", "benchmarks"};
  std::vector<std::string> text_head = {"Set", "# Bm"};
  for (const auto& c : configs) {
    const std::string k = column_slug(c.name);
    csv_head.push_back(k + "_crashes");
    csv_head.push_back(k + "_false_positives");
    text_head.push_back("Crashes (FP) " + c.name);
  }
  for (std::size_t i = 1; i < configs.size(); ++i) {
    csv_head.push_back(column_slug(configs[i].name) + "_pct_diff");
    text_head.push_back("% diff " + configs[i].name);
  }
  for (const auto& c : configs) {
    csv_head.push_back(column_slug(c.name) + "_coverage_pct");
    text_head.push_back("Coverage " + c.name);
  }

  std::vector<std::vector<std::string>> text_rows = {text_head};
  out.sets_csv = csv_line(csv_head);
  for (const auto& name : sets) {
    std::vector<std::string> csv = {name, ""};
    std::vector<std::string> text = {name, ""};
    for (const auto& c : configs) {
      if (const auto* s = find(c, name)) {
        if (csv[1].empty()) csv[1] = text[1] = std::to_string(s->benchmarks);
        csv.push_back(std::to_string(s->crashes));
        csv.push_back(std::to_string(s->false_positives));
        text.push_back(std::to_string(s->crashes) + " (" + std::to_string(s->false_positives) + ")");
      } else {
        csv.insert(csv.end(), {"", ""});
        text.push_back("-");
      }
    }
    const SetSummary* base = configs.empty() ? nullptr : find(configs.front(), name);
    for (std::size_t i = 1; i < configs.size(); ++i) {
      const SetSummary* s = find(configs[i], name);
      if (base && s && base->crashes > 0) {
        const std::string p = format_percent(percent_reduction(base->crashes, s->crashes));
        csv.push_back(p);
        text.push_back(p + "%");
      } else {
        csv.push_back("");
        text.push_back("-");
      }
    }
    for (const auto& c : configs) {
      if (const auto* s = find(c, name)) {
        csv.push_back(coverage_text(s->coverage));
        text.push_back(coverage_text(s->coverage) + "%");
      } else {
        csv.push_back("");
        text.push_back("-");
      }
    }
    out.sets_csv += csv_line(csv);
    text_rows.push_back(std::move(text));
  }

  std::vector<std::vector<std::string>> cost_rows = {{"Agent", "Input", "Tools", "Output", "Total"}};
  out.costs_csv = csv_line({"agent", "input_usd", "tool_usd", "output_usd", "total_usd"});
  auto add_cost = [&](const CostRecord& r) {
    cost_rows.push_back({r.agent, format_dollars(r.input_micros), format_dollars(r.tool_micros),
                         format_dollars(r.output_micros), format_dollars(r.total_micros)});
    out.costs_csv += csv_line({r.agent, format_dollars_exact(r.input_micros), format_dollars_exact(r.tool_micros),
                               format_dollars_exact(r.output_micros), format_dollars_exact(r.total_micros)});
  };
  for (const auto& r : costs) add_cost(r);
  if (!costs.empty()) add_cost(sum_costs("Cost (per driver)", costs));

  out.text = "Crashes and coverage (parentheses: false positive crashes)\n" + aligned(text_rows) +
             "\nAverage per-driver cost (USD)\n" + aligned(cost_rows);
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorKind::ParseError, "csv: unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace crashsift
