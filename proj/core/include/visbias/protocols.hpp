/**
 * Copyright 2026 The visbias Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "visbias/benchmark.hpp"
#include "visbias/judge.hpp"
#include "visbias/prompts.hpp"
#include "visbias/recipe.hpp"

namespace visbias {

struct EvalRecord {
  std::string instance_id;
  Domain domain = Domain::Animals;
  std::string bias_label = "baseline";
  nlohmann::json recipe = nlohmann::json::array();  // resolved steps; [] = baseline
  TemplateId template_id = TemplateId::Standard;
  std::optional<JudgeVerdict> verdict;              // absent when the instance failed
  std::optional<std::string> error;
  std::string image_digest;                         // SHA-256 of the judged pixels
  std::optional<std::string> timestamp;
};

nlohmann::json to_json(const EvalRecord& r);
EvalRecord eval_record_from_json(const nlohmann::json& j);

// Mean score of one domain within one run; failed instances are excluded.
struct DomainMean {
  Domain domain = Domain::Animals;
  std::size_t n = 0;
  std::size_t failed = 0;
  double mean = 0.0;
};

struct SingleEvalResult {
  std::string bias_label;
  std::vector<EvalRecord> records;        // sorted by instance id
  std::map<Domain, DomainMean> means;     // domains with at least one verdict
  std::vector<Domain> inapplicable;       // skipped because of the recipe
};

struct EvalOptions {
  TemplateId template_id = TemplateId::Standard;
  const PromptLibrary* prompts = nullptr;  // built-ins when null
  std::filesystem::path image_root;        // manifest image_ref base
  int parallel = 1;                        // worker threads
  double max_failure_fraction = 0.10;
  bool timestamps = false;
  // Kinds named by bias_def prompts. Defaults to the recipe's kinds.
  std::vector<BiasKind> prompt_kinds;
};

/// Thrown when too many instances fail; `partial` holds every record
/// produced so far, in id order.
class RunAbortedError : public Error {
 public:
  RunAbortedError(const std::string& message, std::vector<EvalRecord> partial);
  const std::vector<EvalRecord>& partial() const noexcept { return partial_; }

 private:
  std::vector<EvalRecord> partial_;
};

// Judges every non-rejected instance, after applying the recipe when one is
// given. Throws Error(Run) on an empty manifest.
SingleEvalResult run_single_eval(const Manifest& manifest, const RecipeTemplate& recipe, Judge& judge,
                                 const EvalOptions& options);

// Fold of raw records into per-domain means.
std::map<Domain, DomainMean> domain_means(std::span<const EvalRecord> records);

struct DomainBiasCell {
  Domain domain = Domain::Animals;
  std::string bias_label;
  std::size_t n = 0;
  double baseline_mean = 0.0;
  double biased_mean = 0.0;
  double pct_change = 0.0;
};

nlohmann::json to_json(const DomainBiasCell& c);
DomainBiasCell cell_from_json(const nlohmann::json& j);

// (biased - baseline) / baseline * 100. Throws Error(UndefinedChange) when
// baseline_mean <= 0.
double percent_change(double baseline_mean, double biased_mean);

// One cell per domain present in both runs.
std::vector<DomainBiasCell> build_cells(const std::map<Domain, DomainMean>& baseline,
                                        const SingleEvalResult& biased);

struct AttackSuccess {
  double asr = 0.0;                              // percent of cells with pct_change > 0
  std::optional<double> mean_increase_on_success;
  std::size_t successes = 0;
  std::size_t cells = 0;
};

// Throws Error(Metric) on an empty list.
AttackSuccess attack_success_rate(std::span<const DomainBiasCell> cells);

// ---------------------------------------------------------------------------
// Pairwise

struct PairwiseRecord {
  std::string instance_id;
  Domain domain = Domain::Animals;
  std::string a_label = "baseline";
  nlohmann::json a_recipe = nlohmann::json::array();
  std::optional<Preference> order1;  // A shown first
  std::optional<Preference> order2;  // B shown first
  std::optional<double> a_credit;
  std::optional<std::string> error;
};

nlohmann::json to_json(const PairwiseRecord& r);

// Credit A earns from one verdict, given whether A was shown first.
double a_credit(Preference p, bool a_first) noexcept;

struct WinRate {
  Domain domain = Domain::Animals;
  std::size_t n = 0;
  std::size_t failed = 0;
  double a_win_rate = 0.0;
};

struct PairwiseResult {
  std::string a_label;
  std::vector<PairwiseRecord> records;
  std::map<Domain, WinRate> win_rates;
  std::vector<Domain> inapplicable;
};

// Instances are aligned by id; a mismatch throws Error(Alignment). The recipe
// is applied to the A image only.
PairwiseResult run_pairwise(const Manifest& manifest_a, const Manifest& manifest_b, const RecipeTemplate& a_recipe,
                            Judge& judge, const EvalOptions& options_a, const std::filesystem::path& image_root_b);

// ---------------------------------------------------------------------------
// Output

void write_records(std::span<const EvalRecord> records, std::ostream& out);
void write_pairwise_records(std::span<const PairwiseRecord> records, std::ostream& out);

// domain,bias,n,baseline_mean,biased_mean,pct_change
void write_cells_csv(std::span<const DomainBiasCell> cells, std::ostream& out);
// domain,bias,n,failed,a_win_rate
void write_win_rates_csv(const PairwiseResult& result, std::ostream& out);

// Fixed-point decimal, e.g. format_fixed(64.70588, 2) == "64.71".
std::string format_fixed(double value, int decimals);

}  // namespace visbias
