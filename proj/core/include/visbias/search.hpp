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

#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "visbias/protocols.hpp"

namespace visbias {

/// Candidate values for the primary parameter of one bias kind (factor,
/// gamma, anchor index, padding thickness, box stroke). `base` supplies every
/// other parameter.
struct ParamGrid {
  BiasKind kind = BiasKind::Brightness;
  std::vector<double> values;
  StepTemplate base;
};

inline constexpr double kPaperFactorGrid[] = {0.9, 0.95, 1.03, 1.05, 1.1, 1.11, 1.15, 1.2,
                                              1.3, 1.4,  1.5,  1.6,  1.7, 2.0,  2.1,  2.3};
inline constexpr double kPaperPaddingGrid[] = {10, 15, 20, 25, 30, 40, 50};

// Factor grid for brightness and gamma, all five anchors for overlays, the
// padding grid for black_padding, a single default value otherwise.
ParamGrid default_grid(BiasKind kind);

// Copy of `base` with the primary parameter set to `value`.
StepTemplate with_parameter(const StepTemplate& base, double value);

// Non-empty, every value valid for the kind. Throws Error(Parameter).
void validate(const ParamGrid& grid);

// {"kind":"brightness","values":[...],"step":{...}}; anchors may be names.
ParamGrid grid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ParamGrid& grid);
ParamGrid load_grid(const std::filesystem::path& path);

struct SearchCell {
  double value = 0.0;
  StepTemplate step;
  DomainBiasCell cell;
};

struct SearchResult {
  Domain domain = Domain::Animals;
  std::string bias_label;
  double best_value = 0.0;
  StepTemplate best_step;
  double best_pct_change = 0.0;
  std::vector<SearchCell> grid;  // grid order
};

/// One-dimensional sweep: every value is evaluated on its own and the argmax
/// of pct_change is kept per domain, ties going to the earlier value.
std::vector<SearchResult> greedy_param_search(const Manifest& manifest, const ParamGrid& grid, Judge& judge,
                                              const std::map<Domain, DomainMean>& baseline,
                                              const EvalOptions& options);

// Size-r subsets of the distinct kinds applicable to `domain`, each in
// canonical order. r must be 2 or 3 (Error(Parameter)).
std::vector<std::vector<BiasKind>> enumerate_combos(std::span<const BiasKind> kinds, int r, Domain domain);

using DomainOptima = std::map<Domain, std::map<BiasKind, StepTemplate>>;

// Best steps of one greedy search, in the optima file format
// {"kind":..,"optima":{"animals":{step},..}}.
nlohmann::json optima_to_json(std::span<const SearchResult> results);
// Merges `j` into `optima`.
void merge_optima(DomainOptima& optima, const nlohmann::json& j);

// Combination of per-kind optimal steps, sorted canonically. Throws
// Error(Parameter) when a kind has no optimum for the domain.
RecipeTemplate build_combo(const std::map<BiasKind, StepTemplate>& optima, std::span<const BiasKind> kinds);

// Every size-r combo over the kinds with an optimum in that domain.
std::map<Domain, std::vector<RecipeTemplate>> combos_from_optima(const DomainOptima& optima, int r);

struct ComboRow {
  RecipeTemplate recipe;
  DomainBiasCell cell;
};

struct ComboSearchResult {
  Domain domain = Domain::Animals;
  std::size_t best = 0;  // index into rows
  std::vector<ComboRow> rows;
};

std::vector<ComboSearchResult> combo_search(const Manifest& manifest,
                                            const std::map<Domain, std::vector<RecipeTemplate>>& combos,
                                            Judge& judge, const std::map<Domain, DomainMean>& baseline,
                                            const EvalOptions& options);

// domain,bias,params,baseline_mean,biased_mean,pct_change
void write_search_csv(std::span<const SearchResult> results, std::ostream& out);
void write_combo_csv(std::span<const ComboSearchResult> results, std::ostream& out);

// "factor=1.2", or the steps' parameters joined with '|'.
std::string describe_params(const RecipeTemplate& recipe);

}  // namespace visbias
