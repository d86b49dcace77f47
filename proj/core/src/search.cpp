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

#include "visbias/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "visbias/error.hpp"

namespace visbias {
namespace {

nlohmann::json default_step_json(BiasKind kind) {
  nlohmann::json j{{"kind", std::string(to_string(kind))}};
  switch (kind) {
    case BiasKind::Brightness: j["factor"] = 1.0; break;
    case BiasKind::Gamma: j["gamma"] = 1.0; break;
    case BiasKind::BlackPadding: j["thickness"] = 10; break;
    case BiasKind::BeautyFilter:
      throw Error(ErrorKind::Parameter, "beauty_filter needs an explicit grid with a command");
    default: break;
  }
  return j;
}

bool is_overlay(BiasKind k) {
  return k == BiasKind::AuthenticityOverlay || k == BiasKind::KeywordOverlay || k == BiasKind::InstructionOverlay;
}

double parse_value(BiasKind kind, const nlohmann::json& v) {
  if (v.is_string()) {
    if (!is_overlay(kind)) {
      throw Error(ErrorKind::Parameter, "grid value for " + std::string(to_string(kind)) + " must be numeric");
    }
    return static_cast<double>(static_cast<int>(parse_anchor(v.get<std::string>())));
  }
  if (!v.is_number()) throw Error(ErrorKind::Parameter, "grid values must be numbers or anchor names");
  return v.get<double>();
}

}  // namespace

ParamGrid default_grid(BiasKind kind) {
  ParamGrid g;
  g.kind = kind;
  g.base = step_from_json(default_step_json(kind));
  switch (kind) {
    case BiasKind::Brightness:
    case BiasKind::Gamma:
      g.values.assign(std::begin(kPaperFactorGrid), std::end(kPaperFactorGrid));
      break;
    case BiasKind::BlackPadding:
      g.values.assign(std::begin(kPaperPaddingGrid), std::end(kPaperPaddingGrid));
      break;
    case BiasKind::AuthenticityOverlay:
    case BiasKind::KeywordOverlay:
    case BiasKind::InstructionOverlay:
      for (std::size_t i = 0; i < kAllAnchors.size(); ++i) g.values.push_back(static_cast<double>(i));
      break;
    default:
      g.values.push_back(primary_parameter(g.base.step));
      break;
  }
  return g;
}

StepTemplate with_parameter(const StepTemplate& base, double value) {
  StepTemplate out = base;
  std::visit(
      [&](auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BrightnessParams>) {
          p.factor = value;
        } else if constexpr (std::is_same_v<P, GammaParams>) {
          p.gamma = value;
        } else if constexpr (std::is_same_v<P, OverlayParams>) {
          const double idx = std::round(value);
          if (idx != value || idx < 0 || idx >= static_cast<double>(kAllAnchors.size())) {
            throw Error(ErrorKind::Parameter, "anchor index out of range");
          }
          p.anchor = kAllAnchors[static_cast<std::size_t>(idx)];
        } else if constexpr (std::is_same_v<P, PaddingParams>) {
          if (std::round(value) != value) throw Error(ErrorKind::Parameter, "thickness must be an integer");
          p.thickness = static_cast<int>(value);
        } else if constexpr (std::is_same_v<P, BoxParams>) {
          if (std::round(value) != value) throw Error(ErrorKind::Parameter, "stroke width must be an integer");
          p.style.stroke_width = static_cast<int>(value);
        }
      },
      out.step.params);
  return out;
}

void validate(const ParamGrid& grid) {
  if (grid.values.empty()) throw Error(ErrorKind::Parameter, "parameter grid is empty");
  if (grid.base.step.kind != grid.kind) throw Error(ErrorKind::Parameter, "grid step kind differs from grid kind");
  for (double v : grid.values) {
    BiasStep step = with_parameter(grid.base, v).step;
    if (auto* p = std::get_if<OverlayParams>(&step.params); p && p->text.empty()) p->text = "x";
    validate(step);
  }
}

ParamGrid grid_from_json(const nlohmann::json& j) {
  try {
    ParamGrid g;
    g.kind = parse_bias_kind(j.at("kind").get<std::string>());
    nlohmann::json step = j.contains("step") ? j.at("step") : default_step_json(g.kind);
    step["kind"] = std::string(to_string(g.kind));
    g.base = step_from_json(step);
    for (const auto& v : j.at("values")) g.values.push_back(parse_value(g.kind, v));
    validate(g);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parameter, std::string("malformed grid: ") + e.what());
  }
}

nlohmann::json to_json(const ParamGrid& grid) {
  nlohmann::json values = nlohmann::json::array();
  for (double v : grid.values) {
    if (is_overlay(grid.kind)) {
      values.push_back(std::string(to_string(kAllAnchors[static_cast<std::size_t>(v)])));
    } else {
      values.push_back(v);
    }
  }
  return {{"kind", std::string(to_string(grid.kind))}, {"values", values}, {"step", to_json(grid.base)}};
}

ParamGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read grid '" + path.string() + "'");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::Parameter, "grid '" + path.string() + "' is not valid JSON");
  return grid_from_json(j);
}

std::vector<SearchResult> greedy_param_search(const Manifest& manifest, const ParamGrid& grid, Judge& judge,
                                              const std::map<Domain, DomainMean>& baseline,
                                              const EvalOptions& options) {
  validate(grid);
  std::map<Domain, SearchResult> by_domain;
  for (double value : grid.values) {
    const StepTemplate step = with_parameter(grid.base, value);
    const RecipeTemplate recipe{{step}};
    const SingleEvalResult run = run_single_eval(manifest, recipe, judge, options);
    for (const DomainBiasCell& cell : build_cells(baseline, run)) {
      auto [it, fresh] = by_domain.try_emplace(cell.domain);
      SearchResult& r = it->second;
      if (fresh) r.domain = cell.domain;
      r.bias_label = cell.bias_label;
      r.grid.push_back({value, step, cell});
      if (r.grid.size() == 1 || cell.pct_change > r.best_pct_change) {
        r.best_value = value;
        r.best_step = step;
        r.best_pct_change = cell.pct_change;
      }
    }
  }
  std::vector<SearchResult> out;
  for (auto& [d, r] : by_domain) out.push_back(std::move(r));
  return out;
}

std::vector<std::vector<BiasKind>> enumerate_combos(std::span<const BiasKind> kinds, int r, Domain domain) {
  if (r != 2 && r != 3) throw Error(ErrorKind::Parameter, "combination size must be 2 or 3");
  std::set<BiasKind> unique;
  for (BiasKind k : kinds) {
    if (is_applicable(k, domain)) unique.insert(k);
  }
  std::vector<BiasKind> pool(unique.begin(), unique.end());
  std::sort(pool.begin(), pool.end(), [](BiasKind a, BiasKind b) { return canonical_rank(a) < canonical_rank(b); });

  std::vector<std::vector<BiasKind>> out;
  const std::size_t n = pool.size();
  const auto rr = static_cast<std::size_t>(r);
  if (n < rr) return out;
  std::vector<std::size_t> idx(rr);
  for (std::size_t i = 0; i < rr; ++i) idx[i] = i;
  while (true) {
    std::vector<BiasKind> combo;
    for (std::size_t i : idx) combo.push_back(pool[i]);
    out.push_back(std::move(combo));
    std::size_t i = rr;
    while (i > 0 && idx[i - 1] == n - rr + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t k = i; k < rr; ++k) idx[k] = idx[k - 1] + 1;
  }
  return out;
}

nlohmann::json optima_to_json(std::span<const SearchResult> results) {
  nlohmann::json optima = nlohmann::json::object();
  std::string kind;
  for (const auto& r : results) {
    optima[std::string(to_string(r.domain))] = to_json(r.best_step);
    kind = std::string(to_string(r.best_step.step.kind));
  }
  return {{"kind", kind}, {"optima", optima}};
}

void merge_optima(DomainOptima& optima, const nlohmann::json& j) {
  try {
    for (const auto& [name, step] : j.at("optima").items()) {
      StepTemplate st = step_from_json(step);
      optima[parse_domain(name)][st.step.kind] = std::move(st);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parameter, std::string("malformed optima file: ") + e.what());
  }
}

RecipeTemplate build_combo(const std::map<BiasKind, StepTemplate>& optima, std::span<const BiasKind> kinds) {
  RecipeTemplate t;
  for (BiasKind k : kinds) {
    auto it = optima.find(k);
    if (it == optima.end()) {
      throw Error(ErrorKind::Parameter, "no optimum for " + std::string(to_string(k)));
    }
    t.steps.push_back(it->second);
  }
  return canonicalize(std::move(t));
}

std::map<Domain, std::vector<RecipeTemplate>> combos_from_optima(const DomainOptima& optima, int r) {
  std::map<Domain, std::vector<RecipeTemplate>> out;
  for (const auto& [d, steps] : optima) {
    std::vector<BiasKind> kinds;
    for (const auto& [k, s] : steps) kinds.push_back(k);
    for (const auto& combo : enumerate_combos(kinds, r, d)) out[d].push_back(build_combo(steps, combo));
  }
  return out;
}

std::vector<ComboSearchResult> combo_search(const Manifest& manifest,
                                            const std::map<Domain, std::vector<RecipeTemplate>>& combos,
                                            Judge& judge, const std::map<Domain, DomainMean>& baseline,
                                            const EvalOptions& options) {
  const bool any = std::any_of(combos.begin(), combos.end(), [](const auto& kv) { return !kv.second.empty(); });
  if (!any) throw Error(ErrorKind::Parameter, "no combinations to evaluate");

  std::vector<ComboSearchResult> out;
  for (const auto& [d, recipes] : combos) {
    const Manifest part = filter_domain(manifest, d);
    if (part.instances.empty() || recipes.empty()) continue;
    ComboSearchResult res;
    res.domain = d;
    for (const auto& recipe : recipes) {
      const SingleEvalResult run = run_single_eval(part, recipe, judge, options);
      const auto cells = build_cells(baseline, run);
      if (cells.empty()) continue;
      res.rows.push_back({recipe, cells.front()});
      if (res.rows.size() == 1 || cells.front().pct_change > res.rows[res.best].cell.pct_change) {
        res.best = res.rows.size() - 1;
      }
    }
    if (!res.rows.empty()) out.push_back(std::move(res));
  }
  return out;
}

std::string describe_params(const RecipeTemplate& recipe) {
  std::string out;
  for (const auto& s : recipe.steps) {
    if (!out.empty()) out += '|';
    out += describe_params(s.step);
  }
  return out;
}

namespace {

void write_row(std::ostream& out, const DomainBiasCell& c, const std::string& params) {
  out << to_string(c.domain) << ',' << c.bias_label << ',' << params << ',' << format_fixed(c.baseline_mean, 4)
      << ',' << format_fixed(c.biased_mean, 4) << ',' << format_fixed(c.pct_change, 2) << '\n';
}

}  // namespace

void write_search_csv(std::span<const SearchResult> results, std::ostream& out) {
  out << "domain,bias,params,baseline_mean,biased_mean,pct_change\n";
  for (const auto& r : results) {
    for (const auto& g : r.grid) write_row(out, g.cell, describe_params(g.step.step));
  }
}

void write_combo_csv(std::span<const ComboSearchResult> results, std::ostream& out) {
  out << "domain,bias,params,baseline_mean,biased_mean,pct_change\n";
  for (const auto& r : results) {
    for (const auto& row : r.rows) write_row(out, row.cell, describe_params(row.recipe));
  }
}

}  // namespace visbias
