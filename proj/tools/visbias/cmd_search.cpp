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

#include <sstream>

#include "commands.hpp"
#include "visbias/error.hpp"
#include "visbias/search.hpp"

namespace visbias::cli {
namespace {

struct GridOptions {
  JudgeOptions common;
  std::string bias;
  std::string grid;
  std::string prompt = "standard";
};

struct ComboOptions {
  JudgeOptions common;
  int r = 2;
  std::vector<std::string> optima;
  std::string prompt = "standard";
};

void prepare_template(JudgeSession& s, const std::string& prompt, std::vector<BiasKind> kinds) {
  s.eval.template_id = parse_template_id(prompt);
  if (s.eval.template_id == TemplateId::Pairwise) {
    throw Error(ErrorKind::Validation, "searches score single images; pairwise is not available");
  }
  if (s.eval.template_id == TemplateId::BiasDef) s.eval.prompt_kinds = std::move(kinds);
}

int search_grid(const GridOptions& o, Context& ctx) {
  if (o.bias.empty() && o.grid.empty()) throw Error(ErrorKind::Validation, "give --bias, --grid or both");
  ParamGrid grid;
  if (!o.grid.empty()) {
    ctx.config_files.emplace_back(o.grid);
    grid = load_grid(o.grid);
    if (!o.bias.empty() && parse_bias_kind(o.bias) != grid.kind) {
      throw Error(ErrorKind::Validation, "--bias does not match the grid's kind");
    }
  } else {
    grid = default_grid(parse_bias_kind(o.bias));
  }

  JudgeSession s = open_session(o.common, ctx);
  prepare_template(s, o.prompt, {grid.kind});
  const SingleEvalResult baseline = run_single_eval(s.manifest, {}, *s.judge, s.eval);
  const auto results = greedy_param_search(s.manifest, grid, *s.judge, baseline.means, s.eval);

  const std::filesystem::path out_dir(o.common.out_dir);
  std::ostringstream csv;
  write_search_csv(results, csv);
  write_text(out_dir / "search.csv", csv.str());
  std::ostringstream best;
  best << "domain,bias,params,best_pct_change\n";
  for (const auto& r : results) {
    best << to_string(r.domain) << ',' << r.bias_label << ',' << describe_params(r.best_step.step) << ','
         << format_fixed(r.best_pct_change, 2) << '\n';
  }
  write_text(out_dir / "best.csv", best.str());
  write_text(out_dir / "optima.json", optima_to_json(results).dump(2) + "\n");
  for (const char* f : {"search.csv", "best.csv", "optima.json"}) {
    ctx.entry.output_paths.push_back((out_dir / f).string());
  }
  record_judge_counters(s, ctx);

  ctx.out << "searched " << grid.values.size() << " value(s) of " << to_string(grid.kind) << " over "
          << results.size() << " domain(s)\n";
  for (const auto& r : results) {
    ctx.out << "  " << to_string(r.domain) << ": " << describe_params(r.best_step.step) << " ("
            << format_fixed(r.best_pct_change, 2) << "%)\n";
  }
  return 0;
}

int search_combos(const ComboOptions& o, Context& ctx) {
  if (o.r != 2 && o.r != 3) throw Error(ErrorKind::Parameter, "--r must be 2 or 3");
  DomainOptima optima;
  for (const auto& f : o.optima) {
    ctx.config_files.emplace_back(f);
    merge_optima(optima, read_json(f));
  }
  const auto combos = combos_from_optima(optima, o.r);

  JudgeSession s = open_session(o.common, ctx);
  std::vector<BiasKind> kinds;
  for (const auto& [d, steps] : optima) {
    for (const auto& [k, st] : steps) {
      if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
    }
  }
  prepare_template(s, o.prompt, kinds);
  if (s.eval.template_id == TemplateId::BiasDef) {
    throw Error(ErrorKind::Validation, "combination search supports standard, cot and bias-aware prompts");
  }
  const SingleEvalResult baseline = run_single_eval(s.manifest, {}, *s.judge, s.eval);
  const auto results = combo_search(s.manifest, combos, *s.judge, baseline.means, s.eval);

  const std::filesystem::path out_dir(o.common.out_dir);
  std::ostringstream csv;
  write_combo_csv(results, csv);
  write_text(out_dir / "combos.csv", csv.str());
  std::ostringstream best;
  best << "domain,bias,params,best_pct_change\n";
  for (const auto& r : results) {
    const auto& row = r.rows[r.best];
    best << to_string(r.domain) << ',' << row.cell.bias_label << ',' << describe_params(row.recipe) << ','
         << format_fixed(row.cell.pct_change, 2) << '\n';
  }
  write_text(out_dir / "best.csv", best.str());
  for (const char* f : {"combos.csv", "best.csv"}) ctx.entry.output_paths.push_back((out_dir / f).string());
  record_judge_counters(s, ctx);

  for (const auto& r : results) {
    const auto& row = r.rows[r.best];
    ctx.out << "  " << to_string(r.domain) << ": " << r.rows.size() << " combos, best " << row.cell.bias_label
            << " (" << format_fixed(row.cell.pct_change, 2) << "%)\n";
  }
  return 0;
}

}  // namespace

void register_search(CLI::App& app, Context& ctx) {
  auto* search = app.add_subcommand("search", "Recipe parameter and combination searches");
  search->require_subcommand(1);

  auto g = std::make_shared<GridOptions>();
  auto* grid = search->add_subcommand("grid", "One-dimensional parameter sweep per bias kind");
  add_judge_options(grid, g->common);
  grid->add_option("--bias", g->bias, "Bias kind, e.g. brightness");
  grid->add_option("--grid", g->grid, "Grid JSON (default grid for the kind if omitted)");
  grid->add_option("--prompt", g->prompt, "Prompt template");
  grid->callback([&ctx, g] { ctx.action = [&ctx, g] { return search_grid(*g, ctx); }; });

  auto c = std::make_shared<ComboOptions>();
  auto* combos = search->add_subcommand("combos", "Evaluate every 2- or 3-way combination of optimal steps");
  add_judge_options(combos, c->common);
  combos->add_option("--r", c->r, "Combination size (2 or 3)")->required()->check(CLI::IsMember({2, 3}));
  combos->add_option("--optima", c->optima, "optima.json files from 'search grid'")->required();
  combos->add_option("--prompt", c->prompt, "Prompt template");
  combos->callback([&ctx, c] { ctx.action = [&ctx, c] { return search_combos(*c, ctx); }; });
}

}  // namespace visbias::cli
