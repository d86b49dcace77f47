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

namespace visbias::cli {
namespace {

struct SingleOptions {
  JudgeOptions common;
  std::string prompt = "standard";
  std::vector<std::string> recipes;
  bool dry_run = false;
};

struct PairwiseOptions {
  JudgeOptions common;
  std::string manifest_b;
  std::string recipe;
  bool dry_run = false;
};

std::size_t applicable_count(const Manifest& m, const RecipeTemplate& r) {
  std::size_t n = 0;
  for (const auto& inst : m.instances) {
    if (inst.rejected) continue;
    const auto kinds = r.kinds();
    if (std::all_of(kinds.begin(), kinds.end(), [&](BiasKind k) { return is_applicable(k, inst.domain); })) ++n;
  }
  return n;
}

nlohmann::ordered_json means_json(const std::map<Domain, DomainMean>& means) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [d, m] : means) {
    arr.push_back({{"domain", std::string(to_string(d))}, {"n", m.n}, {"failed", m.failed}, {"mean", m.mean}});
  }
  return arr;
}

void write_means_csv(std::ostream& out, const std::string& label, const std::map<Domain, DomainMean>& means) {
  for (const auto& [d, m] : means) {
    out << label << ',' << to_string(d) << ',' << m.n << ',' << m.failed << ',' << format_fixed(m.mean, 4) << '\n';
  }
}

void print_cells(std::ostream& out, const std::vector<DomainBiasCell>& cells) {
  for (const auto& c : cells) {
    out << "  " << to_string(c.domain) << " / " << c.bias_label << ": " << format_fixed(c.baseline_mean, 3) << " -> "
        << format_fixed(c.biased_mean, 3) << " (" << (c.pct_change > 0 ? "+" : "") << format_fixed(c.pct_change, 2)
        << "%)\n";
  }
}

int eval_single(const SingleOptions& o, Context& ctx) {
  const TemplateId tid = parse_template_id(o.prompt);
  if (tid == TemplateId::Pairwise) throw Error(ErrorKind::Validation, "use 'eval pairwise' for the pairwise template");
  std::vector<RecipeTemplate> recipes;
  for (const auto& f : o.recipes) {
    ctx.config_files.emplace_back(f);
    recipes.push_back(load_recipe(f));
  }
  if (tid == TemplateId::BiasDef && recipes.empty()) {
    throw Error(ErrorKind::Validation, "--prompt bias-def needs at least one --recipe");
  }

  if (o.dry_run) {
    ctx.run_log = std::filesystem::path(o.common.out_dir) / "runs.jsonl";
    ctx.config_files.emplace_back(o.common.judge);
    const JudgeBackendConfig cfg = load_judge_config(o.common.judge);
    ctx.entry.judge_fingerprint = fingerprint(cfg);
    const Manifest m = read_manifest(std::filesystem::path(o.common.manifest));
    std::size_t live = 0;
    for (const auto& inst : m.instances) live += inst.rejected ? 0 : 1;
    std::size_t total = tid == TemplateId::BiasDef ? 0 : live;
    ctx.out << "baseline: " << (tid == TemplateId::BiasDef ? 0 : live) << '\n';
    for (const auto& r : recipes) {
      const std::size_t n = applicable_count(m, r);
      const std::size_t requests = tid == TemplateId::BiasDef ? n + live : n;
      ctx.out << recipe_label(r) << ": " << requests << '\n';
      total += requests;
    }
    ctx.out << "planned judge requests: " << total << " (dry run, nothing sent)\n";
    ctx.entry.counters["planned_requests"] = total;
    return 0;
  }

  JudgeSession s = open_session(o.common, ctx);
  s.eval.template_id = tid;
  const std::filesystem::path out_dir(o.common.out_dir);
  const auto records_path = out_dir / "records.jsonl";

  std::vector<EvalRecord> records;
  std::vector<DomainBiasCell> cells;
  std::ostringstream means_csv;
  means_csv << "run,domain,n,failed,mean\n";
  nlohmann::ordered_json baselines = nlohmann::ordered_json::array();
  nlohmann::ordered_json inapplicable = nlohmann::ordered_json::array();

  auto flush_partial = [&](const std::vector<EvalRecord>& partial) {
    std::ostringstream ss;
    write_records(records, ss);
    write_records(partial, ss);
    write_text(records_path, ss.str());
    ctx.entry.output_paths.push_back(records_path.string());
    record_judge_counters(s, ctx);
  };

  try {
    std::optional<SingleEvalResult> shared_baseline;
    if (tid != TemplateId::BiasDef) {
      shared_baseline = run_single_eval(s.manifest, {}, *s.judge, s.eval);
      records.insert(records.end(), shared_baseline->records.begin(), shared_baseline->records.end());
      write_means_csv(means_csv, "baseline", shared_baseline->means);
      baselines.push_back({{"for", "all"}, {"means", means_json(shared_baseline->means)}});
    }
    for (const auto& recipe : recipes) {
      std::map<Domain, DomainMean> base_means;
      if (shared_baseline) {
        base_means = shared_baseline->means;
      } else {
        s.eval.prompt_kinds = recipe.kinds();
        SingleEvalResult base = run_single_eval(s.manifest, {}, *s.judge, s.eval);
        records.insert(records.end(), base.records.begin(), base.records.end());
        const std::string label = "baseline[" + recipe_label(recipe) + "]";
        write_means_csv(means_csv, label, base.means);
        baselines.push_back({{"for", recipe_label(recipe)}, {"means", means_json(base.means)}});
        base_means = base.means;
      }
      SingleEvalResult biased = run_single_eval(s.manifest, recipe, *s.judge, s.eval);
      records.insert(records.end(), biased.records.begin(), biased.records.end());
      write_means_csv(means_csv, biased.bias_label, biased.means);
      if (!biased.inapplicable.empty()) {
        std::vector<std::string> names;
        for (Domain d : biased.inapplicable) names.emplace_back(to_string(d));
        inapplicable.push_back({{"bias", biased.bias_label}, {"domains", names}});
        ctx.err << "note: " << biased.bias_label << " not applicable to " << domain_list(biased.inapplicable)
                << "; cells skipped\n";
      }
      for (auto& c : build_cells(base_means, biased)) cells.push_back(std::move(c));
    }
  } catch (const RunAbortedError& e) {
    flush_partial(e.partial());
    throw;
  }

  std::ostringstream rec;
  write_records(records, rec);
  write_text(records_path, rec.str());
  std::ostringstream cells_csv;
  write_cells_csv(cells, cells_csv);
  write_text(out_dir / "cells.csv", cells_csv.str());
  write_text(out_dir / "means.csv", means_csv.str());

  nlohmann::ordered_json summary;
  summary["scale"] = {{"min", s.manifest.scale.min}, {"max", s.manifest.scale.max}};
  summary["judge"] = s.judge->fingerprint();
  summary["template"] = std::string(to_string(tid));
  summary["baseline"] = baselines;
  nlohmann::ordered_json cell_arr = nlohmann::ordered_json::array();
  for (const auto& c : cells) cell_arr.push_back(nlohmann::ordered_json::parse(to_json(c).dump()));
  summary["cells"] = cell_arr;
  summary["inapplicable"] = inapplicable;
  if (!cells.empty()) {
    const AttackSuccess asr = attack_success_rate(cells);
    summary["asr"] = {{"asr", asr.asr}, {"successes", asr.successes}, {"cells", asr.cells}};
    if (asr.mean_increase_on_success) summary["asr"]["mean_increase_on_success"] = *asr.mean_increase_on_success;
  }
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");

  for (const char* f : {"records.jsonl", "cells.csv", "means.csv", "summary.json"}) {
    ctx.entry.output_paths.push_back((out_dir / f).string());
  }
  record_judge_counters(s, ctx);

  ctx.out << "evaluated " << records.size() << " records with " << s.judge->fingerprint() << " ("
          << s.judge->backend_requests() << " requests, " << s.judge->cache_hits() << " cache hits)\n";
  print_cells(ctx.out, cells);
  return 0;
}

int eval_pairwise(const PairwiseOptions& o, Context& ctx) {
  RecipeTemplate recipe;
  if (!o.recipe.empty()) {
    ctx.config_files.emplace_back(o.recipe);
    recipe = load_recipe(o.recipe);
  }
  ctx.config_files.emplace_back(o.manifest_b);
  const Manifest manifest_b = read_manifest(std::filesystem::path(o.manifest_b));

  if (o.dry_run) {
    ctx.run_log = std::filesystem::path(o.common.out_dir) / "runs.jsonl";
    ctx.config_files.emplace_back(o.common.judge);
    const JudgeBackendConfig cfg = load_judge_config(o.common.judge);
    ctx.entry.judge_fingerprint = fingerprint(cfg);
    const Manifest m = read_manifest(std::filesystem::path(o.common.manifest));
    const std::size_t total = 2 * applicable_count(m, recipe);
    ctx.out << "planned judge requests: " << total << " (dry run, nothing sent)\n";
    ctx.entry.counters["planned_requests"] = total;
    return 0;
  }

  JudgeSession s = open_session(o.common, ctx);
  const PairwiseResult result =
      run_pairwise(s.manifest, manifest_b, recipe, *s.judge, s.eval, image_root_for(o.manifest_b));
  const std::filesystem::path out_dir(o.common.out_dir);

  std::ostringstream rec;
  write_pairwise_records(result.records, rec);
  write_text(out_dir / "pairwise.jsonl", rec.str());
  std::ostringstream csv;
  write_win_rates_csv(result, csv);
  write_text(out_dir / "win_rates.csv", csv.str());

  nlohmann::ordered_json summary;
  summary["scale"] = {{"min", s.manifest.scale.min}, {"max", s.manifest.scale.max}};
  summary["judge"] = s.judge->fingerprint();
  summary["a_bias"] = result.a_label;
  nlohmann::ordered_json rates = nlohmann::ordered_json::array();
  for (const auto& [d, w] : result.win_rates) {
    rates.push_back({{"domain", std::string(to_string(d))}, {"n", w.n}, {"failed", w.failed},
                     {"a_win_rate", w.a_win_rate}});
  }
  summary["win_rates"] = rates;
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  for (const char* f : {"pairwise.jsonl", "win_rates.csv", "summary.json"}) {
    ctx.entry.output_paths.push_back((out_dir / f).string());
  }
  record_judge_counters(s, ctx);

  ctx.out << "compared " << result.records.size() << " pairs (A = " << result.a_label << ")\n";
  for (const auto& [d, w] : result.win_rates) {
    ctx.out << "  " << to_string(d) << ": A win rate " << format_fixed(w.a_win_rate, 3) << " over " << w.n << '\n';
  }
  return 0;
}

}  // namespace

void register_eval(CLI::App& app, Context& ctx) {
  auto* eval = app.add_subcommand("eval", "Run judge evaluation protocols");
  eval->require_subcommand(1);

  auto s = std::make_shared<SingleOptions>();
  auto* single = eval->add_subcommand("single", "Single-image scoring, baseline against biased recipes");
  add_judge_options(single, s->common);
  single->add_option("--prompt", s->prompt, "standard, cot, bias-aware or bias-def")
      ->check(CLI::IsMember({"standard", "cot", "bias-aware", "bias_aware", "bias-def", "bias_def"}));
  single->add_option("--recipe", s->recipes, "Recipe JSON files");
  single->add_flag("--dry-run", s->dry_run, "Count the judge requests without sending any");
  single->callback([&ctx, s] { ctx.action = [&ctx, s] { return eval_single(*s, ctx); }; });

  auto p = std::make_shared<PairwiseOptions>();
  auto* pairwise = eval->add_subcommand("pairwise", "Pairwise comparison of set A against set B, both orders");
  add_judge_options(pairwise, p->common);
  pairwise->add_option("--manifest-b", p->manifest_b, "Manifest of the B images")->required();
  pairwise->add_option("--recipe", p->recipe, "Recipe applied to the A images");
  pairwise->add_flag("--dry-run", p->dry_run, "Count the judge requests without sending any");
  pairwise->callback([&ctx, p] { ctx.action = [&ctx, p] { return eval_pairwise(*p, ctx); }; });
}

}  // namespace visbias::cli
