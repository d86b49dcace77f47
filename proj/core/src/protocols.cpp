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

#include "visbias/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <set>
#include <thread>

#include "visbias/digest.hpp"
#include "visbias/error.hpp"
#include "visbias/metrics.hpp"

namespace visbias {
namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string pixel_digest(const RasterImage& img) {
  Sha256 h;
  h.add_field(std::to_string(img.width()) + "x" + std::to_string(img.height()));
  h.add_field(img.bytes());
  return h.hex_digest();
}

bool recipe_applicable(const RecipeTemplate& recipe, Domain d) {
  return std::all_of(recipe.steps.begin(), recipe.steps.end(),
                     [d](const StepTemplate& s) { return is_applicable(s.step.kind, d); });
}

bool needs_boxes(const RecipeTemplate& recipe) {
  return std::any_of(recipe.steps.begin(), recipe.steps.end(),
                     [](const StepTemplate& s) { return s.boxes_from_sidecar; });
}

struct PreparedImage {
  RasterImage image;
  BiasRecipe applied;
};

PreparedImage prepare(const Instance& inst, const RecipeTemplate& recipe, const std::filesystem::path& root) {
  RasterImage img = read_image(root / inst.image_ref);
  if (recipe.empty()) return {std::move(img), {}};
  InstanceContext ctx;
  ctx.instruction = inst.instruction;
  ctx.concepts = inst.original.as_map();
  if (needs_boxes(recipe)) {
    if (!inst.boxes_ref) {
      throw Error(ErrorKind::Reference, "instance " + inst.id + " has no box sidecar for bounding_box");
    }
    ctx.boxes = load_box_sidecar(root / *inst.boxes_ref).boxes;
  }
  BiasRecipe applied = resolve(recipe, ctx);
  RasterImage out = apply_recipe(img, applied, inst.domain);
  return {std::move(out), std::move(applied)};
}

std::vector<const Instance*> live_instances(const Manifest& m) {
  std::vector<const Instance*> out;
  for (const auto& inst : m.instances) {
    if (!inst.rejected) out.push_back(&inst);
  }
  return out;
}

std::vector<Domain> sorted_domains(const std::set<Domain>& s) { return {s.begin(), s.end()}; }

// Runs job(i) for i in [0, n) on up to `threads` workers. Stops handing out
// work once `stop()` turns true.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job,
                  const std::function<bool()>& stop) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (!stop()) {
      const std::size_t i = next++;
      if (i >= n) return;
      job(i);
    }
  };
  const int count = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads))));
  if (count <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::size_t failure_limit(std::size_t total, double fraction) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total) + 1e-9));
}

template <typename Record>
void sort_by_id(std::vector<Record>& records) {
  std::sort(records.begin(), records.end(),
            [](const Record& a, const Record& b) { return a.instance_id < b.instance_id; });
}

const PromptLibrary& library(const EvalOptions& options) {
  static const PromptLibrary builtin = PromptLibrary::builtin();
  return options.prompts != nullptr ? *options.prompts : builtin;
}

void check_scale(const Manifest& manifest, const Judge& judge) {
  if (manifest.scale != judge.config().scale) {
    throw Error(ErrorKind::Config, "manifest scale " + std::to_string(manifest.scale.min) + ".." +
                                       std::to_string(manifest.scale.max) + " differs from judge scale " +
                                       std::to_string(judge.config().scale.min) + ".." +
                                       std::to_string(judge.config().scale.max));
  }
}

}  // namespace

nlohmann::json to_json(const EvalRecord& r) {
  nlohmann::json j;
  j["instance_id"] = r.instance_id;
  j["domain"] = std::string(to_string(r.domain));
  j["bias"] = r.bias_label;
  j["recipe"] = r.recipe;
  j["template"] = std::string(to_string(r.template_id));
  if (r.verdict) j["verdict"] = to_json(*r.verdict);
  if (r.error) j["error"] = *r.error;
  j["image_digest"] = r.image_digest;
  if (r.timestamp) j["timestamp"] = *r.timestamp;
  return j;
}

EvalRecord eval_record_from_json(const nlohmann::json& j) {
  try {
    EvalRecord r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.domain = parse_domain(j.at("domain").get<std::string>());
    r.bias_label = j.at("bias").get<std::string>();
    r.recipe = j.at("recipe");
    r.template_id = parse_template_id(j.at("template").get<std::string>());
    if (j.contains("verdict")) r.verdict = verdict_from_json(j.at("verdict"));
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    r.image_digest = j.value("image_digest", "");
    if (j.contains("timestamp")) r.timestamp = j.at("timestamp").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed eval record: ") + e.what());
  }
}

RunAbortedError::RunAbortedError(const std::string& message, std::vector<EvalRecord> partial)
    : Error(ErrorKind::Run, message), partial_(std::move(partial)) {}

SingleEvalResult run_single_eval(const Manifest& manifest, const RecipeTemplate& recipe, Judge& judge,
                                 const EvalOptions& options) {
  const auto all = live_instances(manifest);
  if (all.empty()) throw Error(ErrorKind::Run, "manifest has no instances to evaluate");
  check_scale(manifest, judge);

  std::vector<BiasKind> prompt_kinds = options.prompt_kinds.empty() ? recipe.kinds() : options.prompt_kinds;
  if (options.template_id != TemplateId::BiasDef) prompt_kinds.clear();
  const PromptTemplate& tmpl = library(options).get(options.template_id);
  if (tmpl.id == TemplateId::Pairwise) throw Error(ErrorKind::Template, "single evaluation cannot use pairwise");
  if (tmpl.id == TemplateId::BiasDef && prompt_kinds.empty()) {
    throw Error(ErrorKind::Template, "bias_def prompting needs a recipe or explicit bias kinds");
  }

  SingleEvalResult result;
  result.bias_label = recipe_label(recipe);
  std::set<Domain> skipped;
  std::vector<const Instance*> work;
  for (const Instance* inst : all) {
    if (recipe_applicable(recipe, inst->domain)) {
      work.push_back(inst);
    } else {
      skipped.insert(inst->domain);
    }
  }
  result.inapplicable = sorted_domains(skipped);

  std::vector<std::optional<EvalRecord>> slots(work.size());
  std::atomic<std::size_t> failed{0};
  const std::size_t limit = failure_limit(work.size(), options.max_failure_fraction);

  auto job = [&](std::size_t i) {
    const Instance& inst = *work[i];
    EvalRecord rec;
    rec.instance_id = inst.id;
    rec.domain = inst.domain;
    rec.bias_label = result.bias_label;
    rec.template_id = tmpl.id;
    try {
      PreparedImage prepared = prepare(inst, recipe, options.image_root);
      rec.recipe = to_json(prepared.applied);
      rec.image_digest = pixel_digest(prepared.image);
      const PromptPayload payload = render_prompt(tmpl, inst.instruction, prompt_kinds, manifest.scale);
      const ImageMeta meta{inst.id, inst.domain, prepared.applied, ""};
      rec.verdict = judge.score_single(payload, prepared.image, meta);
    } catch (const Error& e) {
      rec.error = e.what();
      ++failed;
    }
    if (options.timestamps) rec.timestamp = utc_now();
    slots[i] = std::move(rec);
  };
  parallel_for(work.size(), options.parallel, job, [&] { return failed.load() > limit; });

  for (auto& s : slots) {
    if (s) result.records.push_back(std::move(*s));
  }
  sort_by_id(result.records);
  if (failed.load() > limit) {
    throw RunAbortedError("run aborted: " + std::to_string(failed.load()) + " of " +
                              std::to_string(work.size()) + " instances failed",
                          std::move(result.records));
  }
  result.means = domain_means(result.records);
  return result;
}

std::map<Domain, DomainMean> domain_means(std::span<const EvalRecord> records) {
  std::map<Domain, std::vector<double>> scores;
  std::map<Domain, std::size_t> failures;
  for (const auto& r : records) {
    if (r.verdict && r.verdict->kind == JudgeVerdict::Kind::Absolute) {
      scores[r.domain].push_back(r.verdict->score);
    } else {
      ++failures[r.domain];
    }
  }
  std::map<Domain, DomainMean> out;
  for (const auto& [d, values] : scores) {
    DomainMean m;
    m.domain = d;
    m.n = values.size();
    m.mean = mean(values);
    out[d] = m;
  }
  for (const auto& [d, count] : failures) {
    if (auto it = out.find(d); it != out.end()) it->second.failed = count;
  }
  return out;
}

nlohmann::json to_json(const DomainBiasCell& c) {
  return {{"domain", std::string(to_string(c.domain))},
          {"bias", c.bias_label},
          {"n", c.n},
          {"baseline_mean", c.baseline_mean},
          {"biased_mean", c.biased_mean},
          {"pct_change", c.pct_change}};
}

DomainBiasCell cell_from_json(const nlohmann::json& j) {
  try {
    DomainBiasCell c;
    c.domain = parse_domain(j.at("domain").get<std::string>());
    c.bias_label = j.at("bias").get<std::string>();
    c.n = j.value("n", std::size_t{0});
    c.baseline_mean = j.at("baseline_mean").get<double>();
    c.biased_mean = j.at("biased_mean").get<double>();
    c.pct_change = j.contains("pct_change") ? j.at("pct_change").get<double>()
                                            : percent_change(c.baseline_mean, c.biased_mean);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed cell: ") + e.what());
  }
}

double percent_change(double baseline_mean, double biased_mean) {
  if (!(baseline_mean > 0.0)) {
    throw Error(ErrorKind::UndefinedChange, "percent change needs a positive baseline mean");
  }
  return (biased_mean - baseline_mean) / baseline_mean * 100.0;
}

std::vector<DomainBiasCell> build_cells(const std::map<Domain, DomainMean>& baseline,
                                        const SingleEvalResult& biased) {
  std::vector<DomainBiasCell> cells;
  for (const auto& [d, m] : biased.means) {
    auto it = baseline.find(d);
    if (it == baseline.end()) continue;
    DomainBiasCell c;
    c.domain = d;
    c.bias_label = biased.bias_label;
    c.n = m.n;
    c.baseline_mean = it->second.mean;
    c.biased_mean = m.mean;
    c.pct_change = percent_change(c.baseline_mean, c.biased_mean);
    cells.push_back(c);
  }
  return cells;
}

AttackSuccess attack_success_rate(std::span<const DomainBiasCell> cells) {
  if (cells.empty()) throw Error(ErrorKind::Metric, "attack success rate over zero cells");
  AttackSuccess out;
  out.cells = cells.size();
  std::vector<double> gains;
  for (const auto& c : cells) {
    if (c.pct_change > 0.0) gains.push_back(c.pct_change);
  }
  out.successes = gains.size();
  out.asr = static_cast<double>(out.successes) / static_cast<double>(out.cells) * 100.0;
  if (!gains.empty()) out.mean_increase_on_success = mean(gains);
  return out;
}

nlohmann::json to_json(const PairwiseRecord& r) {
  nlohmann::json j;
  j["instance_id"] = r.instance_id;
  j["domain"] = std::string(to_string(r.domain));
  j["a_bias"] = r.a_label;
  j["a_recipe"] = r.a_recipe;
  if (r.order1) j["order1"] = std::string(to_string(*r.order1));
  if (r.order2) j["order2"] = std::string(to_string(*r.order2));
  if (r.a_credit) j["a_credit"] = *r.a_credit;
  if (r.error) j["error"] = *r.error;
  return j;
}

double a_credit(Preference p, bool a_first) noexcept {
  switch (p) {
    case Preference::Tie: return 0.5;
    case Preference::First: return a_first ? 1.0 : 0.0;
    case Preference::Second: return a_first ? 0.0 : 1.0;
  }
  return 0.5;
}

PairwiseResult run_pairwise(const Manifest& manifest_a, const Manifest& manifest_b, const RecipeTemplate& a_recipe,
                            Judge& judge, const EvalOptions& options_a, const std::filesystem::path& image_root_b) {
  const auto all_a = live_instances(manifest_a);
  if (all_a.empty()) throw Error(ErrorKind::Run, "manifest has no instances to compare");
  check_scale(manifest_a, judge);

  std::map<std::string, const Instance*> b_by_id;
  for (const Instance* inst : live_instances(manifest_b)) b_by_id[inst->id] = inst;
  if (b_by_id.size() != all_a.size()) {
    throw Error(ErrorKind::Alignment, "manifests hold " + std::to_string(all_a.size()) + " and " +
                                          std::to_string(b_by_id.size()) + " instances");
  }
  for (const Instance* a : all_a) {
    auto it = b_by_id.find(a->id);
    if (it == b_by_id.end()) throw Error(ErrorKind::Alignment, "instance " + a->id + " missing from manifest B");
    if (it->second->domain != a->domain) throw Error(ErrorKind::Alignment, "domain mismatch for " + a->id);
  }

  const PromptTemplate& tmpl = library(options_a).get(TemplateId::Pairwise);
  PairwiseResult result;
  result.a_label = recipe_label(a_recipe);
  std::set<Domain> skipped;
  std::vector<const Instance*> work;
  for (const Instance* inst : all_a) {
    if (recipe_applicable(a_recipe, inst->domain)) {
      work.push_back(inst);
    } else {
      skipped.insert(inst->domain);
    }
  }
  result.inapplicable = sorted_domains(skipped);

  std::vector<std::optional<PairwiseRecord>> slots(work.size());
  std::atomic<std::size_t> failed{0};
  const std::size_t limit = failure_limit(work.size(), options_a.max_failure_fraction);

  auto job = [&](std::size_t i) {
    const Instance& a = *work[i];
    const Instance& b = *b_by_id.at(a.id);
    PairwiseRecord rec;
    rec.instance_id = a.id;
    rec.domain = a.domain;
    rec.a_label = result.a_label;
    try {
      PreparedImage img_a = prepare(a, a_recipe, options_a.image_root);
      PreparedImage img_b = prepare(b, {}, image_root_b);
      rec.a_recipe = to_json(img_a.applied);
      const PromptPayload payload = render_prompt(tmpl, a.instruction, {}, manifest_a.scale);
      const ImageMeta meta_a{a.id, a.domain, img_a.applied, "A"};
      const ImageMeta meta_b{b.id, b.domain, {}, "B"};
      const auto v1 = judge.compare_pair(payload, img_a.image, meta_a, img_b.image, meta_b);
      const auto v2 = judge.compare_pair(payload, img_b.image, meta_b, img_a.image, meta_a);
      rec.order1 = v1.preference;
      rec.order2 = v2.preference;
      rec.a_credit = (a_credit(v1.preference, true) + a_credit(v2.preference, false)) / 2.0;
    } catch (const Error& e) {
      rec.error = e.what();
      ++failed;
    }
    slots[i] = std::move(rec);
  };
  parallel_for(work.size(), options_a.parallel, job, [&] { return failed.load() > limit; });

  for (auto& s : slots) {
    if (s) result.records.push_back(std::move(*s));
  }
  sort_by_id(result.records);
  if (failed.load() > limit) {
    throw Error(ErrorKind::Run, "pairwise run aborted: " + std::to_string(failed.load()) + " of " +
                                    std::to_string(work.size()) + " instances failed");
  }

  std::map<Domain, std::vector<double>> credits;
  std::map<Domain, std::size_t> failures;
  for (const auto& r : result.records) {
    if (r.a_credit) {
      credits[r.domain].push_back(*r.a_credit);
    } else {
      ++failures[r.domain];
    }
  }
  for (const auto& [d, values] : credits) {
    WinRate w;
    w.domain = d;
    w.n = values.size();
    w.failed = failures[d];
    w.a_win_rate = mean(values);
    result.win_rates[d] = w;
  }
  return result;
}

void write_records(std::span<const EvalRecord> records, std::ostream& out) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

void write_pairwise_records(std::span<const PairwiseRecord> records, std::ostream& out) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

void write_cells_csv(std::span<const DomainBiasCell> cells, std::ostream& out) {
  out << "domain,bias,n,baseline_mean,biased_mean,pct_change\n";
  for (const auto& c : cells) {
    out << to_string(c.domain) << ',' << c.bias_label << ',' << c.n << ',' << format_fixed(c.baseline_mean, 4) << ','
        << format_fixed(c.biased_mean, 4) << ',' << format_fixed(c.pct_change, 2) << '\n';
  }
}

void write_win_rates_csv(const PairwiseResult& result, std::ostream& out) {
  out << "domain,bias,n,failed,a_win_rate\n";
  for (const auto& [d, w] : result.win_rates) {
    out << to_string(d) << ',' << result.a_label << ',' << w.n << ',' << w.failed << ','
        << format_fixed(w.a_win_rate, 4) << '\n';
  }
}

}  // namespace visbias
