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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "visbias/benchmark.hpp"
#include "visbias/error.hpp"
#include "visbias/seeding.hpp"

namespace visbias {
namespace {

using ojson = nlohmann::ordered_json;

ojson slots_to_json(const ConceptAssignment& a) {
  ojson j = ojson::object();
  for (const auto& [k, v] : a.slots) j[k] = v;
  return j;
}

ConceptAssignment slots_from_json(Domain d, const ojson& j) {
  ConceptAssignment a;
  a.domain = d;
  for (const auto& [k, v] : j.items()) a.slots.emplace_back(k, v.get<std::string>());
  return a;
}

std::string format_id(const std::string& prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04zu", i);
  return prefix + "-" + buf;
}

// Neumaier-compensated sum keeps the mean exact for any realistic manifest.
double compensated_mean(const std::vector<double>& xs) {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  return (sum + c) / static_cast<double>(xs.size());
}

}  // namespace

void validate(const Instance& inst) {
  if (inst.id.empty()) throw Error(ErrorKind::Validation, "instance id is empty");
  if (inst.original.domain != inst.domain || inst.perturbed.domain != inst.domain) {
    throw Error(ErrorKind::Validation, "instance " + inst.id + ": assignment domain mismatch");
  }
  const std::size_t diff = hamming_distance(inst.original, inst.perturbed);
  if (diff != inst.k_perturbed) {
    throw Error(ErrorKind::Validation, "instance " + inst.id + ": k_perturbed is " +
                                           std::to_string(inst.k_perturbed) + " but " +
                                           std::to_string(diff) + " slots differ");
  }
  if (inst.k_perturbed == 0 && inst.instruction != inst.generation_instruction) {
    throw Error(ErrorKind::Validation,
                "instance " + inst.id + ": unperturbed instance has differing instructions");
  }
}

const Instance* Manifest::find(const std::string& id) const {
  for (const auto& i : instances) {
    if (i.id == id) return &i;
  }
  return nullptr;
}

void validate(const Manifest& manifest) {
  validate(manifest.scale);
  std::set<std::string> ids;
  for (const auto& inst : manifest.instances) {
    validate(inst);
    if (!ids.insert(inst.id).second) throw Error(ErrorKind::Validation, "duplicate instance id " + inst.id);
    if (inst.human_score && !manifest.scale.contains(*inst.human_score)) {
      throw Error(ErrorKind::Validation, "instance " + inst.id + ": human score outside the scale");
    }
  }
}

namespace {

ojson instance_to_ojson(const Instance& inst) {
  ojson j;
  j["id"] = inst.id;
  j["domain"] = std::string(to_string(inst.domain));
  j["original"] = slots_to_json(inst.original);
  j["perturbed"] = slots_to_json(inst.perturbed);
  j["k_perturbed"] = inst.k_perturbed;
  j["instruction"] = inst.instruction;
  j["generation_instruction"] = inst.generation_instruction;
  j["image_ref"] = inst.image_ref;
  j["human_score"] = inst.human_score ? ojson(*inst.human_score) : ojson(nullptr);
  j["boxes_ref"] = inst.boxes_ref ? ojson(*inst.boxes_ref) : ojson(nullptr);
  if (inst.rejected) j["rejected"] = true;
  return j;
}

Instance instance_from_ojson(const ojson& j) {
  try {
    Instance inst;
    inst.id = j.at("id").get<std::string>();
    inst.domain = parse_domain(j.at("domain").get<std::string>());
    inst.original = slots_from_json(inst.domain, j.at("original"));
    inst.perturbed = slots_from_json(inst.domain, j.at("perturbed"));
    inst.k_perturbed = j.at("k_perturbed").get<std::size_t>();
    inst.instruction = j.at("instruction").get<std::string>();
    inst.generation_instruction = j.value("generation_instruction", inst.instruction);
    inst.image_ref = j.at("image_ref").get<std::string>();
    if (j.contains("human_score") && !j["human_score"].is_null()) inst.human_score = j["human_score"].get<double>();
    if (j.contains("boxes_ref") && !j["boxes_ref"].is_null()) inst.boxes_ref = j["boxes_ref"].get<std::string>();
    inst.rejected = j.value("rejected", false);
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("malformed instance: ") + e.what());
  }
}

}  // namespace

nlohmann::json to_json(const Instance& inst) {
  return nlohmann::json::parse(instance_to_ojson(inst).dump());
}

Instance instance_from_json(const nlohmann::json& j) {
  return instance_from_ojson(ojson::parse(j.dump()));
}

void write_manifest(const Manifest& manifest, std::ostream& out) {
  ojson header;
  header["schema_version"] = manifest.schema_version;
  header["scale"] = {{"min", manifest.scale.min}, {"max", manifest.scale.max}};
  out << header.dump() << '\n';
  for (const auto& inst : manifest.instances) out << instance_to_ojson(inst).dump() << '\n';
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write manifest '" + path.string() + "'");
  write_manifest(manifest, out);
}

Manifest read_manifest(std::istream& in) {
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Validation, "manifest line " + std::to_string(lineno) + " is not JSON");
    }
    if (!header_seen && j.contains("schema_version")) {
      header_seen = true;
      m.schema_version = j["schema_version"].get<std::string>();
      if (j.contains("scale")) {
        m.scale.min = j["scale"].at("min").get<int>();
        m.scale.max = j["scale"].at("max").get<int>();
      }
      continue;
    }
    try {
      m.instances.push_back(instance_from_ojson(j));
    } catch (const Error& e) {
      throw Error(ErrorKind::Validation, "manifest line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header_seen) throw Error(ErrorKind::Validation, "manifest lacks a schema_version header line");
  validate(m);
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest '" + path.string() + "'");
  return read_manifest(in);
}

Manifest filter_domain(const Manifest& manifest, Domain d) {
  Manifest out;
  out.schema_version = manifest.schema_version;
  out.scale = manifest.scale;
  for (const auto& i : manifest.instances) {
    if (i.domain == d) out.instances.push_back(i);
  }
  return out;
}

ManifestStats manifest_stats(const Manifest& manifest) {
  if (manifest.instances.empty()) throw Error(ErrorKind::Stats, "manifest is empty");
  ManifestStats stats;
  std::map<Domain, std::vector<double>> by_domain;
  std::vector<double> all;
  for (const auto& inst : manifest.instances) {
    ScoreStats& s = stats.per_domain[inst.domain];
    if (inst.rejected) {
      ++s.rejected;
      ++stats.overall.rejected;
    } else if (!inst.human_score) {
      ++s.unscored;
      ++stats.overall.unscored;
    } else {
      const double v = *inst.human_score;
      by_domain[inst.domain].push_back(v);
      all.push_back(v);
      ++s.histogram[v];
      ++stats.overall.histogram[v];
    }
  }
  for (auto& [d, s] : stats.per_domain) {
    const auto& xs = by_domain[d];
    s.count = xs.size();
    s.mean = xs.empty() ? 0.0 : compensated_mean(xs);
  }
  stats.overall.count = all.size();
  stats.overall.mean = all.empty() ? 0.0 : compensated_mean(all);
  return stats;
}

AggregationPolicy parse_aggregation_policy(std::string_view name) {
  if (name == "mean") return AggregationPolicy::Mean;
  if (name == "median") return AggregationPolicy::Median;
  throw Error(ErrorKind::Parameter, "unknown aggregation policy '" + std::string(name) + "'");
}

nlohmann::json to_json(const AnnotationRecord& r) {
  nlohmann::json j = {{"instance_id", r.instance_id}, {"annotator_id", r.annotator_id}};
  j["score"] = r.score ? nlohmann::json(*r.score) : nlohmann::json(nullptr);
  j["rejected"] = r.rejected;
  return j;
}

AnnotationRecord annotation_from_json(const nlohmann::json& j) {
  AnnotationRecord r;
  try {
    r.instance_id = j.at("instance_id").get<std::string>();
    r.annotator_id = j.value("annotator_id", std::string());
    if (j.contains("score") && !j["score"].is_null()) r.score = j["score"].get<double>();
    r.rejected = j.value("rejected", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("malformed annotation: ") + e.what());
  }
  if (r.rejected == r.score.has_value()) {
    throw Error(ErrorKind::Validation, "annotation for " + r.instance_id +
                                           ": score must be present exactly when not rejected");
  }
  return r;
}

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open annotations '" + path.string() + "'");
  std::vector<AnnotationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(annotation_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorKind::Validation, path.string() + ":" + std::to_string(lineno) + " is not JSON");
    }
  }
  return out;
}

void write_annotations(const std::vector<AnnotationRecord>& records, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

Manifest merge_annotations(const Manifest& manifest, const std::vector<AnnotationRecord>& records,
                           AggregationPolicy policy) {
  std::map<std::string, std::vector<const AnnotationRecord*>> by_id;
  for (const auto& r : records) {
    if (manifest.find(r.instance_id) == nullptr) {
      throw Error(ErrorKind::Reference, "annotation refers to unknown instance '" + r.instance_id + "'");
    }
    if (r.rejected == r.score.has_value()) {
      throw Error(ErrorKind::Validation, "annotation for " + r.instance_id +
                                             ": score must be present exactly when not rejected");
    }
    if (r.score && !manifest.scale.contains(*r.score)) {
      throw Error(ErrorKind::Validation, "annotation for " + r.instance_id + " is outside the score scale");
    }
    by_id[r.instance_id].push_back(&r);
  }
  Manifest out = manifest;
  for (auto& inst : out.instances) {
    auto it = by_id.find(inst.id);
    if (it == by_id.end()) continue;
    const auto& recs = it->second;
    const bool rejected = std::any_of(recs.begin(), recs.end(), [](const auto* r) { return r->rejected; });
    if (rejected) {
      inst.rejected = true;
      inst.human_score.reset();
      continue;
    }
    std::vector<double> scores;
    for (const auto* r : recs) scores.push_back(*r->score);
    if (policy == AggregationPolicy::Mean) {
      inst.human_score = compensated_mean(scores);
    } else {
      std::sort(scores.begin(), scores.end());
      const std::size_t n = scores.size();
      inst.human_score = n % 2 == 1 ? scores[n / 2] : (scores[n / 2 - 1] + scores[n / 2]) / 2.0;
    }
    inst.rejected = false;
  }
  return out;
}

std::vector<Instance> build_instances(const ConceptCatalog& catalog, const InstructionBackend& backend,
                                      const BuildOptions& options) {
  const auto& slots = catalog.slots(options.domain);
  const std::size_t k_max = std::min(options.k_max.value_or(slots.size()), slots.size());
  const std::string prefix = options.id_prefix.empty() ? std::string(to_string(options.domain)) : options.id_prefix;
  std::vector<Instance> out;
  out.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    Instance inst;
    inst.id = format_id(prefix, i);
    inst.domain = options.domain;
    inst.original = sample_concepts(catalog, options.domain, derive_seed(options.seed, inst.id, "sample"));
    Rng k_rng(derive_seed(options.seed, inst.id, "k"));
    inst.k_perturbed = static_cast<std::size_t>(k_rng.below(k_max + 1));
    inst.perturbed = perturb_concepts(catalog, inst.original, inst.k_perturbed,
                                      derive_seed(options.seed, inst.id, "perturb"));
    inst.instruction = render_instruction(inst.original, backend);
    inst.generation_instruction =
        inst.k_perturbed == 0 ? inst.instruction : render_instruction(inst.perturbed, backend);
    inst.image_ref = options.image_dir + "/" + inst.id + ".png";
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace visbias
