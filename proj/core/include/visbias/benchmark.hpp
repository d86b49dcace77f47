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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "visbias/domain.hpp"

namespace visbias {

// ---------------------------------------------------------------------------
// Concept catalog

struct ConceptSlot {
  std::string name;
  std::vector<std::string> values;

  friend bool operator==(const ConceptSlot&, const ConceptSlot&) = default;
};

/// Per-domain ordered concept slots. Slot order is the file order and fixes
/// the order in which random draws are made.
class ConceptCatalog {
 public:
  ConceptCatalog() = default;

  void set_domain(Domain d, std::vector<ConceptSlot> slots);
  bool has_domain(Domain d) const { return domains_.contains(d); }
  const std::vector<ConceptSlot>& slots(Domain d) const;
  const ConceptSlot& slot(Domain d, const std::string& name) const;
  std::vector<Domain> domains() const;

  // Each domain defines 4-5 slots and every slot has at least two values.
  // Throws Error(Catalog).
  void validate() const;

  friend bool operator==(const ConceptCatalog&, const ConceptCatalog&) = default;

 private:
  std::map<Domain, std::vector<ConceptSlot>> domains_;
};

// {"animals": {"object": ["Flamingo", ...], ...}, ...}; key order is kept.
ConceptCatalog catalog_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const ConceptCatalog& catalog);
ConceptCatalog load_catalog(const std::filesystem::path& path);

// Small example catalog with the slot names the templates expect.
const ConceptCatalog& default_catalog();

// ---------------------------------------------------------------------------
// Assignments

struct ConceptAssignment {
  Domain domain = Domain::Animals;
  std::vector<std::pair<std::string, std::string>> slots;  // catalog order

  const std::string* find(const std::string& slot) const;
  std::map<std::string, std::string> as_map() const;
  friend bool operator==(const ConceptAssignment&, const ConceptAssignment&) = default;
};

// Number of slots whose values differ. Throws if slot names differ.
std::size_t hamming_distance(const ConceptAssignment& a, const ConceptAssignment& b);

ConceptAssignment sample_concepts(const ConceptCatalog& catalog, Domain domain, std::uint64_t seed);

// Replaces exactly k slots with a different catalog value each, leaving the
// rest untouched.
ConceptAssignment perturb_concepts(const ConceptCatalog& catalog, const ConceptAssignment& assignment,
                                   std::size_t k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Instruction generation

class InstructionBackend {
 public:
  virtual ~InstructionBackend() = default;
  virtual std::string render(const ConceptAssignment& assignment) const = 0;
};

/// Fills a per-domain sentence pattern. Placeholders are `{slot}` or
/// `{slot|filter|filter}` with filters lower, plural (agrees with the number
/// slot), article (prefix a/an) and upper_first.
class TemplateInstructionBackend final : public InstructionBackend {
 public:
  TemplateInstructionBackend();
  explicit TemplateInstructionBackend(std::map<Domain, std::string> patterns);

  std::string render(const ConceptAssignment& assignment) const override;
  const std::string& pattern(Domain d) const;

 private:
  std::map<Domain, std::string> patterns_;
};

std::string render_instruction(const ConceptAssignment& assignment, const InstructionBackend& backend);

// English helpers used by the template backend.
std::string pluralize(const std::string& noun);
std::string with_article(const std::string& phrase);

// ---------------------------------------------------------------------------
// Manifest

inline constexpr const char* kManifestSchemaVersion = "frame-manifest/1";

struct Instance {
  std::string id;
  Domain domain = Domain::Animals;
  ConceptAssignment original;
  ConceptAssignment perturbed;
  std::size_t k_perturbed = 0;
  std::string instruction;
  std::string generation_instruction;
  std::string image_ref;
  std::optional<double> human_score;
  std::optional<std::string> boxes_ref;
  bool rejected = false;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// k_perturbed matches the slot diff and k == 0 implies identical instructions.
void validate(const Instance& inst);

struct Manifest {
  std::string schema_version = kManifestSchemaVersion;
  ScoreScale scale;
  std::vector<Instance> instances;

  const Instance* find(const std::string& id) const;
  friend bool operator==(const Manifest&, const Manifest&) = default;
};

// Unique ids, valid instances, scores inside the scale.
void validate(const Manifest& manifest);

nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

// JSONL: a header line {"schema_version":..,"scale":{..}} then one Instance
// per line.
void write_manifest(const Manifest& manifest, std::ostream& out);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(std::istream& in);
Manifest read_manifest(const std::filesystem::path& path);

// Keeps only instances of one domain; other fields are copied.
Manifest filter_domain(const Manifest& manifest, Domain d);

// ---------------------------------------------------------------------------
// Statistics

struct ScoreStats {
  std::size_t count = 0;       // scored instances
  std::size_t unscored = 0;    // no human score yet
  std::size_t rejected = 0;    // flagged for regeneration
  double mean = 0.0;
  std::map<double, std::size_t> histogram;
};

struct ManifestStats {
  std::map<Domain, ScoreStats> per_domain;
  ScoreStats overall;
};

ManifestStats manifest_stats(const Manifest& manifest);

// ---------------------------------------------------------------------------
// Annotations

struct AnnotationRecord {
  std::string instance_id;
  std::string annotator_id;
  std::optional<double> score;
  bool rejected = false;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

enum class AggregationPolicy { Mean, Median };

AggregationPolicy parse_aggregation_policy(std::string_view name);

nlohmann::json to_json(const AnnotationRecord& r);
AnnotationRecord annotation_from_json(const nlohmann::json& j);
std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path);
void write_annotations(const std::vector<AnnotationRecord>& records, const std::filesystem::path& path);

// Rejected instances lose their score and are flagged; the remaining scores
// per instance are aggregated with `policy`.
Manifest merge_annotations(const Manifest& manifest, const std::vector<AnnotationRecord>& records,
                           AggregationPolicy policy = AggregationPolicy::Mean);

// ---------------------------------------------------------------------------
// Construction

struct BuildOptions {
  Domain domain = Domain::Animals;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::optional<std::size_t> k_max;  // default: slot count
  std::string id_prefix;             // default: domain name
  std::string image_dir = "images";  // relative to the manifest
};

// Sample -> perturb (k uniform in [0, k_max]) -> render, per instance.
// image_ref points at <image_dir>/<id>.png; images are produced separately.
std::vector<Instance> build_instances(const ConceptCatalog& catalog, const InstructionBackend& backend,
                                      const BuildOptions& options);

}  // namespace visbias
