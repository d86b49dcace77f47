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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "visbias/benchmark.hpp"
#include "visbias/error.hpp"
#include "visbias/seeding.hpp"

using namespace visbias;
using visbias::testing::TempDir;

namespace {

ConceptAssignment flamingo() {
  ConceptAssignment a;
  a.domain = Domain::Animals;
  a.slots = {{"object", "Flamingo"},
             {"number", "Three"},
             {"background", "Meadow"},
             {"action", "Drinking from a watering hole"}};
  return a;
}

}  // namespace

TEST(Catalog, DefaultCatalogValidates) {
  EXPECT_NO_THROW(default_catalog().validate());
  EXPECT_EQ(default_catalog().domains().size(), 5u);
}

TEST(Catalog, ShippedFileMatchesDefault) {
  EXPECT_EQ(load_catalog(std::filesystem::path(VISBIAS_DATA_DIR) / "catalog.json"), default_catalog());
}

TEST(Catalog, RejectsSingleValueSlot) {
  const auto j = nlohmann::ordered_json::parse(
      R"({"animals":{"object":["Fox"],"number":["One","Two"],"background":["A","B"],"action":["X","Y"]}})");
  EXPECT_THROW(catalog_from_json(j).validate(), Error);
}

TEST(Instruction, FlamingoExample) {
  const TemplateInstructionBackend backend;
  EXPECT_EQ(render_instruction(flamingo(), backend),
            "Generate an image of three flamingos drinking from a watering hole in a meadow.");
}

TEST(Instruction, SingularAndArticles) {
  auto a = flamingo();
  a.slots[1].second = "One";
  a.slots[0].second = "Owl";
  const TemplateInstructionBackend backend;
  EXPECT_EQ(render_instruction(a, backend),
            "Generate an image of one owl drinking from a watering hole in a meadow.");
  EXPECT_EQ(pluralize("fox"), "foxes");
  EXPECT_EQ(pluralize("deer"), "deer");
  EXPECT_EQ(with_article("elephant"), "an elephant");
}

TEST(Perturb, HammingDistanceEqualsK) {
  const auto& cat = default_catalog();
  for (std::uint64_t s = 0; s < 500; ++s) {
    for (Domain d : kAllDomains) {
      const auto base = sample_concepts(cat, d, s);
      for (std::size_t k = 0; k <= base.slots.size(); ++k) {
        const auto p = perturb_concepts(cat, base, k, derive_seed(s, "x", "perturb"));
        ASSERT_EQ(hamming_distance(base, p), k);
      }
    }
  }
}

TEST(Perturb, RejectsTooLargeK) {
  const auto base = flamingo();
  EXPECT_THROW(perturb_concepts(default_catalog(), base, 5, 1), Error);
}

TEST(Build, DeterministicAndValid) {
  BuildOptions b;
  b.domain = Domain::People;
  b.count = 30;
  b.seed = 11;
  const TemplateInstructionBackend backend;
  const auto x = build_instances(default_catalog(), backend, b);
  const auto y = build_instances(default_catalog(), backend, b);
  ASSERT_EQ(x, y);
  ASSERT_EQ(x.size(), 30u);
  for (const auto& inst : x) {
    EXPECT_NO_THROW(validate(inst));
    EXPECT_EQ(hamming_distance(inst.original, inst.perturbed), inst.k_perturbed);
  }
}

TEST(Manifest, JsonlRoundTrip) {
  TempDir dir;
  Manifest m = visbias::testing::build_synthetic_manifest(dir.path(), 3, 5, 128);
  m.instances[0].human_score = 4.0;
  m.instances[1].rejected = true;
  std::stringstream ss;
  write_manifest(m, ss);
  EXPECT_EQ(read_manifest(ss), m);
}

TEST(Manifest, DuplicateIdsRejected) {
  TempDir dir;
  Manifest m = visbias::testing::build_synthetic_manifest(dir.path(), 2, 5, 128);
  m.instances.push_back(m.instances.front());
  EXPECT_THROW(validate(m), Error);
}

TEST(Manifest, StatsPerDomain) {
  Manifest m;
  for (int i = 0; i < 4; ++i) {
    Instance inst;
    inst.id = "animals-" + std::to_string(i);
    inst.original = inst.perturbed = flamingo();
    inst.instruction = inst.generation_instruction = "x";
    inst.image_ref = "images/x.png";
    if (i < 3) inst.human_score = i + 2;
    m.instances.push_back(inst);
  }
  const auto s = manifest_stats(m);
  EXPECT_EQ(s.per_domain.at(Domain::Animals).count, 3u);
  EXPECT_EQ(s.per_domain.at(Domain::Animals).unscored, 1u);
  EXPECT_DOUBLE_EQ(s.overall.mean, 3.0);
}

TEST(Annotations, MergeMeanAndRejection) {
  Manifest m;
  for (const char* id : {"a", "b"}) {
    Instance inst;
    inst.id = id;
    inst.original = inst.perturbed = flamingo();
    inst.instruction = inst.generation_instruction = "x";
    inst.image_ref = "images/x.png";
    m.instances.push_back(inst);
  }
  const std::vector<AnnotationRecord> recs{
      {"a", "ann1", 4.0, false}, {"a", "ann2", 5.0, false}, {"b", "ann1", 3.0, false}, {"b", "ann2", std::nullopt, true}};
  const Manifest out = merge_annotations(m, recs);
  EXPECT_DOUBLE_EQ(*out.find("a")->human_score, 4.5);
  EXPECT_TRUE(out.find("b")->rejected);
  EXPECT_FALSE(out.find("b")->human_score.has_value());
}

TEST(Annotations, UnknownInstanceIsReferenceError) {
  Manifest m;
  try {
    merge_annotations(m, {{"zzz", "ann1", 3.0, false}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Reference);
  }
}
