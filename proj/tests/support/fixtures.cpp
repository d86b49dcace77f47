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

#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "visbias/recipe.hpp"
#include "visbias/seeding.hpp"
#include "visbias/synthetic.hpp"

namespace visbias::testing {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

RasterImage noise_image(int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * height * 3);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng.below(256));
  return RasterImage(width, height, std::move(px));
}

Manifest build_synthetic_manifest(const std::filesystem::path& dir, std::size_t per_domain, std::uint64_t seed,
                                  int size) {
  const TemplateInstructionBackend backend;
  Manifest m;
  for (Domain d : kAllDomains) {
    BuildOptions b;
    b.domain = d;
    b.count = per_domain;
    b.seed = seed;
    for (auto& inst : build_instances(default_catalog(), backend, b)) m.instances.push_back(std::move(inst));
  }
  SyntheticImageOptions opts;
  opts.width = size;
  opts.height = size;
  for (auto& inst : m.instances) {
    const auto img = generate_placeholder_image(inst.perturbed, derive_seed(seed, inst.id, "image"), opts);
    write_png(img.image, dir / inst.image_ref);
    if (!img.boxes.empty()) {
      const std::string ref = "boxes/" + inst.id + ".json";
      std::filesystem::create_directories(dir / "boxes");
      write_file(dir / ref, to_json(BoxSidecar{inst.image_ref, img.boxes}).dump());
      inst.boxes_ref = ref;
    }
  }
  write_manifest(m, dir / "manifest.jsonl");
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace visbias::testing
