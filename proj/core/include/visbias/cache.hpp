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
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "visbias/image.hpp"
#include "visbias/prompts.hpp"
#include "visbias/verdict.hpp"

namespace visbias {

/// Content-addressed verdict store: one JSON file per digest under `dir`.
/// Readers never block each other; inserts go through a temp file and rename.
class VerdictCache {
 public:
  explicit VerdictCache(std::filesystem::path dir);

  std::optional<JudgeVerdict> get(const std::string& key) const;
  void put(const std::string& key, const JudgeVerdict& verdict);

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;

  std::filesystem::path dir_;
  std::mutex write_mutex_;
};

/// SHA-256 over length-prefixed fields: backend fingerprint, template id,
/// rendered prompt text, each image's size and raw RGB bytes, the order tag
/// and any extra fields (mock metadata).
std::string cache_key(std::string_view backend_fingerprint, const PromptPayload& payload,
                      std::span<const RasterImage* const> images, std::string_view order_tag,
                      std::span<const std::string> extra = {});

}  // namespace visbias
