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

#include "visbias/cache.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "visbias/digest.hpp"
#include "visbias/error.hpp"

namespace visbias {

VerdictCache::VerdictCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    throw Error(ErrorKind::Io, "cannot create cache directory '" + dir_.string() + "'");
  }
}

std::filesystem::path VerdictCache::path_for(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<JudgeVerdict> VerdictCache::get(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  auto j = nlohmann::json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  try {
    JudgeVerdict v = verdict_from_json(j);
    v.cached = true;
    return v;
  } catch (const Error&) {
    return std::nullopt;
  }
}

void VerdictCache::put(const std::string& key, const JudgeVerdict& verdict) {
  static std::atomic<unsigned long> counter{0};
  const std::string body = to_json(verdict).dump(2) + "\n";
  std::lock_guard lock(write_mutex_);
  const auto tmp = dir_ / (".tmp-" + key + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out.flush()) throw Error(ErrorKind::Io, "cannot write cache entry '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_for(key), ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot store cache entry for " + key);
  }
}

std::string cache_key(std::string_view backend_fingerprint, const PromptPayload& payload,
                      std::span<const RasterImage* const> images, std::string_view order_tag,
                      std::span<const std::string> extra) {
  Sha256 h;
  h.add_field(std::string_view("visbias-verdict/1"));
  h.add_field(backend_fingerprint);
  h.add_field(to_string(payload.template_id));
  h.add_field(payload.rendered_text());
  h.add_field(std::to_string(images.size()));
  for (const RasterImage* img : images) {
    h.add_field(std::to_string(img->width()) + "x" + std::to_string(img->height()));
    h.add_field(img->bytes());
  }
  h.add_field(order_tag);
  for (const auto& e : extra) h.add_field(e);
  return h.hex_digest();
}

}  // namespace visbias
