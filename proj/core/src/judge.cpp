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

#include "visbias/judge.hpp"

#include <fstream>
#include <semaphore>

#include "backends.hpp"
#include "visbias/cache.hpp"
#include "visbias/digest.hpp"
#include "visbias/error.hpp"

namespace visbias {
namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::string_view to_string(BackendKind k) noexcept {
  switch (k) {
    case BackendKind::HttpChatVision: return "http_chat_vision";
    case BackendKind::MockScripted: return "mock_scripted";
    case BackendKind::MockSusceptible: return "mock_susceptible";
  }
  return "unknown";
}

BackendKind parse_backend_kind(std::string_view name) {
  if (name == "http_chat_vision") return BackendKind::HttpChatVision;
  if (name == "mock_scripted") return BackendKind::MockScripted;
  if (name == "mock_susceptible") return BackendKind::MockSusceptible;
  throw Error(ErrorKind::Config, "unknown judge backend kind '" + std::string(name) + "'");
}

void validate(const JudgeBackendConfig& cfg) {
  if (cfg.max_parallel < 1) throw Error(ErrorKind::Config, "max_parallel must be >= 1");
  if (!(cfg.temperature >= 0.0)) throw Error(ErrorKind::Config, "temperature must be >= 0");
  if (cfg.retry.max_attempts < 1) throw Error(ErrorKind::Config, "retry.max_attempts must be >= 1");
  if (!(cfg.retry.backoff_base_seconds >= 0.0)) {
    throw Error(ErrorKind::Config, "retry.backoff_base_seconds must be >= 0");
  }
  if (!(cfg.timeout_seconds > 0.0)) throw Error(ErrorKind::Config, "timeout_seconds must be > 0");
  if (cfg.max_tokens < 1) throw Error(ErrorKind::Config, "max_tokens must be >= 1");
  try {
    validate(cfg.scale);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  if (cfg.kind == BackendKind::HttpChatVision) {
    if (cfg.base_url.empty()) throw Error(ErrorKind::Config, "http_chat_vision needs base_url");
    if (cfg.model_id.empty()) throw Error(ErrorKind::Config, "http_chat_vision needs model_id");
  }
  if (!cfg.mock.is_object()) throw Error(ErrorKind::Config, "\"mock\" must be an object");
}

JudgeBackendConfig judge_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "judge config must be a JSON object");
  JudgeBackendConfig cfg;
  try {
    cfg.kind = parse_backend_kind(j.at("kind").get<std::string>());
    cfg.base_url = get_or<std::string>(j, "base_url", "");
    cfg.model_id = get_or<std::string>(j, "model_id", "");
    cfg.temperature = get_or<double>(j, "temperature", 0.0);
    cfg.max_parallel = get_or<int>(j, "max_parallel", 1);
    if (j.contains("retry")) {
      const auto& r = j.at("retry");
      cfg.retry.max_attempts = get_or<int>(r, "max_attempts", cfg.retry.max_attempts);
      cfg.retry.backoff_base_seconds = get_or<double>(r, "backoff_base_seconds", cfg.retry.backoff_base_seconds);
    }
    cfg.credential_env = get_or<std::string>(j, "credential_env", "");
    cfg.timeout_seconds = get_or<double>(j, "timeout_seconds", cfg.timeout_seconds);
    cfg.max_tokens = get_or<int>(j, "max_tokens", cfg.max_tokens);
    if (j.contains("scale")) {
      cfg.scale.min = j.at("scale").at("min").get<int>();
      cfg.scale.max = j.at("scale").at("max").get<int>();
    }
    if (j.contains("mock")) cfg.mock = j.at("mock");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed judge config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

nlohmann::json to_json(const JudgeBackendConfig& cfg) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(cfg.kind));
  if (!cfg.base_url.empty()) j["base_url"] = cfg.base_url;
  if (!cfg.model_id.empty()) j["model_id"] = cfg.model_id;
  j["temperature"] = cfg.temperature;
  j["max_parallel"] = cfg.max_parallel;
  j["retry"] = {{"max_attempts", cfg.retry.max_attempts},
                {"backoff_base_seconds", cfg.retry.backoff_base_seconds}};
  if (!cfg.credential_env.empty()) j["credential_env"] = cfg.credential_env;
  j["timeout_seconds"] = cfg.timeout_seconds;
  j["max_tokens"] = cfg.max_tokens;
  j["scale"] = {{"min", cfg.scale.min}, {"max", cfg.scale.max}};
  if (!cfg.mock.empty()) j["mock"] = cfg.mock;
  return j;
}

JudgeBackendConfig load_judge_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read judge config '" + path.string() + "'");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::Config, "judge config '" + path.string() + "' is not valid JSON");
  return judge_config_from_json(j);
}

std::string fingerprint(const JudgeBackendConfig& cfg) {
  if (cfg.kind == BackendKind::HttpChatVision) {
    return "http_chat_vision:" + cfg.model_id + ":t=" + nlohmann::json(cfg.temperature).dump();
  }
  // nlohmann::json keeps object keys sorted, so dump() is canonical.
  return std::string(to_string(cfg.kind)) + ":" + sha256_hex(cfg.mock.dump()).substr(0, 16);
}

nlohmann::json to_json(const ImageMeta& meta) {
  return {{"instance_id", meta.instance_id},
          {"domain", std::string(to_string(meta.domain))},
          {"recipe", to_json(meta.recipe)},
          {"variant", meta.variant}};
}

std::string JudgeBackend::complete(const JudgeRequest& request) {
  ++requests_;
  return do_complete(request);
}

std::unique_ptr<JudgeBackend> make_backend(const JudgeBackendConfig& cfg) {
  switch (cfg.kind) {
    case BackendKind::HttpChatVision: return detail::make_http_backend(cfg);
    case BackendKind::MockScripted: return detail::make_scripted_backend(cfg);
    case BackendKind::MockSusceptible: return detail::make_susceptible_backend(cfg);
  }
  throw Error(ErrorKind::Config, "unknown judge backend kind");
}

struct Judge::Slots {
  explicit Slots(int n) : sem(n) {}
  std::counting_semaphore<1024> sem;
};

Judge::Judge(JudgeBackendConfig cfg, std::shared_ptr<VerdictCache> cache, std::unique_ptr<JudgeBackend> backend)
    : cfg_(std::move(cfg)), cache_(std::move(cache)), backend_(std::move(backend)) {
  validate(cfg_);
  fingerprint_ = visbias::fingerprint(cfg_);
  if (!backend_) backend_ = make_backend(cfg_);
  slots_ = std::make_unique<Slots>(std::min(cfg_.max_parallel, 1024));
}

Judge::~Judge() = default;

std::size_t Judge::backend_requests() const noexcept { return backend_->request_count(); }

std::string Judge::key_for(const PromptPayload& payload, std::span<const RasterImage* const> images,
                           std::span<const ImageMeta* const> meta, std::string_view order_tag) const {
  std::vector<std::string> extra;
  if (backend_->uses_metadata()) {
    for (const ImageMeta* m : meta) extra.push_back(to_json(*m).dump());
  }
  return cache_key(fingerprint_, payload, images, order_tag, extra);
}

std::string Judge::call(const JudgeRequest& request) {
  slots_->sem.acquire();
  try {
    std::string raw = backend_->complete(request);
    slots_->sem.release();
    return raw;
  } catch (...) {
    slots_->sem.release();
    throw;
  }
}

JudgeVerdict Judge::score_single(const PromptPayload& payload, const RasterImage& image, const ImageMeta& meta) {
  if (payload.template_id == TemplateId::Pairwise) {
    throw Error(ErrorKind::Template, "score_single cannot use the pairwise template");
  }
  const RasterImage* images[] = {&image};
  const ImageMeta* metas[] = {&meta};
  std::string key;
  if (cache_) {
    key = key_for(payload, images, metas, "single");
    if (auto hit = cache_->get(key); hit && hit->kind == JudgeVerdict::Kind::Absolute) {
      ++hits_;
      return *hit;
    }
  }
  JudgeRequest req{&payload, {&image}, {&meta}, cfg_.scale};
  std::string raw = call(req);
  const double score = parse_score(raw, cfg_.scale);
  JudgeVerdict v = JudgeVerdict::absolute(score, std::move(raw));
  if (cache_) cache_->put(key, v);
  return v;
}

JudgeVerdict Judge::compare_pair(const PromptPayload& payload, const RasterImage& first, const ImageMeta& first_meta,
                                 const RasterImage& second, const ImageMeta& second_meta) {
  if (payload.template_id != TemplateId::Pairwise) {
    throw Error(ErrorKind::Template, "compare_pair needs the pairwise template");
  }
  const RasterImage* images[] = {&first, &second};
  const ImageMeta* metas[] = {&first_meta, &second_meta};
  const std::string order_tag = "pair:" + first_meta.variant + ">" + second_meta.variant;
  std::string key;
  if (cache_) {
    key = key_for(payload, images, metas, order_tag);
    if (auto hit = cache_->get(key); hit && hit->kind == JudgeVerdict::Kind::Preference) {
      ++hits_;
      return *hit;
    }
  }
  JudgeRequest req{&payload, {&first, &second}, {&first_meta, &second_meta}, cfg_.scale};
  std::string raw = call(req);
  const Preference p = parse_preference(raw);
  JudgeVerdict v = JudgeVerdict::pairwise(p, std::move(raw));
  if (cache_) cache_->put(key, v);
  return v;
}

}  // namespace visbias
