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

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "visbias/bias.hpp"
#include "visbias/domain.hpp"
#include "visbias/image.hpp"
#include "visbias/prompts.hpp"
#include "visbias/recipe.hpp"
#include "visbias/verdict.hpp"

namespace visbias {

enum class BackendKind { HttpChatVision, MockScripted, MockSusceptible };

std::string_view to_string(BackendKind k) noexcept;
BackendKind parse_backend_kind(std::string_view name);

struct RetryPolicy {
  int max_attempts = 5;
  double backoff_base_seconds = 1.0;  // doubles after every failed attempt
};

/// Judge configuration file. `mock` holds the mock spec for mock kinds and is
/// ignored by the http backend.
struct JudgeBackendConfig {
  BackendKind kind = BackendKind::MockSusceptible;
  std::string base_url;
  std::string model_id;
  double temperature = 0.0;
  int max_parallel = 1;
  RetryPolicy retry;
  std::string credential_env;  // name of the variable, never its value
  double timeout_seconds = 120.0;
  int max_tokens = 512;
  ScoreScale scale;
  nlohmann::json mock = nlohmann::json::object();
};

void validate(const JudgeBackendConfig& cfg);
JudgeBackendConfig judge_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const JudgeBackendConfig& cfg);
JudgeBackendConfig load_judge_config(const std::filesystem::path& path);

// Identifies what produces the verdicts: model id for http, kind plus a
// digest of the mock spec otherwise. Credentials never enter it.
std::string fingerprint(const JudgeBackendConfig& cfg);

// ---------------------------------------------------------------------------
// Requests

// What the harness knows about a judged image. Mocks score from this; the
// http backend ignores it.
struct ImageMeta {
  std::string instance_id;
  Domain domain = Domain::Animals;
  BiasRecipe recipe;
  std::string variant;  // "A"/"B" in pairwise runs, empty otherwise
};

nlohmann::json to_json(const ImageMeta& meta);

struct JudgeRequest {
  const PromptPayload* payload = nullptr;
  std::vector<const RasterImage*> images;  // presentation order
  std::vector<const ImageMeta*> meta;      // parallel to images
  ScoreScale scale;
};

class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;

  // Raw reply text. Counts every call that reaches the backend.
  std::string complete(const JudgeRequest& request);
  std::size_t request_count() const noexcept { return requests_.load(); }

  // True when the reply depends on ImageMeta, which then joins the cache key.
  virtual bool uses_metadata() const noexcept { return false; }

 protected:
  virtual std::string do_complete(const JudgeRequest& request) = 0;

 private:
  std::atomic<std::size_t> requests_{0};
};

std::unique_ptr<JudgeBackend> make_backend(const JudgeBackendConfig& cfg);

// ---------------------------------------------------------------------------
// Mock backends

/// One configured susceptibility. With a peak, the delta tapers linearly to 0
/// at |param - peak| >= width, where param is primary_parameter(step).
struct Susceptibility {
  double delta = 0.0;
  std::optional<double> peak;
  double width = 1.0;

  double effect(double param) const;
};

struct SusceptibleMockSpec {
  std::vector<double> base_values{1, 2, 3, 4};     // picked by a hash of the id
  std::map<std::string, double> base_scores;       // explicit per-id base
  std::map<BiasKind, Susceptibility> susceptibility;
  std::map<Domain, std::map<BiasKind, Susceptibility>> domain_overrides;
  std::optional<double> combo_cap;                 // bound on the summed delta
  double position_bias = 0.0;                      // added to the first image
  // "score" compares mock scores; "first"/"second" always pick that position.
  std::string pairwise_rule = "score";

  double base_score(const std::string& instance_id) const;
  double total_delta(const ImageMeta& meta) const;
  double score(const ImageMeta& meta, ScoreScale scale) const;
};

SusceptibleMockSpec susceptible_spec_from_json(const nlohmann::json& j);

struct ScriptedMockSpec {
  std::map<std::string, double> scores;       // instance id -> score
  std::map<std::string, std::string> replies; // instance id -> verbatim reply
  std::optional<double> default_score;
  std::string pairwise_rule = "score";        // as in SusceptibleMockSpec

  double score(const ImageMeta& meta) const;
};

ScriptedMockSpec scripted_spec_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Facade

class VerdictCache;

/// Shared by all workers of a run. Cache lookups happen before the backend is
/// touched; in-flight backend calls are bounded by max_parallel.
class Judge {
 public:
  Judge(JudgeBackendConfig cfg, std::shared_ptr<VerdictCache> cache = nullptr,
        std::unique_ptr<JudgeBackend> backend = nullptr);
  ~Judge();

  JudgeVerdict score_single(const PromptPayload& payload, const RasterImage& image, const ImageMeta& meta);
  JudgeVerdict compare_pair(const PromptPayload& payload, const RasterImage& first, const ImageMeta& first_meta,
                            const RasterImage& second, const ImageMeta& second_meta);

  const JudgeBackendConfig& config() const noexcept { return cfg_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  std::size_t backend_requests() const noexcept;
  std::size_t cache_hits() const noexcept { return hits_.load(); }

 private:
  struct Slots;

  std::string key_for(const PromptPayload& payload, std::span<const RasterImage* const> images,
                      std::span<const ImageMeta* const> meta, std::string_view order_tag) const;
  std::string call(const JudgeRequest& request);

  JudgeBackendConfig cfg_;
  std::string fingerprint_;
  std::shared_ptr<VerdictCache> cache_;
  std::unique_ptr<JudgeBackend> backend_;
  std::unique_ptr<Slots> slots_;
  std::atomic<std::size_t> hits_{0};
};

}  // namespace visbias
