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

#include "backends.hpp"
#include "visbias/error.hpp"
#include "visbias/judge.hpp"
#include "visbias/seeding.hpp"

namespace visbias {
namespace {

Susceptibility susceptibility_from_json(const nlohmann::json& j) {
  Susceptibility s;
  if (j.is_number()) {
    s.delta = j.get<double>();
    return s;
  }
  s.delta = j.at("delta").get<double>();
  if (j.contains("peak")) {
    const auto& p = j.at("peak");
    s.peak = p.is_string() ? static_cast<double>(static_cast<int>(parse_anchor(p.get<std::string>())))
                           : p.get<double>();
  }
  if (j.contains("width")) s.width = j.at("width").get<double>();
  if (!(s.width > 0.0)) throw Error(ErrorKind::Config, "susceptibility width must be > 0");
  return s;
}

std::map<BiasKind, Susceptibility> susceptibility_map(const nlohmann::json& j) {
  std::map<BiasKind, Susceptibility> out;
  for (const auto& [name, value] : j.items()) out[parse_bias_kind(name)] = susceptibility_from_json(value);
  return out;
}

void check_rule(const std::string& rule) {
  if (rule != "score" && rule != "first" && rule != "second") {
    throw Error(ErrorKind::Config, "pairwise_rule must be score, first or second");
  }
}

std::string score_reply(double score) { return nlohmann::json{{"score", score}}.dump(); }

std::string preference_reply(const std::string& rule, double first, double second) {
  std::string choice;
  if (rule == "first") {
    choice = "1";
  } else if (rule == "second") {
    choice = "2";
  } else if (std::abs(first - second) <= 1e-9) {
    choice = "tie";
  } else {
    choice = first > second ? "1" : "2";
  }
  return nlohmann::json{{"preference", choice}}.dump();
}

class SusceptibleBackend final : public JudgeBackend {
 public:
  explicit SusceptibleBackend(SusceptibleMockSpec spec) : spec_(std::move(spec)) {}
  bool uses_metadata() const noexcept override { return true; }

 protected:
  std::string do_complete(const JudgeRequest& req) override {
    if (req.meta.size() == 1) return score_reply(spec_.score(*req.meta[0], req.scale));
    if (req.meta.size() != 2) throw Error(ErrorKind::Transport, "mock judge expects one or two images");
    const double first = spec_.score(*req.meta[0], req.scale) + spec_.position_bias;
    const double second = spec_.score(*req.meta[1], req.scale);
    return preference_reply(spec_.pairwise_rule, first, second);
  }

 private:
  SusceptibleMockSpec spec_;
};

class ScriptedBackend final : public JudgeBackend {
 public:
  explicit ScriptedBackend(ScriptedMockSpec spec) : spec_(std::move(spec)) {}
  bool uses_metadata() const noexcept override { return true; }

 protected:
  std::string do_complete(const JudgeRequest& req) override {
    if (req.meta.size() == 1) {
      const auto& id = req.meta[0]->instance_id;
      if (auto it = spec_.replies.find(id); it != spec_.replies.end()) return it->second;
      return score_reply(spec_.score(*req.meta[0]));
    }
    if (req.meta.size() != 2) throw Error(ErrorKind::Transport, "mock judge expects one or two images");
    if (spec_.pairwise_rule != "score") return preference_reply(spec_.pairwise_rule, 0, 0);
    return preference_reply("score", spec_.score(*req.meta[0]), spec_.score(*req.meta[1]));
  }

 private:
  ScriptedMockSpec spec_;
};

}  // namespace

double Susceptibility::effect(double param) const {
  if (!peak) return delta;
  return delta * std::max(0.0, 1.0 - std::abs(param - *peak) / width);
}

double SusceptibleMockSpec::base_score(const std::string& instance_id) const {
  if (auto it = base_scores.find(instance_id); it != base_scores.end()) return it->second;
  return base_values[derive_seed(0, instance_id, "mock-base") % base_values.size()];
}

double SusceptibleMockSpec::total_delta(const ImageMeta& meta) const {
  const auto overrides = domain_overrides.find(meta.domain);
  double total = 0.0;
  for (const auto& step : meta.recipe.steps) {
    const Susceptibility* s = nullptr;
    if (overrides != domain_overrides.end()) {
      if (auto it = overrides->second.find(step.kind); it != overrides->second.end()) s = &it->second;
    }
    if (s == nullptr) {
      if (auto it = susceptibility.find(step.kind); it != susceptibility.end()) s = &it->second;
    }
    if (s != nullptr) total += s->effect(primary_parameter(step));
  }
  if (combo_cap) total = std::min(total, *combo_cap);
  return total;
}

double SusceptibleMockSpec::score(const ImageMeta& meta, ScoreScale scale) const {
  const double raw = base_score(meta.instance_id) + total_delta(meta);
  return std::clamp(raw, static_cast<double>(scale.min), static_cast<double>(scale.max));
}

SusceptibleMockSpec susceptible_spec_from_json(const nlohmann::json& j) {
  SusceptibleMockSpec spec;
  try {
    if (j.contains("base_values")) spec.base_values = j.at("base_values").get<std::vector<double>>();
    if (spec.base_values.empty()) throw Error(ErrorKind::Config, "base_values must not be empty");
    if (j.contains("base_scores")) spec.base_scores = j.at("base_scores").get<std::map<std::string, double>>();
    if (j.contains("susceptibility")) spec.susceptibility = susceptibility_map(j.at("susceptibility"));
    if (j.contains("domain_overrides")) {
      for (const auto& [name, value] : j.at("domain_overrides").items()) {
        spec.domain_overrides[parse_domain(name)] = susceptibility_map(value);
      }
    }
    if (j.contains("combo_cap")) spec.combo_cap = j.at("combo_cap").get<double>();
    if (j.contains("position_bias")) spec.position_bias = j.at("position_bias").get<double>();
    if (j.contains("pairwise_rule")) spec.pairwise_rule = j.at("pairwise_rule").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed mock_susceptible spec: ") + e.what());
  }
  check_rule(spec.pairwise_rule);
  return spec;
}

double ScriptedMockSpec::score(const ImageMeta& meta) const {
  if (auto it = scores.find(meta.instance_id); it != scores.end()) return it->second;
  if (default_score) return *default_score;
  throw Error(ErrorKind::Transport, "mock_scripted has no score for '" + meta.instance_id + "'");
}

ScriptedMockSpec scripted_spec_from_json(const nlohmann::json& j) {
  ScriptedMockSpec spec;
  try {
    if (j.contains("scores")) spec.scores = j.at("scores").get<std::map<std::string, double>>();
    if (j.contains("replies")) spec.replies = j.at("replies").get<std::map<std::string, std::string>>();
    if (j.contains("default_score")) spec.default_score = j.at("default_score").get<double>();
    if (j.contains("pairwise_rule")) spec.pairwise_rule = j.at("pairwise_rule").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed mock_scripted spec: ") + e.what());
  }
  check_rule(spec.pairwise_rule);
  return spec;
}

namespace detail {

std::unique_ptr<JudgeBackend> make_scripted_backend(const JudgeBackendConfig& cfg) {
  return std::make_unique<ScriptedBackend>(scripted_spec_from_json(cfg.mock));
}

std::unique_ptr<JudgeBackend> make_susceptible_backend(const JudgeBackendConfig& cfg) {
  return std::make_unique<SusceptibleBackend>(susceptible_spec_from_json(cfg.mock));
}

}  // namespace detail
}  // namespace visbias
