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

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "backends.hpp"
#include "visbias/digest.hpp"
#include "visbias/error.hpp"

namespace visbias {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // request path for chat completions
};

Endpoint split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::Config, "base_url '" + url + "' has no scheme");
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorKind::Config, "base_url scheme must be http or https");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  e.path = path + "/chat/completions";
  return e;
}

std::string data_url(const RasterImage& img) {
  return "data:image/png;base64," + base64_encode(encode_png(img));
}

std::string reply_text(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::Transport, "judge endpoint returned non-JSON body");
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    std::string text;
    for (const auto& part : content) {
      if (part.contains("text")) text += part.at("text").get<std::string>();
    }
    return text;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Transport, std::string("unexpected chat-completions response: ") + e.what());
  }
}

class HttpBackend final : public JudgeBackend {
 public:
  HttpBackend(const JudgeBackendConfig& cfg, std::string credential)
      : cfg_(cfg), endpoint_(split_base_url(cfg.base_url)), credential_(std::move(credential)) {}

  static nlohmann::json build_body(const JudgeBackendConfig& cfg, const JudgeRequest& req) {
    nlohmann::json content = nlohmann::json::array();
    for (const auto& part : req.payload->parts) {
      if (part.kind == MessagePart::Kind::Text) {
        content.push_back({{"type", "text"}, {"text", part.text}});
      } else {
        if (part.image_index < 0 || static_cast<std::size_t>(part.image_index) >= req.images.size()) {
          throw Error(ErrorKind::Template, "prompt refers to a missing image slot");
        }
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url(*req.images[part.image_index])}}}});
      }
    }
    nlohmann::json messages = nlohmann::json::array();
    if (!req.payload->system.empty()) messages.push_back({{"role", "system"}, {"content", req.payload->system}});
    messages.push_back({{"role", "user"}, {"content", content}});
    return {{"model", cfg.model_id},
            {"temperature", cfg.temperature},
            {"max_tokens", cfg.max_tokens},
            {"messages", messages}};
  }

 protected:
  std::string do_complete(const JudgeRequest& req) override {
    const std::string body = build_body(cfg_, req).dump();
    httplib::Headers headers;
    if (!credential_.empty()) headers.emplace("Authorization", "Bearer " + credential_);

    std::string last_error;
    for (int attempt = 1; attempt <= cfg_.retry.max_attempts; ++attempt) {
      if (attempt > 1) {
        const double wait = cfg_.retry.backoff_base_seconds * std::pow(2.0, attempt - 2);
        std::this_thread::sleep_for(std::chrono::duration<double>(wait));
      }
      httplib::Client client(endpoint_.origin);
      const auto timeout = std::chrono::duration<double>(cfg_.timeout_seconds);
      client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      auto res = client.Post(endpoint_.path, headers, body, "application/json");
      if (!res) {
        last_error = "connection failed (" + httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status == 200) return reply_text(res->body);
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status != 429 && res->status < 500) {
        throw Error(ErrorKind::Transport, "judge endpoint rejected the request: " + last_error + " " +
                                              res->body.substr(0, 200));
      }
    }
    throw Error(ErrorKind::Transport, "judge request failed after " + std::to_string(cfg_.retry.max_attempts) +
                                          " attempt(s): " + last_error);
  }

 private:
  JudgeBackendConfig cfg_;
  Endpoint endpoint_;
  std::string credential_;
};

}  // namespace

namespace detail {

std::unique_ptr<JudgeBackend> make_http_backend(const JudgeBackendConfig& cfg) {
  std::string credential;
  if (!cfg.credential_env.empty()) {
    const char* value = std::getenv(cfg.credential_env.c_str());
    if (value == nullptr || *value == '\0') {
      throw Error(ErrorKind::Config, "credential variable " + cfg.credential_env + " is not set");
    }
    credential = value;
  }
  return std::make_unique<HttpBackend>(cfg, std::move(credential));
}

}  // namespace detail
}  // namespace visbias
