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

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <unistd.h>

#include <gtest/gtest.h>
#include <httplib.h>

#include "visbias/error.hpp"
#include "visbias/cache.hpp"
#include "visbias/judge.hpp"

using namespace visbias;

namespace {

// Local chat-completions stand-in. The first `failures` requests get
// `fail_status`, later ones a fixed reply.
class FakeEndpoint {
 public:
  FakeEndpoint(int failures, int fail_status, std::string reply)
      : failures_(failures), fail_status_(fail_status), reply_(std::move(reply)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu_);
        bodies_.push_back(req.body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      if (hits_++ < failures_) {
        res.status = fail_status_;
        res.set_content("{\"error\":\"busy\"}", "application/json");
        return;
      }
      nlohmann::json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", reply_}}}}}}};
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int hits() const { return hits_.load(); }
  nlohmann::json body(std::size_t i) const {
    std::lock_guard lock(mu_);
    return nlohmann::json::parse(bodies_.at(i));
  }
  std::string auth(std::size_t i) const {
    std::lock_guard lock(mu_);
    return auth_.at(i);
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int failures_;
  int fail_status_;
  std::string reply_;
  std::atomic<int> hits_{0};
  mutable std::mutex mu_;
  std::vector<std::string> bodies_;
  std::vector<std::string> auth_;
};

JudgeBackendConfig http_config(const std::string& url) {
  JudgeBackendConfig cfg;
  cfg.kind = BackendKind::HttpChatVision;
  cfg.base_url = url;
  cfg.model_id = "vision-test";
  cfg.retry.max_attempts = 3;
  cfg.retry.backoff_base_seconds = 0.0;
  cfg.timeout_seconds = 10;
  return cfg;
}

PromptPayload payload() {
  return render_prompt(PromptLibrary::builtin().get(TemplateId::Standard), "Two owls on a branch");
}

}  // namespace

TEST(HttpJudge, WireFormat) {
  FakeEndpoint server(0, 500, "Alignment is good. {\"score\": 4}");
  ::setenv("VISBIAS_TEST_KEY", "sk-test-123", 1);
  auto cfg = http_config(server.base_url());
  cfg.credential_env = "VISBIAS_TEST_KEY";
  Judge judge(cfg);
  const RasterImage img(4, 4, Rgb{9, 9, 9});
  const auto v = judge.score_single(payload(), img, ImageMeta{"a", Domain::Animals, {}, {}});
  EXPECT_EQ(v.score, 4.0);
  EXPECT_EQ(server.hits(), 1);
  EXPECT_EQ(server.auth(0), "Bearer sk-test-123");
  EXPECT_EQ(judge.fingerprint().find("sk-test"), std::string::npos);

  const auto body = server.body(0);
  EXPECT_EQ(body["model"], "vision-test");
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  const auto& content = body["messages"][1]["content"];
  bool saw_image = false, saw_instruction = false;
  for (const auto& part : content) {
    if (part["type"] == "image_url") {
      saw_image = true;
      EXPECT_EQ(part["image_url"]["url"].get<std::string>().rfind("data:image/png;base64,", 0), 0u);
    } else if (part["text"].get<std::string>().find("Two owls on a branch") != std::string::npos) {
      saw_instruction = true;
    }
  }
  EXPECT_TRUE(saw_image);
  EXPECT_TRUE(saw_instruction);
  ::unsetenv("VISBIAS_TEST_KEY");
}

TEST(HttpJudge, RetriesServerErrors) {
  FakeEndpoint server(2, 503, "{\"score\": 2}");
  Judge judge(http_config(server.base_url()));
  const RasterImage img(4, 4);
  EXPECT_EQ(judge.score_single(payload(), img, ImageMeta{"a", Domain::Animals, {}, {}}).score, 2.0);
  EXPECT_EQ(server.hits(), 3);
  EXPECT_EQ(judge.backend_requests(), 1u);
}

TEST(HttpJudge, RetriesRateLimitThenGivesUp) {
  FakeEndpoint server(10, 429, "{\"score\": 2}");
  Judge judge(http_config(server.base_url()));
  const RasterImage img(4, 4);
  try {
    judge.score_single(payload(), img, ImageMeta{"a", Domain::Animals, {}, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Transport);
  }
  EXPECT_EQ(server.hits(), 3);
}

TEST(HttpJudge, ClientErrorsAreNotRetried) {
  FakeEndpoint server(10, 400, "{\"score\": 2}");
  Judge judge(http_config(server.base_url()));
  const RasterImage img(4, 4);
  EXPECT_THROW(judge.score_single(payload(), img, ImageMeta{"a", Domain::Animals, {}, {}}), Error);
  EXPECT_EQ(server.hits(), 1);
}

TEST(HttpJudge, MissingCredentialIsConfigError) {
  ::unsetenv("VISBIAS_MISSING_KEY");
  auto cfg = http_config("http://127.0.0.1:9/v1");
  cfg.credential_env = "VISBIAS_MISSING_KEY";
  try {
    Judge judge(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
}

TEST(HttpJudge, MetadataDoesNotEnterTheCacheKey) {
  FakeEndpoint server(0, 500, "{\"score\": 5}");
  const auto dir = std::filesystem::temp_directory_path() / ("visbias-http-cache-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  auto cache = std::make_shared<VerdictCache>(dir);
  Judge judge(http_config(server.base_url()), cache);
  const RasterImage img(4, 4);
  judge.score_single(payload(), img, ImageMeta{"a", Domain::Animals, {}, {}});
  EXPECT_TRUE(judge.score_single(payload(), img, ImageMeta{"b", Domain::People, {}, {}}).cached);
  EXPECT_EQ(server.hits(), 1);
  std::filesystem::remove_all(dir);
}
