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
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "visbias/benchmark.hpp"
#include "visbias/cache.hpp"
#include "visbias/judge.hpp"
#include "visbias/protocols.hpp"
#include "run_log.hpp"

namespace visbias::cli {

// State shared between the parser callbacks and the selected command.
struct Context {
  std::ostream& out;
  std::ostream& err;
  std::function<int()> action;
  RunManifestEntry entry;
  std::vector<std::filesystem::path> config_files;
  std::optional<std::filesystem::path> run_log;  // set by commands that write outputs
};

void register_bias(CLI::App& app, Context& ctx);
void register_bench(CLI::App& app, Context& ctx);
void register_eval(CLI::App& app, Context& ctx);
void register_search(CLI::App& app, Context& ctx);
void register_report(CLI::App& app, Context& ctx);

// Helpers shared by the command files.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json(const std::filesystem::path& path);
std::filesystem::path image_root_for(const std::filesystem::path& manifest_path);
std::shared_ptr<VerdictCache> open_cache(const std::string& dir);

// Options common to every command that queries a judge.
struct JudgeOptions {
  std::string manifest;
  std::string judge;
  std::string cache;
  std::string prompts_dir;
  std::string out_dir;
  int parallel = 0;  // 0: the judge's max_parallel
  bool timestamps = false;
};

void add_judge_options(CLI::App* sub, JudgeOptions& o);

struct JudgeSession {
  Manifest manifest;
  std::filesystem::path image_root;
  std::unique_ptr<Judge> judge;
  std::optional<PromptLibrary> prompts;
  EvalOptions eval;
};

// Loads manifest, judge config, prompts and cache; creates the output
// directory and points the run log into it.
JudgeSession open_session(const JudgeOptions& o, Context& ctx);
void record_judge_counters(const JudgeSession& s, Context& ctx);

std::string domain_list(const std::vector<Domain>& domains);

}  // namespace visbias::cli
