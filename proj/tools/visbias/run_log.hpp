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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace visbias::cli {

/// One line of runs.jsonl. Written once per command, never rewritten.
struct RunManifestEntry {
  std::string run_id;
  std::string command_line;
  std::string config_digest;  // SHA-256 over the config files' bytes
  std::string started_at;
  std::string finished_at;
  std::string judge_fingerprint;
  std::vector<std::string> output_paths;
  int exit_status = 0;
  nlohmann::json counters = nlohmann::json::object();
};

nlohmann::ordered_json to_json(const RunManifestEntry& e);

std::string utc_timestamp();
std::string new_run_id();

// Digest of the listed files in order; unreadable files contribute their path.
std::string config_digest(const std::vector<std::filesystem::path>& files);

// Appends one JSON line; creates parent directories.
void append_run_entry(const std::filesystem::path& log, const RunManifestEntry& entry);

}  // namespace visbias::cli
