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

#include "run_log.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "visbias/digest.hpp"
#include "visbias/error.hpp"

namespace visbias::cli {

nlohmann::ordered_json to_json(const RunManifestEntry& e) {
  nlohmann::ordered_json j;
  j["run_id"] = e.run_id;
  j["command_line"] = e.command_line;
  j["config_digest"] = e.config_digest;
  j["started_at"] = e.started_at;
  j["finished_at"] = e.finished_at;
  j["judge_fingerprint"] = e.judge_fingerprint;
  j["output_paths"] = e.output_paths;
  j["exit_status"] = e.exit_status;
  j["counters"] = e.counters;
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03lldZ", buf, static_cast<long long>(ms));
  return out;
}

std::string new_run_id() {
  std::random_device rd;
  std::ostringstream ss;
  ss << std::hex << std::setfill('0') << std::setw(8) << rd() << std::setw(8) << rd();
  return ss.str();
}

std::string config_digest(const std::vector<std::filesystem::path>& files) {
  Sha256 h;
  for (const auto& f : files) {
    h.add_field(f.filename().string());
    std::ifstream in(f, std::ios::binary);
    if (!in) {
      h.add_field(f.string());
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    h.add_field(ss.str());
  }
  return h.hex_digest();
}

void append_run_entry(const std::filesystem::path& log, const RunManifestEntry& entry) {
  std::error_code ec;
  if (log.has_parent_path()) std::filesystem::create_directories(log.parent_path(), ec);
  std::ofstream out(log, std::ios::app);
  if (!out) throw Error(ErrorKind::Io, "cannot append to run log '" + log.string() + "'");
  out << to_json(entry).dump() << '\n';
}

}  // namespace visbias::cli
