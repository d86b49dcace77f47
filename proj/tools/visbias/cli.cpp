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

#include "cli.hpp"

#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "visbias/error.hpp"

namespace visbias::cli {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.flush()) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(read_text(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::Validation, "'" + path.string() + "' is not valid JSON");
  return j;
}

std::filesystem::path image_root_for(const std::filesystem::path& manifest_path) {
  return manifest_path.has_parent_path() ? manifest_path.parent_path() : std::filesystem::path(".");
}

std::shared_ptr<VerdictCache> open_cache(const std::string& dir) {
  if (dir.empty()) return nullptr;
  return std::make_shared<VerdictCache>(dir);
}

void add_judge_options(CLI::App* sub, JudgeOptions& o) {
  sub->add_option("--manifest", o.manifest, "Benchmark manifest (JSONL)")->required();
  sub->add_option("--judge", o.judge, "Judge backend config (JSON)")->required();
  sub->add_option("--cache", o.cache, "Verdict cache directory");
  sub->add_option("--prompts", o.prompts_dir, "Directory of prompt template files");
  sub->add_option("--out-dir", o.out_dir, "Output directory")->required();
  sub->add_option("--parallel", o.parallel, "Concurrent judge workers")->check(CLI::PositiveNumber);
  sub->add_flag("--timestamps", o.timestamps, "Stamp each record with wall-clock time");
}

JudgeSession open_session(const JudgeOptions& o, Context& ctx) {
  JudgeSession s;
  ctx.config_files.emplace_back(o.judge);
  ctx.config_files.emplace_back(o.manifest);
  ctx.run_log = std::filesystem::path(o.out_dir) / "runs.jsonl";

  const JudgeBackendConfig cfg = load_judge_config(o.judge);
  ctx.entry.judge_fingerprint = fingerprint(cfg);
  s.manifest = read_manifest(std::filesystem::path(o.manifest));
  s.image_root = image_root_for(o.manifest);
  if (!o.prompts_dir.empty()) s.prompts = PromptLibrary::load_dir(o.prompts_dir);
  s.judge = std::make_unique<Judge>(cfg, open_cache(o.cache));

  std::filesystem::create_directories(o.out_dir);
  s.eval.image_root = s.image_root;
  s.eval.parallel = o.parallel > 0 ? o.parallel : cfg.max_parallel;
  s.eval.timestamps = o.timestamps;
  s.eval.prompts = s.prompts ? &*s.prompts : nullptr;
  return s;
}

void record_judge_counters(const JudgeSession& s, Context& ctx) {
  ctx.entry.counters["backend_requests"] = s.judge->backend_requests();
  ctx.entry.counters["cache_hits"] = s.judge->cache_hits();
}

std::string domain_list(const std::vector<Domain>& domains) {
  std::string out;
  for (Domain d : domains) {
    if (!out.empty()) out += ", ";
    out += to_string(d);
  }
  return out;
}

namespace {

std::string join_command(const std::vector<std::string>& args) {
  std::string out = "visbias";
  for (const auto& a : args) {
    out += ' ';
    const bool plain = !a.empty() && a.find_first_of(" \t\"'\\$") == std::string::npos;
    out += plain ? a : nlohmann::json(a).dump();
  }
  return out;
}

int exit_code_for(const Error& e) { return is_environment_error(e.kind()) ? 1 : 2; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, {}, {}, {}, {}};
  ctx.entry.run_id = new_run_id();
  ctx.entry.command_line = join_command(args);
  ctx.entry.started_at = utc_timestamp();

  CLI::App app{"Visual-bias injection and LVLM judge robustness toolkit", "visbias"};
  app.set_version_flag("--version", "visbias 0.1.0");
  app.require_subcommand(1);
  std::string run_log_override;
  app.add_option("--run-log", run_log_override, "Append the run entry to this file instead");

  register_bias(app, ctx);
  register_bench(app, ctx);
  register_eval(app, ctx);
  register_search(app, ctx);
  register_report(app, ctx);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }

  int status = 0;
  try {
    status = ctx.action ? ctx.action() : 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    status = exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    err << "error: invalid JSON input: " << e.what() << '\n';
    status = 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    status = 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    status = 1;
  }

  if (!run_log_override.empty()) ctx.run_log = run_log_override;
  if (ctx.run_log) {
    ctx.entry.finished_at = utc_timestamp();
    ctx.entry.exit_status = status;
    ctx.entry.config_digest = config_digest(ctx.config_files);
    try {
      append_run_entry(*ctx.run_log, ctx.entry);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      if (status == 0) status = 1;
    }
  }
  return status;
}

}  // namespace visbias::cli
