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

#include <sstream>

#include "commands.hpp"
#include "visbias/error.hpp"

namespace visbias::cli {
namespace {

struct ReportOptions {
  std::vector<std::string> runs;
  std::string format = "csv";
  std::string out;
};

struct JudgeTable {
  std::vector<std::string> biases;  // first-appearance order
  std::map<std::pair<Domain, std::string>, DomainBiasCell> cells;
  std::vector<DomainBiasCell> all;
};

std::string render(const std::map<std::string, JudgeTable>& tables, bool markdown) {
  std::ostringstream out;
  const std::string sep = markdown ? " | " : ",";
  auto row = [&](const std::vector<std::string>& fields) {
    if (markdown) out << "| ";
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? sep : "") << fields[i];
    out << (markdown ? " |\n" : "\n");
  };
  auto rule = [&](std::size_t n) {
    if (!markdown) return;
    out << '|';
    for (std::size_t i = 0; i < n; ++i) out << " --- |";
    out << '\n';
  };

  if (markdown) out << "## Percentage change by domain and bias\n\n";
  for (const auto& [judge, t] : tables) {
    std::vector<std::string> header{"judge", "domain"};
    header.insert(header.end(), t.biases.begin(), t.biases.end());
    row(header);
    rule(header.size());
    for (Domain d : kAllDomains) {
      std::vector<std::string> fields{judge, std::string(to_string(d))};
      bool any = false;
      for (const auto& b : t.biases) {
        auto it = t.cells.find({d, b});
        if (it == t.cells.end()) {
          fields.emplace_back(markdown ? "n/a" : "");
        } else {
          fields.push_back(format_fixed(it->second.pct_change, 2));
          any = true;
        }
      }
      if (any) row(fields);
    }
    out << '\n';
  }

  if (markdown) out << "## Attack success rate\n\n";
  row({"judge", "cells", "successes", "asr", "mean_increase_on_success"});
  rule(5);
  for (const auto& [judge, t] : tables) {
    const AttackSuccess a = attack_success_rate(t.all);
    row({judge, std::to_string(a.cells), std::to_string(a.successes), format_fixed(a.asr, 2),
         a.mean_increase_on_success ? format_fixed(*a.mean_increase_on_success, 2) : (markdown ? "n/a" : "")});
  }
  return out.str();
}

int report(const ReportOptions& o, Context& ctx) {
  std::optional<ScoreScale> scale;
  std::map<std::string, JudgeTable> tables;
  for (const auto& f : o.runs) {
    ctx.config_files.emplace_back(f);
    const nlohmann::json j = read_json(f);
    if (!j.contains("scale") || !j.contains("cells")) {
      throw Error(ErrorKind::Validation, "'" + f + "' is not a run summary (needs scale and cells)");
    }
    const ScoreScale sc{j["scale"].at("min").get<int>(), j["scale"].at("max").get<int>()};
    if (scale && *scale != sc) {
      throw Error(ErrorKind::Validation, "run '" + f + "' uses scale " + std::to_string(sc.min) + ".." +
                                             std::to_string(sc.max) + ", earlier runs use " +
                                             std::to_string(scale->min) + ".." + std::to_string(scale->max));
    }
    scale = sc;
    const std::string judge = j.value("judge", std::string("unknown"));
    JudgeTable& t = tables[judge];
    for (const auto& cj : j["cells"]) {
      const DomainBiasCell c = cell_from_json(cj);
      if (std::find(t.biases.begin(), t.biases.end(), c.bias_label) == t.biases.end()) t.biases.push_back(c.bias_label);
      if (!t.cells.emplace(std::make_pair(c.domain, c.bias_label), c).second) {
        throw Error(ErrorKind::Validation, "duplicate cell " + std::string(to_string(c.domain)) + "/" +
                                               c.bias_label + " for judge " + judge);
      }
      t.all.push_back(c);
    }
  }
  if (tables.empty()) throw Error(ErrorKind::Validation, "no runs given");
  for (const auto& [judge, t] : tables) {
    if (t.all.empty()) throw Error(ErrorKind::Validation, "judge " + judge + " has no cells to report");
  }

  const std::string text = render(tables, o.format == "md");
  if (o.out.empty()) {
    ctx.out << text;
  } else {
    write_text(o.out, text);
    ctx.run_log = std::filesystem::path(o.out).parent_path() / "runs.jsonl";
    ctx.entry.output_paths.push_back(o.out);
  }
  return 0;
}

}  // namespace

void register_report(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<ReportOptions>();
  auto* rep = app.add_subcommand("report", "Percentage-change matrices and attack success rates");
  rep->add_option("--runs", o->runs, "summary.json files written by 'eval single'")->required();
  rep->add_option("--format", o->format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
  rep->add_option("--out", o->out, "Write the report here instead of stdout");
  rep->callback([&ctx, o] { ctx.action = [&ctx, o] { return report(*o, ctx); }; });
}

}  // namespace visbias::cli
