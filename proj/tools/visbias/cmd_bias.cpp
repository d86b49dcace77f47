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

#include "commands.hpp"
#include "visbias/error.hpp"
#include "visbias/recipe.hpp"

namespace visbias::cli {
namespace {

struct BiasApplyOptions {
  std::string in;
  std::string out;
  std::string recipe;
  std::string domain;
  std::string instruction;
  std::vector<std::string> concepts;
  std::string boxes;
};

int bias_apply(const BiasApplyOptions& o, Context& ctx) {
  ctx.config_files.emplace_back(o.recipe);
  ctx.run_log = std::filesystem::path(o.out).parent_path() / "runs.jsonl";
  ctx.entry.output_paths.push_back(o.out);

  const RecipeTemplate tmpl = load_recipe(o.recipe);
  InstanceContext ictx;
  ictx.instruction = o.instruction;
  for (const auto& kv : o.concepts) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::Validation, "--concept expects slot=value, got '" + kv + "'");
    }
    ictx.concepts[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (!o.boxes.empty()) ictx.boxes = load_box_sidecar(o.boxes).boxes;

  const BiasRecipe recipe = resolve(tmpl, ictx);
  const RasterImage input = read_image(o.in);
  RecipeTrace trace;
  RasterImage output = input;
  if (!o.domain.empty()) {
    output = apply_recipe(input, recipe, parse_domain(o.domain), &trace);
  } else {
    validate(recipe);
    for (const auto& step : recipe.steps) output = apply_step(output, step, &trace);
  }
  write_png(output, o.out);
  ctx.entry.counters["external_commands"] = trace.commands;
  ctx.out << "wrote " << o.out << " (" << output.width() << "x" << output.height() << ", "
          << recipe_label(recipe) << ")\n";
  return 0;
}

}  // namespace

void register_bias(CLI::App& app, Context& ctx) {
  auto* bias = app.add_subcommand("bias", "Apply bias recipes to images");
  bias->require_subcommand(1);
  auto o = std::make_shared<BiasApplyOptions>();
  auto* apply = bias->add_subcommand("apply", "Apply a recipe to one image and write a PNG");
  apply->add_option("--in", o->in, "Input image")->required();
  apply->add_option("--out", o->out, "Output PNG")->required();
  apply->add_option("--recipe", o->recipe, "Recipe JSON")->required();
  apply->add_option("--domain", o->domain, "Domain used for the applicability check");
  apply->add_option("--instruction", o->instruction, "Instruction text for instruction overlays");
  apply->add_option("--concept", o->concepts, "slot=value pairs for keyword overlays");
  apply->add_option("--boxes", o->boxes, "Bounding-box sidecar JSON");
  apply->callback([&ctx, o] { ctx.action = [&ctx, o] { return bias_apply(*o, ctx); }; });
}

}  // namespace visbias::cli
