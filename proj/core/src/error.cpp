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

#include "visbias/error.hpp"

namespace visbias {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Applicability: return "applicability error";
    case ErrorKind::Overlay: return "overlay error";
    case ErrorKind::ExternalTool: return "external-tool error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Catalog: return "catalog error";
    case ErrorKind::Generation: return "generation error";
    case ErrorKind::Perturbation: return "perturbation error";
    case ErrorKind::Stats: return "stats error";
    case ErrorKind::Reference: return "reference error";
    case ErrorKind::Template: return "template error";
    case ErrorKind::Transport: return "transport error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Metric: return "metric error";
    case ErrorKind::Alignment: return "alignment error";
    case ErrorKind::Run: return "run error";
    case ErrorKind::UndefinedChange: return "undefined-change error";
    case ErrorKind::Config: return "config error";
  }
  return "error";
}

bool is_environment_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::ExternalTool:
    case ErrorKind::Transport:
    case ErrorKind::Run:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace visbias
