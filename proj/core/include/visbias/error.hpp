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

#include <stdexcept>
#include <string>

namespace visbias {

enum class ErrorKind {
  Parameter,
  Validation,
  Applicability,
  Overlay,
  ExternalTool,
  Io,
  Catalog,
  Generation,
  Perturbation,
  Stats,
  Reference,
  Template,
  Transport,
  Parse,
  Metric,
  Alignment,
  Run,
  UndefinedChange,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

// Environment-class failures (filesystem, network, external tools) as opposed
// to invalid input. The CLI maps the former to exit 1 and the latter to 2.
bool is_environment_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace visbias
