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

#include <memory>

#include "visbias/judge.hpp"

namespace visbias::detail {

std::unique_ptr<JudgeBackend> make_scripted_backend(const JudgeBackendConfig& cfg);
std::unique_ptr<JudgeBackend> make_susceptible_backend(const JudgeBackendConfig& cfg);
// Throws Error(Config) when the credential variable is named but unset.
std::unique_ptr<JudgeBackend> make_http_backend(const JudgeBackendConfig& cfg);

}  // namespace visbias::detail
