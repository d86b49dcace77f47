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

#include <cstdint>
#include <vector>

#include "visbias/benchmark.hpp"
#include "visbias/bias.hpp"
#include "visbias/image.hpp"

namespace visbias {

struct SyntheticImageOptions {
  int width = 512;
  int height = 512;
};

struct SyntheticImage {
  RasterImage image;
  std::vector<BoxAnnotation> boxes;  // one per drawn object
};

// Offline stand-in for a text-to-image model: a flat background derived from
// the scene slot plus one coloured shape per counted object. The
// drawing is a pure function of (concepts, seed). Object boxes are returned
// so bounding-box sidecars can be written next to the image.
SyntheticImage generate_placeholder_image(const ConceptAssignment& concepts, std::uint64_t seed,
                                          const SyntheticImageOptions& options = {});

}  // namespace visbias
