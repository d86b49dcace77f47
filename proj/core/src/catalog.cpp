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

#include <algorithm>
#include <fstream>
#include <numeric>

#include "visbias/benchmark.hpp"
#include "visbias/error.hpp"
#include "visbias/seeding.hpp"

namespace visbias {

void ConceptCatalog::set_domain(Domain d, std::vector<ConceptSlot> slots) {
  domains_[d] = std::move(slots);
}

const std::vector<ConceptSlot>& ConceptCatalog::slots(Domain d) const {
  auto it = domains_.find(d);
  if (it == domains_.end()) {
    throw Error(ErrorKind::Catalog, "catalog has no domain '" + std::string(to_string(d)) + "'");
  }
  return it->second;
}

const ConceptSlot& ConceptCatalog::slot(Domain d, const std::string& name) const {
  for (const auto& s : slots(d)) {
    if (s.name == name) return s;
  }
  throw Error(ErrorKind::Catalog,
              "domain '" + std::string(to_string(d)) + "' has no concept slot '" + name + "'");
}

std::vector<Domain> ConceptCatalog::domains() const {
  std::vector<Domain> out;
  for (const auto& [d, _] : domains_) out.push_back(d);
  return out;
}

void ConceptCatalog::validate() const {
  for (const auto& [d, slots] : domains_) {
    const std::string dn(to_string(d));
    if (slots.size() < 4 || slots.size() > 5) {
      throw Error(ErrorKind::Catalog, "domain '" + dn + "' defines " + std::to_string(slots.size()) +
                                          " slots, expected 4 or 5");
    }
    for (const auto& s : slots) {
      if (s.values.size() < 2) {
        throw Error(ErrorKind::Catalog, "slot '" + s.name + "' in '" + dn + "' has fewer than 2 values");
      }
    }
  }
}

ConceptCatalog catalog_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Catalog, "catalog must be a JSON object");
  ConceptCatalog catalog;
  for (const auto& [dname, slots] : j.items()) {
    Domain d;
    try {
      d = parse_domain(dname);
    } catch (const Error&) {
      throw Error(ErrorKind::Catalog, "unknown domain '" + dname + "' in catalog");
    }
    if (!slots.is_object()) throw Error(ErrorKind::Catalog, "domain '" + dname + "' must map slots to arrays");
    std::vector<ConceptSlot> parsed;
    for (const auto& [sname, values] : slots.items()) {
      ConceptSlot s{sname, {}};
      if (!values.is_array()) throw Error(ErrorKind::Catalog, "slot '" + sname + "' must be an array");
      for (const auto& v : values) s.values.push_back(v.get<std::string>());
      parsed.push_back(std::move(s));
    }
    catalog.set_domain(d, std::move(parsed));
  }
  catalog.validate();
  return catalog;
}

nlohmann::ordered_json to_json(const ConceptCatalog& catalog) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (Domain d : catalog.domains()) {
    nlohmann::ordered_json slots = nlohmann::ordered_json::object();
    for (const auto& s : catalog.slots(d)) slots[s.name] = s.values;
    j[std::string(to_string(d))] = std::move(slots);
  }
  return j;
}

ConceptCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open catalog '" + path.string() + "'");
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Catalog, "catalog '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return catalog_from_json(j);
}

const ConceptCatalog& default_catalog() {
  static const ConceptCatalog catalog = [] {
    ConceptCatalog c;
    c.set_domain(Domain::Animals,
                 {{"object", {"Flamingo", "Elephant", "Fox", "Penguin", "Horse", "Owl", "Rabbit", "Deer"}},
                  {"number", {"One", "Two", "Three", "Four", "Five"}},
                  {"background", {"Meadow", "Tropical rainforest", "Snowy forest", "Desert", "Riverbank", "Savanna"}},
                  {"action", {"Drinking from a watering hole", "Running across a field", "Sleeping under a tree",
                              "Playing together", "Looking at the camera"}}});
    c.set_domain(Domain::People,
                 {{"object", {"Woman", "Man", "Child", "Chef", "Doctor", "Student"}},
                  {"number", {"One", "Two", "Three", "Four"}},
                  {"color", {"Red", "Blue", "Green", "Yellow", "Black", "White"}},
                  {"background", {"City street", "High school classroom", "Park", "Beach", "Office"}},
                  {"action", {"Typing on a laptop", "Riding a bicycle", "Reading a book", "Eating lunch",
                              "Talking on the phone"}}});
    c.set_domain(Domain::Outdoor,
                 {{"scene", {"Mountain lake", "Lighthouse on a cliff", "Desert canyon", "Waterfall", "Country road",
                             "Harbor"}},
                  {"weather", {"Sunny", "Foggy", "Rainy", "Snowy", "Stormy"}},
                  {"time", {"Sunrise", "Noon", "Sunset", "Night"}},
                  {"season", {"Spring", "Summer", "Autumn", "Winter"}}});
    c.set_domain(Domain::Indoor,
                 {{"object", {"Chair", "Lamp", "Sofa", "Bookshelf", "Plant", "Clock"}},
                  {"number", {"One", "Two", "Three", "Four"}},
                  {"color", {"Red", "Blue", "Green", "Yellow", "White", "Black"}},
                  {"room", {"Living room", "Kitchen", "Bedroom", "Library", "Office"}},
                  {"style", {"Modern", "Rustic", "Minimalist", "Vintage", "Industrial"}}});
    c.set_domain(Domain::Illustrations,
                 {{"object", {"Dragon", "Robot", "Castle", "Cat", "Rocket", "Tree"}},
                  {"number", {"One", "Two", "Three", "Four"}},
                  {"color", {"Red", "Blue", "Green", "Purple", "Orange", "Gold"}},
                  {"style", {"Watercolor", "Pixel art", "Cartoon", "Pencil sketch", "Flat vector"}},
                  {"background", {"Starry sky", "Enchanted forest", "Underwater reef", "Cloudy sky",
                                  "Mountain valley"}}});
    c.validate();
    return c;
  }();
  return catalog;
}

const std::string* ConceptAssignment::find(const std::string& slot) const {
  for (const auto& [name, value] : slots) {
    if (name == slot) return &value;
  }
  return nullptr;
}

std::map<std::string, std::string> ConceptAssignment::as_map() const {
  return {slots.begin(), slots.end()};
}

std::size_t hamming_distance(const ConceptAssignment& a, const ConceptAssignment& b) {
  if (a.slots.size() != b.slots.size()) {
    throw Error(ErrorKind::Parameter, "assignments have different slot sets");
  }
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.slots.size(); ++i) {
    if (a.slots[i].first != b.slots[i].first) {
      throw Error(ErrorKind::Parameter, "assignments have different slot sets");
    }
    if (a.slots[i].second != b.slots[i].second) ++diff;
  }
  return diff;
}

ConceptAssignment sample_concepts(const ConceptCatalog& catalog, Domain domain, std::uint64_t seed) {
  const auto& slots = catalog.slots(domain);
  Rng rng(seed);
  ConceptAssignment a;
  a.domain = domain;
  for (const auto& s : slots) {
    if (s.values.empty()) throw Error(ErrorKind::Catalog, "slot '" + s.name + "' has no values");
    a.slots.emplace_back(s.name, s.values[rng.below(s.values.size())]);
  }
  return a;
}

ConceptAssignment perturb_concepts(const ConceptCatalog& catalog, const ConceptAssignment& assignment,
                                   std::size_t k, std::uint64_t seed) {
  const std::size_t n = assignment.slots.size();
  if (k > n) {
    throw Error(ErrorKind::Parameter,
                "cannot perturb " + std::to_string(k) + " of " + std::to_string(n) + " slots");
  }
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // partial Fisher-Yates: the first k entries are a uniform k-subset
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(order[i], order[j]);
  }
  ConceptAssignment out = assignment;
  for (std::size_t i = 0; i < k; ++i) {
    auto& [name, value] = out.slots[order[i]];
    const auto& candidates = catalog.slot(assignment.domain, name).values;
    std::vector<const std::string*> alternatives;
    for (const auto& v : candidates) {
      if (v != value) alternatives.push_back(&v);
    }
    if (alternatives.empty()) {
      throw Error(ErrorKind::Perturbation, "slot '" + name + "' has no alternative to '" + value + "'");
    }
    value = *alternatives[rng.below(alternatives.size())];
  }
  return out;
}

}  // namespace visbias
