// Copyright 2025 The pld-accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pld/discrete_pld.hpp"
#include "pld/errors.hpp"
#include "pld/mechanisms.hpp"

namespace pld {

// Interchange format: {"values": [...], "probs": [...], "p_bottom": x,
// "p_top": y}; arrays equal length, numbers in shortest round-trip form
// (nlohmann's default double emitter).
inline nlohmann::json to_json(const DiscretePld& L) {
  return nlohmann::json{{"values", L.values()},
                        {"probs", L.probs()},
                        {"p_bottom", L.p_bottom()},
                        {"p_top", L.p_top()}};
}

inline DiscretePld pld_from_json(const nlohmann::json& j) {
  try {
    return DiscretePld(j.at("values").get<std::vector<double>>(),
                       j.at("probs").get<std::vector<double>>(),
                       j.value("p_bottom", 0.0), j.value("p_top", 0.0));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError(std::string("DiscretePld JSON: ") + e.what());
  }
}

// {"p": [...], "q": [...]}
inline nlohmann::json to_json(const DiscretePair& pair) {
  return nlohmann::json{{"p", pair.p}, {"q", pair.q}};
}

inline DiscretePair pair_from_json(const nlohmann::json& j) {
  try {
    return DiscretePair(j.at("p").get<std::vector<double>>(),
                        j.at("q").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError(std::string("DiscretePair JSON: ") + e.what());
  }
}

}  // namespace pld
