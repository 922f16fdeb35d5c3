// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "iotrans/process_model.hpp"

namespace iotrans {

/// Parses the JSON spec format:
///   { "inputs": [..], "outputs": [..], "states": [..],
///     "transitions": [ {"from": s, "input": x, "output": y,
///                       "to": s', "prob": f}, ... ] }
/// Omitted transitions are probability zero.
inline RawSpec raw_spec_from_json(const nlohmann::json& j) {
  try {
    RawSpec raw;
    raw.inputs = j.at("inputs").get<std::vector<std::string>>();
    raw.outputs = j.at("outputs").get<std::vector<std::string>>();
    raw.states = j.at("states").get<std::vector<std::string>>();
    for (const auto& t : j.at("transitions")) {
      TransitionEntry entry;
      entry.from = t.at("from").get<std::string>();
      entry.input = t.at("input").get<std::string>();
      entry.output = t.at("output").get<std::string>();
      entry.to = t.at("to").get<std::string>();
      entry.prob = t.at("prob").get<double>();
      raw.transitions.push_back(std::move(entry));
    }
    return raw;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

/// Serializes a validated spec back to the JSON format. Transitions are
/// listed in canonical (from, input, output, to) index order; zero entries
/// are omitted.
inline nlohmann::json spec_to_json(const TransducerSpec& spec) {
  nlohmann::json j;
  j["inputs"] = spec.inputs().symbols();
  j["outputs"] = spec.outputs().symbols();
  j["states"] = spec.states();
  nlohmann::json transitions = nlohmann::json::array();
  for (std::size_t i = 0; i < spec.num_states(); ++i) {
    for (std::size_t x = 0; x < spec.num_inputs(); ++x) {
      for (std::size_t y = 0; y < spec.num_outputs(); ++y) {
        for (std::size_t k = 0; k < spec.num_states(); ++k) {
          const double p = spec.prob(i, x, y, k);
          if (p > 0.0) {
            transitions.push_back({{"from", spec.state(i)},
                                   {"input", spec.inputs().symbol(x)},
                                   {"output", spec.outputs().symbol(y)},
                                   {"to", spec.state(k)},
                                   {"prob", p}});
          }
        }
      }
    }
  }
  j["transitions"] = std::move(transitions);
  return j;
}

inline TransducerSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return validate_spec(raw_spec_from_json(j));
}

}  // namespace iotrans
