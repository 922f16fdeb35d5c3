// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "iotrans/minimization.hpp"
#include "iotrans/process_model.hpp"

namespace iotrans::testing {

/// Two states with disjoint emissions under every input: s_a always emits
/// "0" and stays, s_b always emits "1" and stays.
inline TransducerSpec disjoint_output_machine() {
  RawSpec raw;
  raw.inputs = {"0", "1"};
  raw.outputs = {"0", "1"};
  raw.states = {"sa", "sb"};
  for (const char* x : {"0", "1"}) {
    raw.transitions.push_back({"sa", x, "0", "sa", 1.0});
    raw.transitions.push_back({"sb", x, "1", "sb", 1.0});
  }
  return validate_spec(raw);
}

/// Single state that deterministically emits "0" under every input.
inline TransducerSpec copy_machine() {
  RawSpec raw;
  raw.inputs = {"0", "1"};
  raw.outputs = {"0"};
  raw.states = {"a"};
  raw.transitions.push_back({"a", "0", "0", "a", 1.0});
  raw.transitions.push_back({"a", "1", "0", "a", 1.0});
  return validate_spec(raw);
}

/// Three-state machine whose pair (A, B) needs two adaptive steps: under
/// input "0" both emit "0" but move to C and A respectively, and the pair
/// (C, A) has disjoint outputs under input "0".
inline TransducerSpec three_state_two_step_machine() {
  RawSpec raw;
  raw.inputs = {"0", "1"};
  raw.outputs = {"0", "1"};
  raw.states = {"A", "B", "C"};
  raw.transitions = {
      {"A", "0", "0", "C", 1.0},
      {"A", "1", "0", "A", 0.5},
      {"A", "1", "1", "B", 0.5},
      {"B", "0", "0", "A", 1.0},
      {"B", "1", "0", "C", 0.5},
      {"B", "1", "1", "A", 0.5},
      {"C", "0", "1", "A", 1.0},
      {"C", "1", "0", "B", 0.5},
      {"C", "1", "1", "C", 0.5},
  };
  return validate_spec(raw);
}

/// Appends a clone of state i with a literally identical transition row.
/// The clone is unreachable but behaviourally equal to the original.
inline TransducerSpec duplicate_state(const TransducerSpec& spec,
                                      std::size_t i) {
  RawSpec raw;
  raw.inputs = spec.inputs().symbols();
  raw.outputs = spec.outputs().symbols();
  raw.states = spec.states();
  const std::string clone = spec.state(i) + "_dup";
  raw.states.push_back(clone);
  for (std::size_t a = 0; a < spec.num_states(); ++a) {
    for (std::size_t x = 0; x < spec.num_inputs(); ++x) {
      for (std::size_t y = 0; y < spec.num_outputs(); ++y) {
        for (std::size_t b = 0; b < spec.num_states(); ++b) {
          const double p = spec.prob(a, x, y, b);
          if (p > 0.0) {
            raw.transitions.push_back({spec.state(a), spec.inputs().symbol(x),
                                       spec.outputs().symbol(y), spec.state(b),
                                       p});
            if (a == i) {
              raw.transitions.push_back({clone, spec.inputs().symbol(x),
                                         spec.outputs().symbol(y),
                                         spec.state(b), p});
            }
          }
        }
      }
    }
  }
  return validate_spec(raw);
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Random jointly unifilar machine. Emission probabilities are bounded away
/// from zero so tolerance thresholds never sit on a knife edge.
inline TransducerSpec random_unifilar_spec(std::mt19937_64& rng,
                                           std::size_t max_states = 5,
                                           std::size_t max_inputs = 3,
                                           std::size_t max_outputs = 3) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return lo + rng() % (hi - lo + 1);
  };
  const std::size_t n = pick(2, max_states);
  const std::size_t nx = pick(1, max_inputs);
  const std::size_t ny = pick(2, std::max<std::size_t>(2, max_outputs));

  RawSpec raw;
  for (std::size_t x = 0; x < nx; ++x) raw.inputs.push_back("x" + std::to_string(x));
  for (std::size_t y = 0; y < ny; ++y) raw.outputs.push_back("y" + std::to_string(y));
  for (std::size_t i = 0; i < n; ++i) raw.states.push_back("q" + std::to_string(i));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t x = 0; x < nx; ++x) {
      std::vector<std::size_t> outputs(ny);
      for (std::size_t y = 0; y < ny; ++y) outputs[y] = y;
      std::shuffle(outputs.begin(), outputs.end(), rng);
      const std::size_t support = pick(1, ny);
      std::vector<double> weights(support);
      double total = 0.0;
      for (double& w : weights) {
        w = 0.2 + uniform01(rng);
        total += w;
      }
      for (std::size_t t = 0; t < support; ++t) {
        raw.transitions.push_back({raw.states[i], raw.inputs[x],
                                   raw.outputs[outputs[t]],
                                   raw.states[rng() % n], weights[t] / total});
      }
    }
  }
  return validate_spec(raw);
}

/// Random machine reduced to its causal-state presentation.
inline TransducerSpec random_minimal_spec(std::mt19937_64& rng,
                                          std::size_t max_states = 5,
                                          std::size_t max_inputs = 3,
                                          std::size_t max_outputs = 3) {
  return minimize(
      random_unifilar_spec(rng, max_states, max_inputs, max_outputs));
}

}  // namespace iotrans::testing
