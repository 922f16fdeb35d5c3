// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "iotrans/common.hpp"

namespace iotrans {

/// Ordered set of distinct symbol labels. Index order is declaration order
/// and fixes the layout of every tensor built over the alphabet.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols)
      : symbols_(std::move(symbols)) {
    if (symbols_.empty()) {
      throw Error(ErrorCode::InvalidAlphabet, "alphabet must be non-empty");
    }
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (!index_.emplace(symbols_[i], i).second) {
        throw Error(ErrorCode::InvalidAlphabet,
                    "duplicate symbol '" + symbols_[i] + "'");
      }
    }
  }

  std::size_t size() const { return symbols_.size(); }
  const std::string& symbol(std::size_t i) const { return symbols_[i]; }
  const std::vector<std::string>& symbols() const { return symbols_; }

  std::optional<std::size_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) {
      throw Error(ErrorCode::UnknownSymbol, "unknown symbol '" + label + "'");
    }
    return it->second;
  }

  bool operator==(const Alphabet& other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One entry of the sparse transition listing: T[from][input][output][to].
struct TransitionEntry {
  std::string from;
  std::string input;
  std::string output;
  std::string to;
  double prob = 0.0;
};

/// Unvalidated model data, exactly as parsed from user input. Omitted
/// transitions carry probability zero.
struct RawSpec {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> states;
  std::vector<TransitionEntry> transitions;
};

/// A validated finite-state input-output transducer presentation.
///
/// The transition tensor T[i][x][y][j] holds the probability of moving from
/// state i to state j while emitting y, conditioned on input x. Construction
/// goes through validate_spec, which certifies per-(i,x) normalization,
/// non-negativity and joint unifiliarity. Instances are immutable; all
/// accessors are const and safe to call concurrently.
class TransducerSpec {
 public:
  const Alphabet& inputs() const { return inputs_; }
  const Alphabet& outputs() const { return outputs_; }
  const std::vector<std::string>& states() const { return states_; }
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_inputs() const { return inputs_.size(); }
  std::size_t num_outputs() const { return outputs_.size(); }

  const std::string& state(std::size_t i) const { return states_[i]; }

  std::size_t state_index(const std::string& label) const {
    auto it = state_index_.find(label);
    if (it == state_index_.end()) {
      throw Error(ErrorCode::UnknownSymbol, "unknown state '" + label + "'");
    }
    return it->second;
  }

  double prob(std::size_t i, std::size_t x, std::size_t y,
              std::size_t j) const {
    return tensor_[offset(i, x, y, j)];
  }

  /// P[Y = y | state i, input x] marginalized over the successor.
  double emission_prob(std::size_t i, std::size_t x, std::size_t y) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < num_states(); ++j) sum += prob(i, x, y, j);
    return sum;
  }

  friend TransducerSpec validate_spec(const RawSpec& raw);

 private:
  TransducerSpec(Alphabet inputs, Alphabet outputs,
                 std::vector<std::string> states, std::vector<double> tensor)
      : inputs_(std::move(inputs)),
        outputs_(std::move(outputs)),
        states_(std::move(states)),
        tensor_(std::move(tensor)) {
    for (std::size_t i = 0; i < states_.size(); ++i) state_index_[states_[i]] = i;
  }

  std::size_t offset(std::size_t i, std::size_t x, std::size_t y,
                     std::size_t j) const {
    return ((i * inputs_.size() + x) * outputs_.size() + y) * states_.size() + j;
  }

  Alphabet inputs_;
  Alphabet outputs_;
  std::vector<std::string> states_;
  std::unordered_map<std::string, std::size_t> state_index_;
  std::vector<double> tensor_;
};

/// Validates raw model data and returns the immutable spec.
///
/// Certifies, in order: alphabet/state well-formedness, symbol resolution,
/// non-negative entries, per-(state, input) row normalization within
/// kProbEps, and joint unifiliarity (at most one successor above kProbEps
/// for every (state, input, output) triple). Duplicate transition entries
/// accumulate.
inline TransducerSpec validate_spec(const RawSpec& raw) {
  Alphabet inputs(raw.inputs);
  Alphabet outputs(raw.outputs);
  if (raw.states.empty()) {
    throw Error(ErrorCode::InvalidAlphabet, "state list must be non-empty");
  }
  std::unordered_map<std::string, std::size_t> state_index;
  for (std::size_t i = 0; i < raw.states.size(); ++i) {
    if (!state_index.emplace(raw.states[i], i).second) {
      throw Error(ErrorCode::InvalidAlphabet,
                  "duplicate state '" + raw.states[i] + "'");
    }
  }

  const std::size_t ns = raw.states.size();
  const std::size_t nx = inputs.size();
  const std::size_t ny = outputs.size();
  std::vector<double> tensor(ns * nx * ny * ns, 0.0);
  auto offset = [&](std::size_t i, std::size_t x, std::size_t y,
                    std::size_t j) {
    return ((i * nx + x) * ny + y) * ns + j;
  };

  for (const TransitionEntry& t : raw.transitions) {
    auto from = state_index.find(t.from);
    if (from == state_index.end()) {
      throw Error(ErrorCode::UnknownSymbol, "unknown state '" + t.from + "'");
    }
    auto to = state_index.find(t.to);
    if (to == state_index.end()) {
      throw Error(ErrorCode::UnknownSymbol, "unknown state '" + t.to + "'");
    }
    const std::size_t x = inputs.index_of(t.input);
    const std::size_t y = outputs.index_of(t.output);
    if (t.prob < 0.0) {
      throw Error(ErrorCode::NegativeProbability,
                  "transition " + t.from + " --" + t.input + "/" + t.output +
                      "--> " + t.to + " has probability " +
                      std::to_string(t.prob));
    }
    tensor[offset(from->second, x, y, to->second)] += t.prob;
  }

  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t x = 0; x < nx; ++x) {
      double sum = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t j = 0; j < ns; ++j) sum += tensor[offset(i, x, y, j)];
      }
      if (std::abs(sum - 1.0) > kProbEps) {
        throw Error(ErrorCode::RowNotNormalized,
                    "state '" + raw.states[i] + "', input '" +
                        inputs.symbol(x) + "' sums to " + std::to_string(sum));
      }
    }
  }

  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        std::size_t successors = 0;
        for (std::size_t j = 0; j < ns; ++j) {
          if (tensor[offset(i, x, y, j)] > kProbEps) ++successors;
        }
        if (successors > 1) {
          throw Error(ErrorCode::NonUnifilar,
                      "state '" + raw.states[i] + "', input '" +
                          inputs.symbol(x) + "', output '" + outputs.symbol(y) +
                          "' has " + std::to_string(successors) +
                          " successors");
        }
      }
    }
  }

  return TransducerSpec(std::move(inputs), std::move(outputs), raw.states,
                        std::move(tensor));
}

/// The propagator g: unique successor of (state, input, output).
/// Well-defined on the support by joint unifiliarity.
inline std::size_t propagator(const TransducerSpec& spec, std::size_t i,
                              std::size_t x, std::size_t y) {
  for (std::size_t j = 0; j < spec.num_states(); ++j) {
    if (spec.prob(i, x, y, j) > kProbEps) return j;
  }
  throw Error(ErrorCode::ImpossibleEmission,
              "state '" + spec.state(i) + "' cannot emit '" +
                  spec.outputs().symbol(y) + "' on input '" +
                  spec.inputs().symbol(x) + "'");
}

/// Two-state process over binary inputs and outputs: input "1" flips the
/// coin with probability p, input "0" flips it with probability q, and the
/// new face is emitted as output.
inline TransducerSpec actively_perturbed_coin(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::ParameterOutOfRange,
                "flip probabilities must lie strictly inside (0, 1)");
  }
  RawSpec raw;
  raw.inputs = {"0", "1"};
  raw.outputs = {"0", "1"};
  raw.states = {"s0", "s1"};
  const std::string faces[2] = {"0", "1"};
  for (int i = 0; i < 2; ++i) {
    struct { const char* input; double flip; } rows[2] = {{"0", q}, {"1", p}};
    for (const auto& row : rows) {
      raw.transitions.push_back(
          {raw.states[i], row.input, faces[1 - i], raw.states[1 - i], row.flip});
      raw.transitions.push_back(
          {raw.states[i], row.input, faces[i], raw.states[i], 1.0 - row.flip});
    }
  }
  return validate_spec(raw);
}

/// IID distribution over the input alphabet. Symbols absent from the
/// initializer carry probability zero.
class InputDistribution {
 public:
  InputDistribution(const Alphabet& inputs,
                    const std::map<std::string, double>& probs)
      : probs_(inputs.size(), 0.0) {
    double sum = 0.0;
    for (const auto& [symbol, p] : probs) {
      if (p < 0.0) {
        throw Error(ErrorCode::NegativeProbability,
                    "P[" + symbol + "] = " + std::to_string(p));
      }
      probs_[inputs.index_of(symbol)] = p;
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbEps) {
      throw Error(ErrorCode::DistributionNotNormalized,
                  "input probabilities sum to " + std::to_string(sum));
    }
  }

  static InputDistribution uniform(const Alphabet& inputs) {
    InputDistribution dist;
    dist.probs_.assign(inputs.size(), 1.0 / static_cast<double>(inputs.size()));
    return dist;
  }

  /// Unchecked construction from an index-aligned probability vector.
  static InputDistribution from_probs(std::vector<double> probs) {
    InputDistribution dist;
    dist.probs_ = std::move(probs);
    return dist;
  }

  std::size_t size() const { return probs_.size(); }
  double prob(std::size_t x) const { return probs_[x]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  InputDistribution() = default;
  std::vector<double> probs_;
};

/// A realized run: initial state plus the observed (input, output) pairs.
struct Trace {
  std::string initial_state;
  std::vector<std::pair<std::string, std::string>> steps;
};

/// Checks every label in the trace against the spec.
inline void validate_trace(const TransducerSpec& spec, const Trace& trace) {
  spec.state_index(trace.initial_state);
  for (const auto& [x, y] : trace.steps) {
    spec.inputs().index_of(x);
    spec.outputs().index_of(y);
  }
}

}  // namespace iotrans
