// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iotrans/circuit_sim.hpp"
#include "iotrans/classical_analysis.hpp"
#include "iotrans/minimization.hpp"
#include "iotrans/process_model.hpp"
#include "iotrans/quantum_model.hpp"
#include "iotrans/spec_json.hpp"
#include "iotrans/sweep.hpp"

namespace iotrans::cli {

namespace detail {

/// Parses "sym=prob,sym=prob". Missing symbols carry probability zero,
/// which may steer the run onto the pathological-input reporting path.
inline InputDistribution parse_iid(const Alphabet& inputs,
                                   const std::string& flag) {
  std::map<std::string, double> probs;
  std::size_t start = 0;
  while (start <= flag.size()) {
    const std::size_t comma = std::min(flag.find(',', start), flag.size());
    const std::string item = flag.substr(start, comma - start);
    if (!item.empty()) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::ParseError,
                    "expected sym=prob, got '" + item + "'");
      }
      try {
        probs[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    "bad probability in '" + item + "'");
      }
    }
    start = comma + 1;
  }
  return InputDistribution(inputs, probs);
}

/// Input words are comma separated; a plain string is accepted when every
/// symbol is a single character.
inline std::vector<std::size_t> parse_word(const Alphabet& alphabet,
                                           const std::string& word) {
  std::vector<std::size_t> indices;
  if (word.empty()) return indices;
  if (word.find(',') != std::string::npos) {
    std::size_t start = 0;
    while (start <= word.size()) {
      const std::size_t comma = std::min(word.find(',', start), word.size());
      indices.push_back(alphabet.index_of(word.substr(start, comma - start)));
      start = comma + 1;
    }
    return indices;
  }
  const bool single_char = std::all_of(
      alphabet.symbols().begin(), alphabet.symbols().end(),
      [](const std::string& s) { return s.size() == 1; });
  if (single_char) {
    for (char c : word) indices.push_back(alphabet.index_of(std::string(1, c)));
    return indices;
  }
  indices.push_back(alphabet.index_of(word));
  return indices;
}

inline std::string format_word(const Alphabet& alphabet,
                               const std::vector<std::size_t>& word) {
  const bool single_char = std::all_of(
      alphabet.symbols().begin(), alphabet.symbols().end(),
      [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t t = 0; t < word.size(); ++t) {
    if (t > 0 && !single_char) out += ',';
    out += alphabet.symbol(word[t]);
  }
  return out;
}

inline nlohmann::json occupancy_json(const TransducerSpec& spec,
                                     const StationaryOccupancy& occ) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < occ.pi.size(); ++i) j[spec.state(i)] = occ.pi[i];
  return j;
}

inline nlohmann::json history_json(const TransducerSpec& spec,
                                   const StrategyResult::History& history) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [x, y] : history) {
    j.push_back({spec.inputs().symbol(x), spec.outputs().symbol(y)});
  }
  return j;
}

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("IOTRANS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError,
                  "IOTRANS_SEED is not an unsigned integer");
    }
  }
  return 0;
}

}  // namespace detail

/// Runs one subcommand. Reports are JSON on `out` except sweep, which is
/// CSV. Exit codes: 0 success, 1 domain error, 2 usage error.
inline int dispatch(std::vector<std::string> args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"classical and quantum models of input-output processes"};
  app.require_subcommand(1);

  std::string spec_path, iid_flag, which = "quantum", pair_flag, init_state;
  std::string inputs_flag;
  int resolution = 64, max_depth = 8, horizon = 4, grid = 21;
  double p_min = 0.01, p_max = 0.49, q_min = 0.01, q_max = 0.49;
  std::uint64_t seed = 0;
  std::size_t samples = 1;
  bool seed_given = false;

  CLI::App* validate = app.add_subcommand("validate", "validate a spec file");
  validate->add_option("spec", spec_path, "spec JSON file")->required();

  CLI::App* minimize_cmd =
      app.add_subcommand("minimize", "reduce a spec to causal states");
  minimize_cmd->add_option("--spec", spec_path)->required();

  CLI::App* complexity =
      app.add_subcommand("complexity", "classical memory C_X in bits");
  complexity->add_option("--spec", spec_path)->required();
  complexity->add_option("--iid", iid_flag, "input distribution sym=p,...");

  CLI::App* qcomplexity =
      app.add_subcommand("qcomplexity", "quantum memory Q_X in bits");
  qcomplexity->add_option("--spec", spec_path)->required();
  qcomplexity->add_option("--iid", iid_flag);

  CLI::App* structural =
      app.add_subcommand("structural", "supremum over IID inputs");
  structural->add_option("--spec", spec_path)->required();
  structural->add_option("--which", which)
      ->check(CLI::IsMember({"classical", "quantum"}));
  structural->add_option("--resolution", resolution);

  CLI::App* inefficiency =
      app.add_subcommand("inefficiency", "step-wise inefficiency witness");
  inefficiency->add_option("--spec", spec_path)->required();

  CLI::App* discriminate =
      app.add_subcommand("discriminate", "adaptive pair discrimination");
  discriminate->add_option("--spec", spec_path)->required();
  discriminate->add_option("--pair", pair_flag, "two states, comma separated")
      ->required();
  discriminate->add_option("--max-depth", max_depth);

  CLI::App* simulate =
      app.add_subcommand("simulate", "sample the quantum realization");
  simulate->add_option("--spec", spec_path)->required();
  simulate->add_option("--init", init_state)->required();
  simulate->add_option("--inputs", inputs_flag)->required();
  simulate->add_option("--seed", seed)->each([&](const std::string&) {
    seed_given = true;
  });
  simulate->add_option("--samples", samples);

  CLI::App* verify = app.add_subcommand(
      "verify", "trace distances between quantum and classical enumeration");
  verify->add_option("--spec", spec_path)->required();
  verify->add_option("--horizon", horizon);

  CLI::App* sweep = app.add_subcommand("sweep", "perturbed-coin grid (CSV)");
  sweep->add_option("--grid", grid);
  sweep->add_option("--p-min", p_min);
  sweep->add_option("--p-max", p_max);
  sweep->add_option("--q-min", q_min);
  sweep->add_option("--q-max", q_max);
  sweep->add_option("--resolution", resolution);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    auto load_minimal = [&]() { return minimize(load_spec_file(spec_path)); };
    auto iid_or_uniform = [&](const TransducerSpec& spec) {
      return iid_flag.empty() ? InputDistribution::uniform(spec.inputs())
                              : detail::parse_iid(spec.inputs(), iid_flag);
    };
    nlohmann::json report;

    if (validate->parsed()) {
      const TransducerSpec spec = load_spec_file(spec_path);
      report["valid"] = true;
      report["states"] = spec.states();
      report["inputs"] = spec.inputs().symbols();
      report["outputs"] = spec.outputs().symbols();
    } else if (minimize_cmd->parsed()) {
      const TransducerSpec spec = load_spec_file(spec_path);
      const Partition part = refine_partition(spec);
      nlohmann::json classes = nlohmann::json::array();
      for (const auto& cls : part.classes) {
        nlohmann::json members = nlohmann::json::array();
        for (std::size_t i : cls) members.push_back(spec.state(i));
        classes.push_back(members);
      }
      report["partition"] = {{"classes", classes},
                             {"identity", part.is_identity()}};
      report["spec"] = spec_to_json(quotient(spec, part));
    } else if (complexity->parsed() || qcomplexity->parsed()) {
      const TransducerSpec spec = load_minimal();
      const InputDistribution dist = iid_or_uniform(spec);
      const StationaryOccupancy occ =
          stationary_distribution(induced_chain(spec, dist));
      report["causal_states"] = spec.num_states();
      report["occupancy"] = detail::occupancy_json(spec, occ);
      report["non_pathological"] = is_non_pathological(occ);
      if (complexity->parsed()) {
        report["C_X"] = entropy_bits(occ.pi);
      } else {
        report["Q_X"] = iotrans::detail::weighted_gram_entropy(
            gram_matrix(spec), occ.pi);
      }
    } else if (structural->parsed()) {
      const TransducerSpec spec = load_minimal();
      const StructuralResult result = structural_complexity(
          spec,
          which == "quantum" ? ComplexityKind::Quantum
                             : ComplexityKind::Classical,
          resolution);
      report["value_bits"] = result.value_bits;
      nlohmann::json argmax = nlohmann::json::object();
      for (std::size_t x = 0; x < result.argmax.size(); ++x) {
        argmax[spec.inputs().symbol(x)] = result.argmax[x];
      }
      report["argmax_distribution"] = argmax;
    } else if (inefficiency->parsed()) {
      const TransducerSpec spec = load_minimal();
      const auto witness = is_stepwise_inefficient(spec);
      report["stepwise_inefficient"] = witness.has_value();
      if (witness) {
        report["witness"] = {spec.state(witness->first),
                             spec.state(witness->second)};
      } else {
        report["witness"] = nullptr;
      }
    } else if (discriminate->parsed()) {
      const TransducerSpec spec = load_minimal();
      const std::size_t comma = pair_flag.find(',');
      if (comma == std::string::npos) {
        throw Error(ErrorCode::ParseError, "--pair expects two states");
      }
      const std::size_t i = spec.state_index(pair_flag.substr(0, comma));
      const std::size_t j = spec.state_index(pair_flag.substr(comma + 1));
      const StrategyResult result = discrimination_strategy(spec, i, j,
                                                            max_depth);
      switch (result.status) {
        case StrategyResult::Status::Distinguished:
          report["status"] = "Distinguished";
          report["depth"] = result.depth;
          break;
        case StrategyResult::Status::ConditionIIFails:
          report["status"] = "ConditionIIFails";
          break;
        case StrategyResult::Status::DepthExhausted:
          report["status"] = "DepthExhausted";
          break;
      }
      report["pair"] = {spec.state(result.pair.first),
                        spec.state(result.pair.second)};
      nlohmann::json tree = nlohmann::json::array();
      for (const auto& [history, input] : result.decision_tree) {
        tree.push_back({{"history", detail::history_json(spec, history)},
                        {"input", spec.inputs().symbol(input)}});
      }
      report["decision_tree"] = tree;
      nlohmann::json conclusions = nlohmann::json::array();
      for (const auto& [history, survivor] : result.conclusions) {
        conclusions.push_back(
            {{"history", detail::history_json(spec, history)},
             {"initial_state", spec.state(survivor)}});
      }
      report["conclusions"] = conclusions;
    } else if (simulate->parsed()) {
      const TransducerSpec spec = load_minimal();
      const std::vector<std::size_t> word =
          detail::parse_word(spec.inputs(), inputs_flag);
      const std::uint64_t effective_seed =
          seed_given ? seed : detail::default_seed();
      const CircuitRealization real = build_realization(spec);
      std::map<std::string, std::size_t> counts;
      double min_fidelity = 1.0;
      SimRun last;
      for (std::size_t run = 0; run < samples; ++run) {
        last = simulate_quantum(spec, real, init_state, word,
                                effective_seed + run);
        std::vector<std::size_t> outputs;
        for (const auto& step : last.trace.steps) {
          outputs.push_back(spec.outputs().index_of(step.second));
        }
        ++counts[detail::format_word(spec.outputs(), outputs)];
        for (double f : last.fidelities) min_fidelity = std::min(min_fidelity, f);
      }
      report["seed"] = effective_seed;
      report["initial"] = init_state;
      report["inputs"] = detail::format_word(spec.inputs(), word);
      report["samples"] = samples;
      nlohmann::json counts_json = nlohmann::json::object();
      nlohmann::json empirical = nlohmann::json::object();
      for (const auto& [word_key, count] : counts) {
        counts_json[word_key] = count;
        empirical[word_key] = static_cast<double>(count) / samples;
      }
      report["counts"] = counts_json;
      report["empirical"] = empirical;
      report["min_fidelity"] = min_fidelity;
      if (samples == 1) report["fidelities"] = last.fidelities;
    } else if (verify->parsed()) {
      const TransducerSpec spec = load_minimal();
      if (horizon < 0 || horizon > kHorizonCap) {
        throw Error(ErrorCode::HorizonTooLarge,
                    "horizon must lie in [0, " + std::to_string(kHorizonCap) +
                        "]");
      }
      const CircuitRealization real = build_realization(spec);
      nlohmann::json per_word = nlohmann::json::array();
      double max_distance = 0.0;
      std::size_t checks = 0;
      std::vector<std::size_t> word;
      auto visit = [&](auto&& self, std::size_t length) -> void {
        if (word.size() == length) {
          for (std::size_t i = 0; i < spec.num_states(); ++i) {
            const double d = trace_distance(
                future_distribution(spec, i, word, word.size()),
                enumerate_quantum_branches(spec, real, i, word).dist);
            per_word.push_back(
                {{"state", spec.state(i)},
                 {"inputs", detail::format_word(spec.inputs(), word)},
                 {"trace_distance", d}});
            max_distance = std::max(max_distance, d);
            ++checks;
          }
          return;
        }
        for (std::size_t x = 0; x < spec.num_inputs(); ++x) {
          word.push_back(x);
          self(self, length);
          word.pop_back();
        }
      };
      for (int length = 1; length <= horizon; ++length) {
        visit(visit, static_cast<std::size_t>(length));
      }
      report["horizon"] = horizon;
      report["checks"] = checks;
      report["max_trace_distance"] = max_distance;
      report["per_word"] = per_word;
    } else if (sweep->parsed()) {
      write_sweep_csv(run_sweep(grid, p_min, p_max, q_min, q_max, resolution),
                      out);
      return 0;
    }

    out << report.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    nlohmann::json failure;
    failure["error"] = to_string(e.code());
    failure["message"] = e.what();
    out << failure.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace iotrans::cli
