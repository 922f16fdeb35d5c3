// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "iotrans/process_model.hpp"

namespace iotrans {

/// Transition matrix over causal states after marginalizing inputs and
/// outputs: M_ij = sum_x P(x) sum_y T[i][x][y][j].
inline Eigen::MatrixXd induced_chain(const TransducerSpec& spec,
                                     const InputDistribution& dist) {
  if (dist.size() != spec.num_inputs()) {
    throw Error(ErrorCode::DimensionMismatch,
                "input distribution does not match the input alphabet");
  }
  const std::size_t n = spec.num_states();
  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t x = 0; x < spec.num_inputs(); ++x) {
      const double px = dist.prob(x);
      if (px == 0.0) continue;
      for (std::size_t y = 0; y < spec.num_outputs(); ++y) {
        for (std::size_t j = 0; j < n; ++j) {
          chain(i, j) += px * spec.prob(i, x, y, j);
        }
      }
    }
  }
  return chain;
}

/// Stationary probability of each causal state.
struct StationaryOccupancy {
  std::vector<double> pi;
};

namespace detail {

inline bool strongly_connected(const Eigen::MatrixXd& chain) {
  const std::size_t n = static_cast<std::size_t>(chain.rows());
  auto reachable = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t w = 0; w < n; ++w) {
        const double edge = forward ? chain(v, w) : chain(w, v);
        if (edge > kProbEps && !seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reachable(true) && reachable(false);
}

}  // namespace detail

/// Solves pi M = pi, sum(pi) = 1 for an irreducible row-stochastic chain.
/// Irreducibility is checked as strong connectivity of the support graph;
/// reducible chains are rejected rather than given a conventional answer.
inline StationaryOccupancy stationary_distribution(const Eigen::MatrixXd& chain) {
  if (chain.rows() != chain.cols() || chain.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "chain must be square");
  }
  const std::size_t n = static_cast<std::size_t>(chain.rows());
  if (!detail::strongly_connected(chain)) {
    throw Error(ErrorCode::ReducibleChain,
                "support graph is not strongly connected");
  }

  // (M^T - I) pi = 0 with the last balance equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a = chain.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd pi = a.colPivHouseholderQr().solve(b);

  const double residual = (pi.transpose() * chain - pi.transpose()).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    throw Error(ErrorCode::NumericalRankFailure,
                "stationary solve residual " + std::to_string(residual));
  }

  StationaryOccupancy occ;
  occ.pi.resize(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    occ.pi[i] = std::max(pi(i), 0.0);
    sum += occ.pi[i];
  }
  for (double& p : occ.pi) p /= sum;
  return occ;
}

/// C_X in bits: Shannon entropy of the stationary causal-state occupancy.
inline double classical_complexity(const TransducerSpec& spec,
                                   const InputDistribution& dist) {
  return entropy_bits(stationary_distribution(induced_chain(spec, dist)).pi);
}

/// True iff every causal state has strictly positive stationary probability.
inline bool is_non_pathological(const StationaryOccupancy& occ) {
  return std::all_of(occ.pi.begin(), occ.pi.end(),
                     [](double p) { return p > kProbEps; });
}

/// Finds an input x for which states i and j can never produce a coinciding
/// (output, successor) pair, i.e. T[i][x][y][k] * T[j][x][y][k] = 0 for all
/// (y, k). Returns the first such input, or nothing.
inline std::optional<std::size_t> condition_II_input(const TransducerSpec& spec,
                                                     std::size_t i,
                                                     std::size_t j) {
  for (std::size_t x = 0; x < spec.num_inputs(); ++x) {
    bool separating = true;
    for (std::size_t y = 0; y < spec.num_outputs() && separating; ++y) {
      for (std::size_t k = 0; k < spec.num_states(); ++k) {
        if (spec.prob(i, x, y, k) > kProbEps &&
            spec.prob(j, x, y, k) > kProbEps) {
          separating = false;
          break;
        }
      }
    }
    if (separating) return x;
  }
  return std::nullopt;
}

/// Returns a witness pair of states that can reach a coinciding (output,
/// successor) pair under every input, or nothing if the machine is
/// step-wise efficient.
inline std::optional<std::pair<std::size_t, std::size_t>> is_stepwise_inefficient(
    const TransducerSpec& spec) {
  for (std::size_t i = 0; i < spec.num_states(); ++i) {
    for (std::size_t j = i + 1; j < spec.num_states(); ++j) {
      if (!condition_II_input(spec, i, j).has_value()) {
        return std::make_pair(i, j);
      }
    }
  }
  return std::nullopt;
}

/// Outcome of the adaptive pairwise discrimination procedure.
///
/// Distinguished(depth): some adaptive input strategy is guaranteed to rule
/// out one of the two initial hypotheses within `depth` steps; the optimal
/// strategy is returned as a decision tree mapping each observed
/// (input, output) history to the next input.
/// ConditionIIFails(pair): every strategy runs into a reachable pair of
/// hypothesis states with no separating input.
/// DepthExhausted: separating inputs exist everywhere reached, but pair
/// cycles (or the depth cap) prevent guaranteed resolution.
struct StrategyResult {
  enum class Status { Distinguished, ConditionIIFails, DepthExhausted };
  using History = std::vector<std::pair<std::size_t, std::size_t>>;

  Status status = Status::DepthExhausted;
  int depth = 0;
  std::pair<std::size_t, std::size_t> pair{0, 0};
  std::map<History, std::size_t> decision_tree;   // history -> next input
  std::map<History, std::size_t> conclusions;     // resolved history -> survivor
};

namespace detail {

inline constexpr int kUnreachableDepth = 1 << 28;

// Minimal guaranteed resolution depth for every ordered state pair, by
// value iteration over the pair graph. Pairs on cycles (or leading only to
// pairs without separating inputs) stay at kUnreachableDepth.
inline std::vector<std::vector<int>> pair_resolution_depths(
    const TransducerSpec& spec) {
  const std::size_t n = spec.num_states();
  std::vector<std::vector<int>> depth(n, std::vector<int>(n, kUnreachableDepth));
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        int best = kUnreachableDepth;
        for (std::size_t x = 0; x < spec.num_inputs(); ++x) {
          bool separating = true;
          int worst = 0;
          for (std::size_t y = 0; y < spec.num_outputs(); ++y) {
            const bool pa = spec.emission_prob(a, x, y) > kProbEps;
            const bool pb = spec.emission_prob(b, x, y) > kProbEps;
            if (!pa && !pb) continue;
            if (pa && pb) {
              const std::size_t na = propagator(spec, a, x, y);
              const std::size_t nb = propagator(spec, b, x, y);
              if (na == nb) {
                separating = false;
                break;
              }
              worst = std::max(worst, depth[na][nb]);
            }
          }
          if (separating && worst < kUnreachableDepth) {
            best = std::min(best, 1 + worst);
          }
        }
        if (best < depth[a][b]) {
          depth[a][b] = best;
          changed = true;
        }
      }
    }
  }
  return depth;
}

inline void build_decision_tree(const TransducerSpec& spec,
                                const std::vector<std::vector<int>>& depth,
                                std::size_t a, std::size_t b,
                                StrategyResult::History history,
                                StrategyResult& result) {
  // Pick the smallest input attaining the optimal worst-case depth.
  for (std::size_t x = 0; x < spec.num_inputs(); ++x) {
    bool separating = true;
    int worst = 0;
    std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> shared;
    std::vector<std::pair<std::size_t, bool>> resolved;  // (y, a-side survives)
    for (std::size_t y = 0; y < spec.num_outputs(); ++y) {
      const bool pa = spec.emission_prob(a, x, y) > kProbEps;
      const bool pb = spec.emission_prob(b, x, y) > kProbEps;
      if (!pa && !pb) continue;
      if (pa && pb) {
        const std::size_t na = propagator(spec, a, x, y);
        const std::size_t nb = propagator(spec, b, x, y);
        if (na == nb) {
          separating = false;
          break;
        }
        worst = std::max(worst, depth[na][nb]);
        shared.push_back({y, {na, nb}});
      } else {
        resolved.push_back({y, pa});
      }
    }
    if (!separating || 1 + worst != depth[a][b]) continue;

    result.decision_tree[history] = x;
    for (const auto& [y, a_side] : resolved) {
      StrategyResult::History leaf = history;
      leaf.push_back({x, y});
      result.conclusions[leaf] = a_side ? 0 : 1;  // placeholder, fixed below
    }
    for (const auto& [y, next] : shared) {
      StrategyResult::History child = history;
      child.push_back({x, y});
      build_decision_tree(spec, depth, next.first, next.second, std::move(child),
                         result);
    }
    return;
  }
}

}  // namespace detail

/// Adaptive discrimination between initial hypotheses S = i and S = j,
/// following separating inputs and advancing both hypotheses with the
/// propagator on every shared output.
inline StrategyResult discrimination_strategy(const TransducerSpec& spec,
                                              std::size_t i, std::size_t j,
                                              int max_depth) {
  if (i == j || i >= spec.num_states() || j >= spec.num_states()) {
    throw Error(ErrorCode::ParameterOutOfRange,
                "discrimination requires two distinct states");
  }
  const auto depth = detail::pair_resolution_depths(spec);

  StrategyResult result;
  result.pair = {i, j};
  if (depth[i][j] <= max_depth) {
    result.status = StrategyResult::Status::Distinguished;
    result.depth = depth[i][j];
    detail::build_decision_tree(spec, depth, i, j, {}, result);
    // Conclusions name the surviving initial hypothesis.
    for (auto& [history, survivor] : result.conclusions) {
      survivor = survivor == 0 ? i : j;
    }
    return result;
  }

  // Not resolvable within the cap: search the pair graph reachable through
  // separating inputs for a pair with no separating input at all.
  std::set<std::pair<std::size_t, std::size_t>> visited;
  std::deque<std::pair<std::size_t, std::size_t>> queue{{i, j}};
  visited.insert({i, j});
  while (!queue.empty()) {
    const auto [a, b] = queue.front();
    queue.pop_front();
    bool any_separating = false;
    for (std::size_t x = 0; x < spec.num_inputs(); ++x) {
      bool separating = true;
      std::vector<std::pair<std::size_t, std::size_t>> children;
      for (std::size_t y = 0; y < spec.num_outputs(); ++y) {
        const bool pa = spec.emission_prob(a, x, y) > kProbEps;
        const bool pb = spec.emission_prob(b, x, y) > kProbEps;
        if (pa && pb) {
          const std::size_t na = propagator(spec, a, x, y);
          const std::size_t nb = propagator(spec, b, x, y);
          if (na == nb) {
            separating = false;
            break;
          }
          children.push_back({na, nb});
        }
      }
      if (separating) {
        any_separating = true;
        for (const auto& child : children) {
          if (visited.insert(child).second) queue.push_back(child);
        }
      }
    }
    if (!any_separating) {
      result.status = StrategyResult::Status::ConditionIIFails;
      result.pair = {a, b};
      return result;
    }
  }

  result.status = StrategyResult::Status::DepthExhausted;
  return result;
}

/// Exact distribution over output words of a fixed length.
struct FutureDistribution {
  std::size_t horizon = 0;
  std::map<std::vector<std::size_t>, double> probs;  // word -> probability
};

namespace detail {

template <typename NextInput>
inline void enumerate_futures(const TransducerSpec& spec, std::size_t state,
                              std::size_t step, std::size_t horizon,
                              double mass, std::vector<std::size_t>& word,
                              StrategyResult::History& history,
                              const NextInput& next_input,
                              FutureDistribution& out) {
  if (step == horizon) {
    out.probs[word] += mass;
    return;
  }
  const std::size_t x = next_input(history, step);
  for (std::size_t y = 0; y < spec.num_outputs(); ++y) {
    const double p = spec.emission_prob(state, x, y);
    if (p <= kProbEps) continue;
    word.push_back(y);
    history.push_back({x, y});
    enumerate_futures(spec, propagator(spec, state, x, y), step + 1, horizon,
                      mass * p, word, history, next_input, out);
    history.pop_back();
    word.pop_back();
  }
}

}  // namespace detail

/// Output-word distribution for a fixed input word applied from `state`.
inline FutureDistribution future_distribution(
    const TransducerSpec& spec, std::size_t state,
    const std::vector<std::size_t>& input_word, std::size_t horizon,
    int horizon_cap = kHorizonCap) {
  if (horizon > static_cast<std::size_t>(horizon_cap)) {
    throw Error(ErrorCode::HorizonTooLarge,
                "horizon " + std::to_string(horizon) + " exceeds cap " +
                    std::to_string(horizon_cap));
  }
  if (input_word.size() < horizon) {
    throw Error(ErrorCode::HorizonMismatch,
                "input word shorter than requested horizon");
  }
  FutureDistribution out;
  out.horizon = horizon;
  std::vector<std::size_t> word;
  StrategyResult::History history;
  detail::enumerate_futures(
      spec, state, 0, horizon, 1.0, word, history,
      [&](const StrategyResult::History&, std::size_t step) {
        return input_word[step];
      },
      out);
  return out;
}

/// Output-word distribution with inputs chosen adaptively by the decision
/// tree of a discrimination strategy. Histories past the resolved leaves
/// fall back to the first input symbol.
inline FutureDistribution future_distribution(const TransducerSpec& spec,
                                              std::size_t state,
                                              const StrategyResult& strategy,
                                              std::size_t horizon,
                                              int horizon_cap = kHorizonCap) {
  if (horizon > static_cast<std::size_t>(horizon_cap)) {
    throw Error(ErrorCode::HorizonTooLarge,
                "horizon " + std::to_string(horizon) + " exceeds cap " +
                    std::to_string(horizon_cap));
  }
  FutureDistribution out;
  out.horizon = horizon;
  std::vector<std::size_t> word;
  StrategyResult::History history;
  detail::enumerate_futures(
      spec, state, 0, horizon, 1.0, word, history,
      [&](const StrategyResult::History& h, std::size_t) -> std::size_t {
        auto it = strategy.decision_tree.find(h);
        return it == strategy.decision_tree.end() ? 0 : it->second;
      },
      out);
  return out;
}

/// Half L1 distance between two output-word distributions.
inline double trace_distance(const FutureDistribution& p,
                             const FutureDistribution& q) {
  if (p.horizon != q.horizon) {
    throw Error(ErrorCode::HorizonMismatch,
                "distributions have different horizons");
  }
  double total = 0.0;
  auto it_p = p.probs.begin();
  auto it_q = q.probs.begin();
  while (it_p != p.probs.end() || it_q != q.probs.end()) {
    if (it_q == q.probs.end() ||
        (it_p != p.probs.end() && it_p->first < it_q->first)) {
      total += std::abs(it_p->second);
      ++it_p;
    } else if (it_p == p.probs.end() || it_q->first < it_p->first) {
      total += std::abs(it_q->second);
      ++it_q;
    } else {
      total += std::abs(it_p->second - it_q->second);
      ++it_p;
      ++it_q;
    }
  }
  return 0.5 * total;
}

}  // namespace iotrans
