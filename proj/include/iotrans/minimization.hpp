// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "iotrans/process_model.hpp"

namespace iotrans {

/// Grouping of states into behavioural equivalence classes. Classes are
/// numbered canonically by their smallest member state index.
struct Partition {
  std::vector<std::size_t> class_of;               // state index -> class
  std::vector<std::vector<std::size_t>> classes;   // class -> sorted members

  std::size_t num_classes() const { return classes.size(); }

  bool is_identity() const { return classes.size() == class_of.size(); }
};

namespace detail {

// Signature of a state given the current partition: for every (input,
// output, class) the probability mass of landing in that class.
inline std::vector<double> state_signature(const TransducerSpec& spec,
                                           const std::vector<std::size_t>& class_of,
                                           std::size_t num_classes,
                                           std::size_t i) {
  std::vector<double> sig(spec.num_inputs() * spec.num_outputs() * num_classes,
                          0.0);
  for (std::size_t x = 0; x < spec.num_inputs(); ++x) {
    for (std::size_t y = 0; y < spec.num_outputs(); ++y) {
      for (std::size_t j = 0; j < spec.num_states(); ++j) {
        const double p = spec.prob(i, x, y, j);
        if (p != 0.0) {
          sig[(x * spec.num_outputs() + y) * num_classes + class_of[j]] += p;
        }
      }
    }
  }
  return sig;
}

inline bool signatures_match(const std::vector<double>& a,
                             const std::vector<double>& b) {
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (std::abs(a[t] - b[t]) > kProbEps) return false;
  }
  return true;
}

inline Partition canonicalize(std::vector<std::vector<std::size_t>> groups,
                              std::size_t num_states) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  Partition part;
  part.classes = std::move(groups);
  part.class_of.assign(num_states, 0);
  for (std::size_t c = 0; c < part.classes.size(); ++c) {
    for (std::size_t i : part.classes[c]) part.class_of[i] = c;
  }
  return part;
}

}  // namespace detail

/// Coarsest partition of the states stable under one-step signature
/// refinement: two states share a class only if, for every input, their
/// distributions over (output, successor class) coincide within kProbEps.
/// Starts from the trivial one-class partition and splits until fixed point.
inline Partition refine_partition(const TransducerSpec& spec) {
  const std::size_t n = spec.num_states();
  Partition part = detail::canonicalize({[&] {
                                           std::vector<std::size_t> all(n);
                                           for (std::size_t i = 0; i < n; ++i)
                                             all[i] = i;
                                           return all;
                                         }()},
                                        n);
  for (;;) {
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& cls : part.classes) {
      // Split the class by signature, keeping the first matching leader.
      std::vector<std::vector<double>> leader_sigs;
      std::vector<std::vector<std::size_t>> split;
      for (std::size_t i : cls) {
        auto sig = detail::state_signature(spec, part.class_of,
                                           part.num_classes(), i);
        bool placed = false;
        for (std::size_t g = 0; g < leader_sigs.size(); ++g) {
          if (detail::signatures_match(leader_sigs[g], sig)) {
            split[g].push_back(i);
            placed = true;
            break;
          }
        }
        if (!placed) {
          leader_sigs.push_back(std::move(sig));
          split.push_back({i});
        }
      }
      for (auto& g : split) groups.push_back(std::move(g));
    }
    Partition next = detail::canonicalize(std::move(groups), n);
    if (next.num_classes() == part.num_classes()) return next;
    part = std::move(next);
  }
}

/// Collapses each class to a single state. Member rows must agree within
/// kProbEps at class granularity; agreeing rows are averaged. Class labels
/// are inherited from the smallest member.
inline TransducerSpec quotient(const TransducerSpec& spec,
                               const Partition& part) {
  const std::size_t nc = part.num_classes();
  const std::size_t nx = spec.num_inputs();
  const std::size_t ny = spec.num_outputs();

  std::vector<double> rows(nc * nx * ny * nc, 0.0);
  auto offset = [&](std::size_t c, std::size_t x, std::size_t y,
                    std::size_t d) { return ((c * nx + x) * ny + y) * nc + d; };

  for (std::size_t c = 0; c < nc; ++c) {
    const auto& members = part.classes[c];
    std::vector<double> first;
    for (std::size_t m = 0; m < members.size(); ++m) {
      auto sig = detail::state_signature(spec, part.class_of, nc, members[m]);
      if (m == 0) {
        first = sig;
      } else {
        for (std::size_t t = 0; t < sig.size(); ++t) {
          if (std::abs(sig[t] - first[t]) > kProbEps) {
            throw Error(ErrorCode::InconsistentPartition,
                        "states '" + spec.state(members[0]) + "' and '" +
                            spec.state(members[m]) +
                            "' disagree beyond tolerance");
          }
        }
      }
      for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y) {
          for (std::size_t d = 0; d < nc; ++d) {
            rows[offset(c, x, y, d)] += sig[(x * ny + y) * nc + d];
          }
        }
      }
    }
    const double inv = 1.0 / static_cast<double>(members.size());
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t d = 0; d < nc; ++d) rows[offset(c, x, y, d)] *= inv;
      }
    }
  }

  RawSpec raw;
  raw.inputs = spec.inputs().symbols();
  raw.outputs = spec.outputs().symbols();
  for (std::size_t c = 0; c < nc; ++c) {
    raw.states.push_back(spec.state(part.classes[c].front()));
  }
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t d = 0; d < nc; ++d) {
          const double p = rows[offset(c, x, y, d)];
          if (p > 0.0) {
            raw.transitions.push_back({raw.states[c], spec.inputs().symbol(x),
                                       spec.outputs().symbol(y), raw.states[d],
                                       p});
          }
        }
      }
    }
  }
  return validate_spec(raw);
}

/// Convenience: refine and collapse in one call.
inline TransducerSpec minimize(const TransducerSpec& spec) {
  return quotient(spec, refine_partition(spec));
}

}  // namespace iotrans
