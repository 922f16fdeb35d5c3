// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdio>
#include <ostream>
#include <thread>
#include <vector>

#include "iotrans/minimization.hpp"
#include "iotrans/process_model.hpp"
#include "iotrans/quantum_model.hpp"

namespace iotrans {

/// One grid point of the perturbed-coin parameter sweep.
struct SweepRow {
  double p = 0.0;
  double q = 0.0;
  double c_bar = 0.0;    // classical structural complexity, bits
  double q_bar = 0.0;    // quantum structural complexity, bits
  double overlap = 0.0;  // causal-state overlap sqrt(r)
};

/// Evaluates the perturbed coin on a (p, q) grid: per point the machine is
/// built, minimized, and both structural complexities are maximized over
/// IID inputs. Rows come back sorted by (p, q). Grid points are evaluated
/// in parallel.
inline std::vector<SweepRow> run_sweep(int grid_points, double p_min,
                                       double p_max, double q_min,
                                       double q_max,
                                       int structural_resolution = 64) {
  if (grid_points < 1) {
    throw Error(ErrorCode::ParameterOutOfRange, "grid must have >= 1 point");
  }
  if (!(p_min > 0.0 && p_max < 1.0 && p_min <= p_max) ||
      !(q_min > 0.0 && q_max < 1.0 && q_min <= q_max)) {
    throw Error(ErrorCode::ParameterOutOfRange,
                "sweep ranges must lie strictly inside (0, 1)");
  }

  auto coordinate = [&](double lo, double hi, int idx) {
    if (grid_points == 1) return lo;
    return lo + (hi - lo) * idx / static_cast<double>(grid_points - 1);
  };

  std::vector<SweepRow> rows(static_cast<std::size_t>(grid_points) *
                             grid_points);
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t slot = cursor.fetch_add(1);
      if (slot >= rows.size()) return;
      const int pi = static_cast<int>(slot) / grid_points;
      const int qi = static_cast<int>(slot) % grid_points;
      SweepRow row;
      row.p = coordinate(p_min, p_max, pi);
      row.q = coordinate(q_min, q_max, qi);
      const TransducerSpec minimal =
          minimize(actively_perturbed_coin(row.p, row.q));
      row.c_bar = structural_complexity(minimal, ComplexityKind::Classical,
                                        structural_resolution)
                      .value_bits;
      row.q_bar = structural_complexity(minimal, ComplexityKind::Quantum,
                                        structural_resolution)
                      .value_bits;
      row.overlap = minimal.num_states() == 2 ? quantum_overlap(minimal, 0, 1)
                                              : 1.0;
      rows[slot] = row;
    }
  };

  const unsigned hardware = std::thread::hardware_concurrency();
  const std::size_t workers =
      std::min<std::size_t>(rows.size(), hardware == 0 ? 1 : hardware);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

/// CSV with fixed header and 12 significant digits per value.
inline void write_sweep_csv(const std::vector<SweepRow>& rows,
                            std::ostream& out) {
  out << "p,q,c_bar,q_bar,overlap\n";
  char line[160];
  for (const SweepRow& row : rows) {
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g,%.12g\n", row.p,
                  row.q, row.c_bar, row.q_bar, row.overlap);
    out << line;
  }
}

}  // namespace iotrans
