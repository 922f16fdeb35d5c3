// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "iotrans/classical_analysis.hpp"
#include "iotrans/process_model.hpp"

namespace iotrans {

/// Overlap of the quantum causal states of i and j:
/// prod_x sum_{y,k} sqrt(T[i][x][y][k] * T[j][x][y][k]).
///
/// The amplitudes are non-negative square roots throughout, so every
/// overlap lands in [0, 1] and the whole construction stays real.
inline double quantum_overlap(const TransducerSpec& spec, std::size_t i,
                              std::size_t j) {
  double result = 1.0;
  for (std::size_t x = 0; x < spec.num_inputs(); ++x) {
    double component = 0.0;
    for (std::size_t y = 0; y < spec.num_outputs(); ++y) {
      for (std::size_t k = 0; k < spec.num_states(); ++k) {
        const double a = spec.prob(i, x, y, k);
        const double b = spec.prob(j, x, y, k);
        if (a > 0.0 && b > 0.0) component += std::sqrt(a * b);
      }
    }
    result *= component;
  }
  return result;
}

/// Gram matrix G_ij of the quantum causal states. Symmetric with unit
/// diagonal; positive semidefiniteness is certified (a violation signals an
/// upstream bug, not bad user input).
inline Eigen::MatrixXd gram_matrix(const TransducerSpec& spec) {
  const std::size_t n = spec.num_states();
  Eigen::MatrixXd gram(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    gram(i, i) = quantum_overlap(spec, i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      gram(i, j) = gram(j, i) = quantum_overlap(spec, i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram,
                                                     Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-8) {
    throw Error(ErrorCode::NotPSD,
                "gram matrix has eigenvalue " +
                    std::to_string(eig.eigenvalues().minCoeff()));
  }
  return gram;
}

/// Compressed causal states: vectors of dimension rank(G) whose pairwise
/// inner products reproduce the Gram matrix.
struct CompressedStates {
  Eigen::MatrixXd vectors;  // n x rank, row i = tau_i

  std::size_t rank() const { return static_cast<std::size_t>(vectors.cols()); }
  Eigen::VectorXd tau(std::size_t i) const { return vectors.row(i).transpose(); }
};

/// Gram-Schmidt factorization of a PSD Gram matrix, skipping dependent
/// states. Pivots below 1e-9 are treated as exact linear dependence, which
/// keeps the construction deterministic and rank-revealing.
inline CompressedStates compressed_states(const Eigen::MatrixXd& gram) {
  if (gram.rows() != gram.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "gram matrix must be square");
  }
  const std::size_t n = static_cast<std::size_t>(gram.rows());
  constexpr double kRankTol = 1e-9;

  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::size_t> pivots;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < pivots.size(); ++m) {
      double value = gram(i, pivots[m]);
      for (std::size_t t = 0; t < m; ++t) {
        value -= lower(i, t) * lower(pivots[m], t);
      }
      lower(i, m) = value / lower(pivots[m], m);
    }
    double residual = gram(i, i);
    for (std::size_t t = 0; t < pivots.size(); ++t) {
      residual -= lower(i, t) * lower(i, t);
    }
    if (residual < -1e-8) {
      throw Error(ErrorCode::NotPSD,
                  "negative pivot " + std::to_string(residual));
    }
    if (residual > kRankTol) {
      lower(i, pivots.size()) = std::sqrt(residual);
      pivots.push_back(i);
    }
  }

  CompressedStates states;
  states.vectors = lower.leftCols(static_cast<Eigen::Index>(pivots.size()));
  return states;
}

/// rho_X assembled from the compressed states: sum_i p_i |tau_i><tau_i|.
struct DensityMatrix {
  Eigen::MatrixXd rho;
};

inline DensityMatrix density_matrix(const Eigen::MatrixXd& gram,
                                    const StationaryOccupancy& occ) {
  if (static_cast<std::size_t>(gram.rows()) != occ.pi.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "occupancy does not match gram dimension");
  }
  const CompressedStates states = compressed_states(gram);
  const std::size_t r = states.rank();
  DensityMatrix dm;
  dm.rho = Eigen::MatrixXd::Zero(r, r);
  for (std::size_t i = 0; i < occ.pi.size(); ++i) {
    const Eigen::VectorXd tau = states.tau(i);
    dm.rho += occ.pi[i] * tau * tau.transpose();
  }
  const double trace = dm.rho.trace();
  if (std::abs(trace - 1.0) > 1e-10) {
    throw Error(ErrorCode::NumericalRankFailure,
                "density matrix trace " + std::to_string(trace));
  }
  return dm;
}

namespace detail {

/// Entropy in bits of the spectrum of sqrt(p) G sqrt(p), which shares its
/// nonzero eigenvalues with rho_X but stays n-dimensional.
inline double weighted_gram_entropy(const Eigen::MatrixXd& gram,
                                    const std::vector<double>& pi) {
  const std::size_t n = pi.size();
  Eigen::MatrixXd weighted(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      weighted(i, j) = std::sqrt(pi[i] * pi[j]) * gram(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(weighted,
                                                     Eigen::EigenvaluesOnly);
  std::vector<double> lambdas;
  lambdas.reserve(n);
  for (Eigen::Index t = 0; t < eig.eigenvalues().size(); ++t) {
    lambdas.push_back(std::max(eig.eigenvalues()(t), 0.0));
  }
  return entropy_bits(lambdas);
}

}  // namespace detail

/// Q_X in bits: von Neumann entropy of rho_X.
inline double quantum_complexity(const TransducerSpec& spec,
                                 const InputDistribution& dist) {
  const StationaryOccupancy occ =
      stationary_distribution(induced_chain(spec, dist));
  return detail::weighted_gram_entropy(gram_matrix(spec), occ.pi);
}

/// True iff all quantum causal states are mutually orthogonal.
inline bool condition_I_orthogonal(const TransducerSpec& spec) {
  const Eigen::MatrixXd gram = gram_matrix(spec);
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) {
      if (gram(i, j) > kProbEps) return false;
    }
  }
  return true;
}

enum class ComplexityKind { Classical, Quantum };

/// Result of the supremum search over IID input distributions.
struct StructuralResult {
  double value_bits = 0.0;
  std::vector<double> argmax;  // index-aligned with the input alphabet
};

/// Supremum of C_X (or Q_X) over IID input distributions, approximated on a
/// simplex grid of the given per-coordinate resolution and refined by one
/// deterministic local-search pass. A lower bound to the supremum over all
/// stationary input processes.
inline StructuralResult structural_complexity(const TransducerSpec& spec,
                                              ComplexityKind kind,
                                              int grid_resolution = 64) {
  if (grid_resolution < 1) {
    throw Error(ErrorCode::ParameterOutOfRange,
                "grid resolution must be positive");
  }
  const std::size_t m = spec.num_inputs();
  const Eigen::MatrixXd gram =
      kind == ComplexityKind::Quantum ? gram_matrix(spec) : Eigen::MatrixXd();

  auto evaluate = [&](const std::vector<double>& weights)
      -> std::optional<double> {
    Eigen::MatrixXd chain =
        induced_chain(spec, InputDistribution::from_probs(weights));
    StationaryOccupancy occ;
    try {
      occ = stationary_distribution(chain);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ReducibleChain) return std::nullopt;
      throw;
    }
    return kind == ComplexityKind::Classical
               ? entropy_bits(occ.pi)
               : detail::weighted_gram_entropy(gram, occ.pi);
  };

  std::optional<double> best;
  std::vector<double> best_weights;

  std::vector<int> counts(m, 0);
  auto visit = [&](auto&& self, std::size_t coord, int remaining) -> void {
    if (coord + 1 == m) {
      counts[coord] = remaining;
      std::vector<double> weights(m);
      for (std::size_t t = 0; t < m; ++t) {
        weights[t] = static_cast<double>(counts[t]) / grid_resolution;
      }
      const auto value = evaluate(weights);
      if (value && (!best || *value > *best)) {
        best = value;
        best_weights = weights;
      }
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[coord] = c;
      self(self, coord + 1, remaining - c);
    }
  };
  visit(visit, 0, grid_resolution);

  if (!best) {
    throw Error(ErrorCode::ReducibleChain,
                "induced chain is reducible for every grid distribution");
  }

  // One local-search pass: shrinking mass moves between coordinate pairs.
  double step = 1.0 / grid_resolution;
  for (int iteration = 0; iteration < 25 && m > 1; ++iteration) {
    step *= 0.5;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b || best_weights[a] == 0.0) continue;
        std::vector<double> candidate = best_weights;
        const double move = std::min(step, candidate[a]);
        candidate[a] -= move;
        candidate[b] += move;
        double sum = 0.0;
        for (double w : candidate) sum += w;
        for (double& w : candidate) w /= sum;
        const auto value = evaluate(candidate);
        if (value && *value > *best + 1e-15) {
          best = value;
          best_weights = candidate;
        }
      }
    }
  }

  return {*best, best_weights};
}

}  // namespace iotrans
