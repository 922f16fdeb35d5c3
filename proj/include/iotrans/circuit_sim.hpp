// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iotrans/classical_analysis.hpp"
#include "iotrans/process_model.hpp"
#include "iotrans/quantum_model.hpp"

namespace iotrans {

/// Per-input components of the quantum causal states. Component (i, x) is
/// the vector of dimension |Y|*n with amplitude sqrt(T[i][x][y][k]) on the
/// basis ket |y>|k> at index y*n + k. The full causal state is the tensor
/// product of the components over all inputs, with x = 0 as the most
/// significant factor.
struct FullCausalStates {
  std::vector<std::vector<Eigen::VectorXd>> comp;  // [state][input]
  std::size_t ns = 0, nx = 0, ny = 0;

  /// Dimension of the full product space, or 0 when it exceeds the guard.
  std::size_t kron_dim() const {
    const std::size_t base = ny * ns;
    std::size_t dim = 1;
    for (std::size_t x = 0; x < nx; ++x) {
      if (dim > kAmplitudeGuard / base) return 0;
      dim *= base;
    }
    return dim;
  }

  /// Materializes the full product-state vector of causal state i.
  Eigen::VectorXd kron(std::size_t i) const {
    const std::size_t dim = kron_dim();
    if (dim == 0) {
      throw Error(ErrorCode::DimensionMismatch,
                  "full causal state exceeds the amplitude guard");
    }
    Eigen::VectorXd state = Eigen::VectorXd::Ones(1);
    for (std::size_t x = 0; x < nx; ++x) {
      Eigen::VectorXd next(state.size() * comp[i][x].size());
      for (Eigen::Index a = 0; a < state.size(); ++a) {
        next.segment(a * comp[i][x].size(), comp[i][x].size()) =
            state(a) * comp[i][x];
      }
      state = std::move(next);
    }
    return state;
  }
};

inline FullCausalStates build_full_states(const TransducerSpec& spec) {
  FullCausalStates full;
  full.ns = spec.num_states();
  full.nx = spec.num_inputs();
  full.ny = spec.num_outputs();
  full.comp.assign(full.ns, std::vector<Eigen::VectorXd>(full.nx));
  for (std::size_t i = 0; i < full.ns; ++i) {
    for (std::size_t x = 0; x < full.nx; ++x) {
      Eigen::VectorXd& v = full.comp[i][x];
      v = Eigen::VectorXd::Zero(full.ny * full.ns);
      for (std::size_t y = 0; y < full.ny; ++y) {
        for (std::size_t k = 0; k < full.ns; ++k) {
          const double t = spec.prob(i, x, y, k);
          if (t > 0.0) v(y * full.ns + k) = std::sqrt(t);
        }
      }
    }
  }
  return full;
}

namespace detail {

struct GramSchmidt {
  Eigen::MatrixXd basis;   // D x rank, orthonormal columns
  Eigen::MatrixXd coeffs;  // rank x k, column j = coordinates of input j
};

/// Modified Gram-Schmidt with dependency skipping: columns whose residual
/// squared norm falls below `tol` are treated as exact linear combinations
/// of the earlier ones.
inline GramSchmidt modified_gram_schmidt(const Eigen::MatrixXd& m,
                                         double tol = 1e-9) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  Eigen::MatrixXd basis(rows, cols);
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(cols, cols);
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    Eigen::VectorXd v = m.col(j);
    for (Eigen::Index t = 0; t < rank; ++t) {
      const double c = basis.col(t).dot(v);
      v -= c * basis.col(t);
      coeffs(t, j) = c;
    }
    const double residual = v.squaredNorm();
    if (residual > tol) {
      basis.col(rank) = v / std::sqrt(residual);
      coeffs(rank, j) = std::sqrt(residual);
      ++rank;
    }
  }
  GramSchmidt out;
  out.basis = basis.leftCols(rank);
  out.coeffs = coeffs.topRows(rank);
  return out;
}

/// Completes orthonormal columns to a full square orthogonal matrix.
inline Eigen::MatrixXd complete_orthonormal(const Eigen::MatrixXd& q) {
  const Eigen::Index dim = q.rows();
  const Eigen::Index rank = q.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd result(dim, dim);
  result.leftCols(rank) = q;
  result.rightCols(dim - rank) = full.rightCols(dim - rank);
  return result;
}

/// Orthogonal map sending each domain column to the corresponding range
/// column, built by matching Gram-Schmidt bases and completing both sides.
/// Requires the two column families to have coinciding inner products.
inline Eigen::MatrixXd orthonormal_image_map(const Eigen::MatrixXd& domain,
                                             const Eigen::MatrixXd& range) {
  if (domain.rows() != range.rows() || domain.cols() != range.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "domain and range shapes differ");
  }
  const GramSchmidt d = modified_gram_schmidt(domain);
  const GramSchmidt r = modified_gram_schmidt(range);
  if (d.coeffs.rows() != r.coeffs.rows() ||
      (d.coeffs - r.coeffs).cwiseAbs().maxCoeff() > 1e-8) {
    throw Error(ErrorCode::NumericalRankFailure,
                "domain and range inner products disagree");
  }
  const Eigen::MatrixXd qd = complete_orthonormal(d.basis);
  const Eigen::MatrixXd qr = complete_orthonormal(r.basis);
  return qr * qd.transpose();
}

}  // namespace detail

/// Explicit quantum realization of a transducer step: the operation B that
/// remaps successors onto compressed causal states, the decompression
/// isometry back to the full product space, and the projective output
/// measurement on the emitted register.
struct CircuitRealization {
  CompressedStates tau;
  FullCausalStates full;
  Eigen::MatrixXd b_op;  // (|Y| r) x (|Y| n): |y>|k> -> |y>|tau_k>
  // Decompression W: D x r isometry with W tau_i = |s_i>, materialized when
  // the product dimension D fits the amplitude guard.
  Eigen::MatrixXd decompression;
  // Full unitary extension of W (ancilla directions completed), materialized
  // when D^2 fits the guard.
  std::optional<Eigen::MatrixXd> u_op;
  std::size_t ns = 0, nx = 0, ny = 0, rank = 0, dim = 0;

  bool has_full_space() const { return decompression.size() > 0; }

  /// Kraus family of B: B_{yk} = |y>|tau_k><y|<k|.
  Eigen::MatrixXd kraus_operator(std::size_t y, std::size_t k) const {
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(ny * rank, ny * ns);
    op.block(y * rank, y * ns + k, rank, 1) = tau.tau(k);
    return op;
  }

  /// Completeness sum of the Kraus family on the step input space.
  Eigen::MatrixXd kraus_completeness_sum() const {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(ny * ns, ny * ns);
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t k = 0; k < ns; ++k) {
        const Eigen::MatrixXd op = kraus_operator(y, k);
        sum += op.transpose() * op;
      }
    }
    return sum;
  }

  /// Projector |y><y| (x) 1 on the post-B space.
  Eigen::MatrixXd output_projector(std::size_t y) const {
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(ny * rank, ny * rank);
    proj.block(y * rank, y * rank, rank, rank) =
        Eigen::MatrixXd::Identity(rank, rank);
    return proj;
  }

  /// Conditional output distribution of one step, from the squared
  /// amplitudes of the emitted register.
  std::vector<double> step_distribution(std::size_t i, std::size_t x) const {
    const Eigen::VectorXd amp = b_op * full.comp[i][x];
    std::vector<double> probs(ny);
    for (std::size_t y = 0; y < ny; ++y) {
      probs[y] = amp.segment(y * rank, rank).squaredNorm();
    }
    return probs;
  }
};

inline CircuitRealization build_realization(const TransducerSpec& spec) {
  CircuitRealization real;
  real.full = build_full_states(spec);
  real.ns = real.full.ns;
  real.nx = real.full.nx;
  real.ny = real.full.ny;

  const Eigen::MatrixXd gram = gram_matrix(spec);
  real.tau = compressed_states(gram);
  real.rank = real.tau.rank();

  real.b_op = Eigen::MatrixXd::Zero(real.ny * real.rank, real.ny * real.ns);
  for (std::size_t y = 0; y < real.ny; ++y) {
    real.b_op.block(y * real.rank, y * real.ns, real.rank, real.ns) =
        real.tau.vectors.transpose();
  }

  real.dim = real.full.kron_dim();
  if (real.dim > 0) {
    Eigen::MatrixXd states(real.dim, real.ns);
    for (std::size_t i = 0; i < real.ns; ++i) {
      states.col(i) = real.full.kron(i);
    }
    const detail::GramSchmidt gs = detail::modified_gram_schmidt(states);
    if (gs.basis.cols() != static_cast<Eigen::Index>(real.rank) ||
        (gs.coeffs - real.tau.vectors.transpose()).cwiseAbs().maxCoeff() >
            1e-7) {
      throw Error(ErrorCode::NumericalRankFailure,
                  "full states disagree with the compressed construction");
    }
    real.decompression = gs.basis;
    for (std::size_t i = 0; i < real.ns; ++i) {
      const double err =
          (real.decompression * real.tau.tau(i) - states.col(i)).norm();
      if (err > 1e-9) {
        throw Error(ErrorCode::NumericalRankFailure,
                    "decompression mismatch " + std::to_string(err));
      }
    }
    if (real.dim <= kAmplitudeGuard / real.dim) {
      Eigen::MatrixXd u = detail::complete_orthonormal(real.decompression);
      const double err =
          (u.transpose() * u -
           Eigen::MatrixXd::Identity(real.dim, real.dim)).cwiseAbs().maxCoeff();
      if (err > 1e-9) {
        throw Error(ErrorCode::NumericalRankFailure,
                    "basis completion degenerated, error " +
                        std::to_string(err));
      }
      real.u_op = std::move(u);
    }
  }
  return real;
}

/// Aggregated verification report for a constructed realization.
struct RealizationCheck {
  double gram_reproduction_error = 0.0;   // <tau_i|tau_j> vs G_ij
  double component_norm_error = 0.0;      // per-input component norms vs 1
  double component_overlap_error = 0.0;   // product of overlaps vs G_ij
  double kraus_error = 0.0;               // sum B'B vs identity
  std::optional<double> isometry_error;   // W'W vs identity
  std::optional<double> unitary_error;    // U'U vs identity
  std::optional<double> composite_error;  // step output vs sum sqrt(T)|y>|s_k>
  std::optional<double> min_post_fidelity;
};

inline RealizationCheck verify_realization(const TransducerSpec& spec,
                                           const CircuitRealization& real) {
  RealizationCheck check;
  const Eigen::MatrixXd gram = gram_matrix(spec);

  for (std::size_t i = 0; i < real.ns; ++i) {
    for (std::size_t j = 0; j < real.ns; ++j) {
      const double dot = real.tau.tau(i).dot(real.tau.tau(j));
      check.gram_reproduction_error =
          std::max(check.gram_reproduction_error, std::abs(dot - gram(i, j)));
      double product = 1.0;
      for (std::size_t x = 0; x < real.nx; ++x) {
        product *= real.full.comp[i][x].dot(real.full.comp[j][x]);
      }
      check.component_overlap_error = std::max(
          check.component_overlap_error, std::abs(product - gram(i, j)));
    }
    for (std::size_t x = 0; x < real.nx; ++x) {
      check.component_norm_error =
          std::max(check.component_norm_error,
                   std::abs(real.full.comp[i][x].norm() - 1.0));
    }
  }

  check.kraus_error =
      (real.kraus_completeness_sum() -
       Eigen::MatrixXd::Identity(real.ny * real.ns, real.ny * real.ns))
          .cwiseAbs()
          .maxCoeff();

  if (real.has_full_space()) {
    check.isometry_error =
        (real.decompression.transpose() * real.decompression -
         Eigen::MatrixXd::Identity(real.rank, real.rank))
            .cwiseAbs()
            .maxCoeff();
    if (real.u_op) {
      check.unitary_error =
          (real.u_op->transpose() * *real.u_op -
           Eigen::MatrixXd::Identity(real.dim, real.dim))
              .cwiseAbs()
              .maxCoeff();
    }

    double composite = 0.0;
    double min_fidelity = 1.0;
    std::vector<Eigen::VectorXd> full_states(real.ns);
    for (std::size_t i = 0; i < real.ns; ++i) full_states[i] = real.full.kron(i);
    for (std::size_t i = 0; i < real.ns; ++i) {
      for (std::size_t x = 0; x < real.nx; ++x) {
        const Eigen::VectorXd amp = real.b_op * real.full.comp[i][x];
        Eigen::VectorXd expected = Eigen::VectorXd::Zero(real.ny * real.dim);
        for (std::size_t y = 0; y < real.ny; ++y) {
          for (std::size_t k = 0; k < real.ns; ++k) {
            const double t = spec.prob(i, x, y, k);
            if (t > 0.0) {
              expected.segment(y * real.dim, real.dim) +=
                  std::sqrt(t) * full_states[k];
            }
          }
        }
        Eigen::VectorXd actual(real.ny * real.dim);
        for (std::size_t y = 0; y < real.ny; ++y) {
          actual.segment(y * real.dim, real.dim) =
              real.decompression * amp.segment(y * real.rank, real.rank);
        }
        composite = std::max(composite, (actual - expected).cwiseAbs().maxCoeff());

        for (std::size_t y = 0; y < real.ny; ++y) {
          if (spec.emission_prob(i, x, y) <= kProbEps) continue;
          const Eigen::VectorXd post = actual.segment(y * real.dim, real.dim);
          const Eigen::VectorXd& target =
              full_states[propagator(spec, i, x, y)];
          const double fid = std::pow(post.dot(target), 2) /
                             (post.squaredNorm() * target.squaredNorm());
          min_fidelity = std::min(min_fidelity, fid);
        }
      }
    }
    check.composite_error = composite;
    check.min_post_fidelity = min_fidelity;
  }
  return check;
}

/// One sampled run of the quantum transducer.
struct SimRun {
  std::uint64_t seed = 0;
  Trace trace;
  std::vector<double> fidelities;  // post-measurement state vs |s_g>, per step
};

namespace detail {

inline double uniform_double(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Samples one run of the quantum protocol: per step, select the component
/// of the current causal state, apply B, sample the output register, and
/// retain the collapsed memory. The memory is tracked in the compressed
/// space; each step records the fidelity against the expected compressed
/// causal state.
inline SimRun simulate_quantum(const TransducerSpec& spec,
                               const CircuitRealization& real,
                               const std::string& initial,
                               const std::vector<std::size_t>& inputs,
                               std::uint64_t seed) {
  SimRun run;
  run.seed = seed;
  run.trace.initial_state = initial;
  std::mt19937_64 engine(seed);

  std::size_t state = spec.state_index(initial);
  for (std::size_t x : inputs) {
    const Eigen::VectorXd amp = real.b_op * real.full.comp[state][x];
    std::vector<double> probs(real.ny);
    double total = 0.0;
    for (std::size_t y = 0; y < real.ny; ++y) {
      probs[y] = amp.segment(y * real.rank, real.rank).squaredNorm();
      total += probs[y];
    }
    const double draw = detail::uniform_double(engine) * total;
    std::size_t outcome = real.ny - 1;
    double cumulative = 0.0;
    for (std::size_t y = 0; y < real.ny; ++y) {
      cumulative += probs[y];
      if (draw < cumulative) {
        outcome = y;
        break;
      }
    }

    const Eigen::VectorXd post =
        amp.segment(outcome * real.rank, real.rank).normalized();
    const std::size_t next = propagator(spec, state, x, outcome);
    const double fid = std::pow(post.dot(real.tau.tau(next)), 2) /
                       real.tau.tau(next).squaredNorm();
    run.fidelities.push_back(fid);
    run.trace.steps.push_back(
        {spec.inputs().symbol(x), spec.outputs().symbol(outcome)});
    state = next;
  }
  return run;
}

inline SimRun simulate_quantum(const TransducerSpec& spec,
                               const std::string& initial,
                               const std::vector<std::size_t>& inputs,
                               std::uint64_t seed) {
  return simulate_quantum(spec, build_realization(spec), initial, inputs, seed);
}

/// Exact enumeration of all measurement branches of the quantum protocol.
struct QuantumEnumeration {
  FutureDistribution dist;
  double min_fidelity = 1.0;
};

namespace detail {

inline void enumerate_branches(const TransducerSpec& spec,
                               const CircuitRealization& real,
                               std::size_t state, std::size_t step,
                               const std::vector<std::size_t>& inputs,
                               double mass, std::vector<std::size_t>& word,
                               QuantumEnumeration& out) {
  if (step == inputs.size()) {
    out.dist.probs[word] += mass;
    return;
  }
  const std::size_t x = inputs[step];
  const Eigen::VectorXd amp = real.b_op * real.full.comp[state][x];
  for (std::size_t y = 0; y < real.ny; ++y) {
    const double p = amp.segment(y * real.rank, real.rank).squaredNorm();
    if (p <= kProbEps) continue;
    const Eigen::VectorXd post =
        amp.segment(y * real.rank, real.rank).normalized();
    const std::size_t next = propagator(spec, state, x, y);
    const double fid = std::pow(post.dot(real.tau.tau(next)), 2) /
                       real.tau.tau(next).squaredNorm();
    out.min_fidelity = std::min(out.min_fidelity, fid);
    word.push_back(y);
    enumerate_branches(spec, real, next, step + 1, inputs, mass * p, word, out);
    word.pop_back();
  }
}

}  // namespace detail

inline QuantumEnumeration enumerate_quantum_branches(
    const TransducerSpec& spec, const CircuitRealization& real,
    std::size_t state, const std::vector<std::size_t>& inputs) {
  if (inputs.size() > static_cast<std::size_t>(kHorizonCap)) {
    throw Error(ErrorCode::HorizonTooLarge,
                "input word longer than the horizon cap");
  }
  QuantumEnumeration out;
  out.dist.horizon = inputs.size();
  std::vector<std::size_t> word;
  detail::enumerate_branches(spec, real, state, 0, inputs, 1.0, word, out);
  return out;
}

/// Distribution over output words from exact branch enumeration of the
/// quantum protocol under a fixed input word.
inline FutureDistribution exact_output_distribution_quantum(
    const TransducerSpec& spec, std::size_t state,
    const std::vector<std::size_t>& inputs) {
  const CircuitRealization real = build_realization(spec);
  return enumerate_quantum_branches(spec, real, state, inputs).dist;
}

/// The dedicated four-qubit realization of the actively perturbed coin.
/// The single-qubit memory states carry overlap sqrt(r) with
/// r = 16 p q (1-p)(1-q); a step decompresses the memory into a four-qubit
/// product state with three ancillas, discards one qubit pair depending on
/// the input, recompresses the kept pair, and measures the output qubit.
struct PerturbedCoinCircuit {
  double p = 0.0, q = 0.0;
  double overlap = 0.0;                    // <s'_0|s'_1> = sqrt(r)
  std::array<Eigen::Vector2d, 2> memory;   // single-qubit causal states
  std::array<Eigen::VectorXd, 2> dilated;  // four-qubit states s'_j
  Eigen::MatrixXd u4;                      // 16x16: |memory_j>|000> -> s'_j
  Eigen::MatrixXd v;                       // 4x4: |00> -> |0>|m_0>, |11> -> |1>|m_1>

  /// Reduced state of the kept qubit pair after selection. Kept pair is
  /// (B1, B2) for x = 1 and (B3, B4) for x = 0; the other pair is traced
  /// out. Purity of the result is asserted.
  Eigen::Vector4d selected_pair(int state, int x) const {
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(16);
    psi(0) = memory[state](0);
    psi(8) = memory[state](1);
    psi = u4 * psi;

    Eigen::Matrix4d rho = Eigen::Matrix4d::Zero();
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        for (int rest = 0; rest < 4; ++rest) {
          const int ia = x == 1 ? a * 4 + rest : rest * 4 + a;
          const int ib = x == 1 ? b * 4 + rest : rest * 4 + b;
          rho(a, b) += psi(ia) * psi(ib);
        }
      }
    }
    const double purity = (rho * rho).trace();
    if (std::abs(purity - 1.0) > 1e-9) {
      throw Error(ErrorCode::NumericalRankFailure,
                  "selection produced a mixed state, purity " +
                      std::to_string(purity));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(rho);
    Eigen::Vector4d vec = eig.eigenvectors().col(3);
    int lead = 0;
    vec.cwiseAbs().maxCoeff(&lead);
    if (vec(lead) < 0.0) vec = -vec;
    return vec;
  }

  /// Conditional output distribution of one step.
  std::array<double, 2> step_distribution(int state, int x) const {
    const Eigen::Vector4d w = v * selected_pair(state, x);
    return {w.segment<2>(0).squaredNorm(), w.segment<2>(2).squaredNorm()};
  }

  /// Post-measurement memory qubit after observing output y.
  Eigen::Vector2d post_memory(int state, int x, int y) const {
    const Eigen::Vector4d w = v * selected_pair(state, x);
    return w.segment<2>(2 * y).normalized();
  }
};

inline PerturbedCoinCircuit perturbed_coin_circuit(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::ParameterOutOfRange,
                "flip probabilities must lie strictly inside (0, 1)");
  }
  PerturbedCoinCircuit circuit;
  circuit.p = p;
  circuit.q = q;
  const double r = 16.0 * p * q * (1.0 - p) * (1.0 - q);
  circuit.memory[0] = Eigen::Vector2d(std::sqrt(r), std::sqrt(1.0 - r));
  circuit.memory[1] = Eigen::Vector2d(1.0, 0.0);

  Eigen::Vector4d phi_p = Eigen::Vector4d::Zero();
  phi_p(0) = std::sqrt(1.0 - p);
  phi_p(3) = std::sqrt(p);
  Eigen::Vector4d phi_q = Eigen::Vector4d::Zero();
  phi_q(0) = std::sqrt(1.0 - q);
  phi_q(3) = std::sqrt(q);

  Eigen::VectorXd s0 = Eigen::VectorXd::Zero(16);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) s0(a * 4 + b) = phi_p(a) * phi_q(b);
  }
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(16);
  for (int idx = 0; idx < 16; ++idx) s1(15 - idx) = s0(idx);  // X on all qubits
  circuit.dilated = {s0, s1};
  circuit.overlap = s0.dot(s1);

  Eigen::MatrixXd domain = Eigen::MatrixXd::Zero(16, 2);
  domain(0, 0) = circuit.memory[0](0);
  domain(8, 0) = circuit.memory[0](1);
  domain(0, 1) = circuit.memory[1](0);
  domain(8, 1) = circuit.memory[1](1);
  Eigen::MatrixXd range(16, 2);
  range.col(0) = s0;
  range.col(1) = s1;
  circuit.u4 = detail::orthonormal_image_map(domain, range);

  Eigen::MatrixXd v_domain = Eigen::MatrixXd::Zero(4, 2);
  v_domain(0, 0) = 1.0;  // |00>
  v_domain(3, 1) = 1.0;  // |11>
  Eigen::MatrixXd v_range = Eigen::MatrixXd::Zero(4, 2);
  v_range.col(0).segment<2>(0) = circuit.memory[0];  // |0>|m_0>
  v_range.col(1).segment<2>(2) = circuit.memory[1];  // |1>|m_1>
  circuit.v = detail::orthonormal_image_map(v_domain, v_range);
  return circuit;
}

}  // namespace iotrans
