// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "iotrans/minimization.hpp"
#include "iotrans/quantum_model.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace iotrans;

namespace {

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

}  // namespace

TEST_CASE("coin overlap follows sqrt(16 p q (1-p)(1-q))", "[quantum]") {
  for (int a = 1; a <= 9; ++a) {
    for (int b = 1; b <= 9; ++b) {
      const double p = a / 10.0, q = b / 10.0;
      const TransducerSpec coin = actively_perturbed_coin(p, q);
      const double expected = std::sqrt(16.0 * p * q * (1 - p) * (1 - q));
      REQUIRE(std::abs(quantum_overlap(coin, 0, 1) - expected) <= 1e-12);
    }
  }
  const TransducerSpec quarter = actively_perturbed_coin(0.25, 0.25);
  CHECK(quantum_overlap(quarter, 0, 1) == Catch::Approx(0.75).margin(1e-13));
}

TEST_CASE("self overlap is one, disjoint overlap is zero", "[quantum]") {
  const TransducerSpec coin = actively_perturbed_coin(0.3, 0.2);
  CHECK(quantum_overlap(coin, 0, 0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(quantum_overlap(coin, 1, 1) == Catch::Approx(1.0).margin(1e-12));
  const TransducerSpec disjoint = testing::disjoint_output_machine();
  CHECK(quantum_overlap(disjoint, 0, 1) == 0.0);
}

TEST_CASE("gram matrix of the quarter coin", "[quantum]") {
  const Eigen::MatrixXd gram =
      gram_matrix(actively_perturbed_coin(0.25, 0.25));
  CHECK(gram(0, 0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(gram(1, 1) == Catch::Approx(1.0).margin(1e-12));
  CHECK(gram(0, 1) == Catch::Approx(0.75).margin(1e-12));
  CHECK(gram(1, 0) == Catch::Approx(0.75).margin(1e-12));
}

TEST_CASE("gram matrix of the disjoint machine is the identity", "[quantum]") {
  const Eigen::MatrixXd gram = gram_matrix(testing::disjoint_output_machine());
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("fair coin minimizes to a trivial gram", "[quantum]") {
  const TransducerSpec single = minimize(actively_perturbed_coin(0.5, 0.5));
  const Eigen::MatrixXd gram = gram_matrix(single);
  REQUIRE(gram.rows() == 1);
  CHECK(gram(0, 0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("compressed states of the identity gram are the standard basis",
          "[quantum]") {
  const CompressedStates states =
      compressed_states(Eigen::MatrixXd::Identity(3, 3));
  REQUIRE(states.rank() == 3);
  CHECK((states.vectors - Eigen::MatrixXd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("compressed states follow the triangular factorization oracle",
          "[quantum]") {
  Eigen::MatrixXd gram(2, 2);
  gram << 1.0, 0.75, 0.75, 1.0;
  const CompressedStates states = compressed_states(gram);
  REQUIRE(states.rank() == 2);
  CHECK(states.vectors(0, 0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(states.vectors(0, 1) == Catch::Approx(0.0).margin(1e-12));
  CHECK(states.vectors(1, 0) == Catch::Approx(0.75).margin(1e-12));
  CHECK(states.vectors(1, 1) ==
        Catch::Approx(0.6614378277661477).margin(1e-12));
}

TEST_CASE("rank-one gram collapses to one dimension", "[quantum]") {
  Eigen::MatrixXd gram(2, 2);
  gram << 1.0, 1.0, 1.0, 1.0;
  const CompressedStates states = compressed_states(gram);
  REQUIRE(states.rank() == 1);
  CHECK(states.vectors(0, 0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(states.vectors(1, 0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("compressed states reject indefinite matrices", "[quantum]") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 1.5, 1.5, 1.0;
  try {
    compressed_states(bad);
    FAIL("expected NotPSD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPSD);
  }
}

TEST_CASE("compressed states reproduce the gram matrix", "[quantum]") {
  std::mt19937_64 rng(616);
  for (int round = 0; round < 300; ++round) {
    const TransducerSpec spec = testing::random_minimal_spec(rng);
    const Eigen::MatrixXd gram = gram_matrix(spec);
    const CompressedStates states = compressed_states(gram);
    const Eigen::MatrixXd reproduced =
        states.vectors * states.vectors.transpose();
    REQUIRE((reproduced - gram).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("density matrix of the quarter coin has the derived spectrum",
          "[quantum]") {
  const Eigen::MatrixXd gram =
      gram_matrix(actively_perturbed_coin(0.25, 0.25));
  const DensityMatrix dm = density_matrix(gram, {{0.5, 0.5}});
  REQUIRE(dm.rho.rows() == 2);
  CHECK(dm.rho.trace() == Catch::Approx(1.0).margin(1e-12));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dm.rho,
                                                     Eigen::EigenvaluesOnly);
  CHECK(eig.eigenvalues()(0) == Catch::Approx(0.125).margin(1e-12));
  CHECK(eig.eigenvalues()(1) == Catch::Approx(0.875).margin(1e-12));
}

TEST_CASE("density matrix edge cases", "[quantum]") {
  const DensityMatrix single =
      density_matrix(Eigen::MatrixXd::Identity(1, 1), {{1.0}});
  REQUIRE(single.rho.rows() == 1);
  CHECK(single.rho(0, 0) == Catch::Approx(1.0));

  const DensityMatrix diagonal =
      density_matrix(Eigen::MatrixXd::Identity(2, 2), {{0.3, 0.7}});
  CHECK(diagonal.rho(0, 0) == Catch::Approx(0.3).margin(1e-12));
  CHECK(diagonal.rho(1, 1) == Catch::Approx(0.7).margin(1e-12));
  CHECK(diagonal.rho(0, 1) == Catch::Approx(0.0).margin(1e-12));

  try {
    density_matrix(Eigen::MatrixXd::Identity(2, 2), {{1.0}});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("quantum complexity of the quarter coin", "[quantum]") {
  const TransducerSpec coin = actively_perturbed_coin(0.25, 0.25);
  for (double u : {0.2, 0.5, 0.8}) {
    const InputDistribution dist(coin.inputs(), {{"1", u}, {"0", 1 - u}});
    CHECK(quantum_complexity(coin, dist) ==
          Catch::Approx(0.5435644431995964).margin(1e-10));
  }
}

TEST_CASE("near-fair coin stores almost nothing", "[quantum]") {
  const TransducerSpec coin = actively_perturbed_coin(0.49, 0.49);
  const InputDistribution dist = InputDistribution::uniform(coin.inputs());
  const double r = 16.0 * 0.49 * 0.49 * 0.51 * 0.51;
  const double expected = binary_entropy((1.0 + std::sqrt(r)) / 2.0);
  const double bits = quantum_complexity(coin, dist);
  CHECK(bits == Catch::Approx(expected).margin(1e-10));
  CHECK(bits < 0.003);
  CHECK(classical_complexity(coin, dist) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("orthogonal causal states store the classical bit", "[quantum]") {
  const Eigen::MatrixXd gram = gram_matrix(testing::disjoint_output_machine());
  CHECK(iotrans::detail::weighted_gram_entropy(gram, {0.5, 0.5}) ==
        Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("identical causal states store nothing", "[quantum]") {
  Eigen::MatrixXd gram(2, 2);
  gram << 1.0, 1.0, 1.0, 1.0;
  CHECK(iotrans::detail::weighted_gram_entropy(gram, {0.5, 0.5}) ==
        Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("orthogonality detection", "[quantum]") {
  CHECK_FALSE(condition_I_orthogonal(actively_perturbed_coin(0.3, 0.2)));
  CHECK(condition_I_orthogonal(testing::disjoint_output_machine()));
}

TEST_CASE("orthogonality coincides with step-wise efficiency", "[quantum]") {
  std::mt19937_64 rng(617);
  for (int round = 0; round < 300; ++round) {
    const TransducerSpec spec = testing::random_minimal_spec(rng);
    REQUIRE(condition_I_orthogonal(spec) ==
            !is_stepwise_inefficient(spec).has_value());
  }
}

TEST_CASE("quantum memory never exceeds classical memory", "[quantum]") {
  std::mt19937_64 rng(618);
  int strict_checked = 0;
  for (int round = 0; round < 300; ++round) {
    const TransducerSpec spec = testing::random_minimal_spec(rng);
    const InputDistribution dist = InputDistribution::uniform(spec.inputs());
    StationaryOccupancy occ;
    try {
      occ = stationary_distribution(induced_chain(spec, dist));
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::ReducibleChain);
      continue;
    }
    const double c = entropy_bits(occ.pi);
    const double q = quantum_complexity(spec, dist);
    REQUIRE(q <= c + 1e-9);

    const Eigen::MatrixXd gram = gram_matrix(spec);
    double max_overlap = 0.0;
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < gram.cols(); ++j) {
        max_overlap = std::max(max_overlap, gram(i, j));
      }
    }
    if (is_stepwise_inefficient(spec) && is_non_pathological(occ) &&
        max_overlap >= 0.05) {
      REQUIRE(c - q > 1e-6);
      ++strict_checked;
    }
  }
  CHECK(strict_checked > 0);
}

TEST_CASE("weighted gram spectrum equals the full density spectrum",
          "[quantum]") {
  std::mt19937_64 rng(619);
  std::vector<TransducerSpec> specs{actively_perturbed_coin(0.25, 0.25),
                                    actively_perturbed_coin(0.7, 0.4)};
  for (int round = 0; round < 20; ++round) {
    specs.push_back(testing::random_minimal_spec(rng, 4, 2, 3));
  }
  for (const TransducerSpec& spec : specs) {
    const InputDistribution dist = InputDistribution::uniform(spec.inputs());
    StationaryOccupancy occ;
    try {
      occ = stationary_distribution(induced_chain(spec, dist));
    } catch (const Error&) {
      continue;
    }
    const Eigen::MatrixXd gram = gram_matrix(spec);
    const std::size_t n = spec.num_states();
    Eigen::MatrixXd weighted(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        weighted(i, j) = std::sqrt(occ.pi[i] * occ.pi[j]) * gram(i, j);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(weighted,
                                                       Eigen::EigenvaluesOnly);
    std::vector<double> small;
    for (Eigen::Index t = eig.eigenvalues().size() - 1; t >= 0; --t) {
      if (eig.eigenvalues()(t) > 1e-12) small.push_back(eig.eigenvalues()(t));
    }
    const std::vector<double> full = testing::full_density_spectrum(spec, occ);
    REQUIRE(small.size() == full.size());
    for (std::size_t t = 0; t < small.size(); ++t) {
      REQUIRE(std::abs(small[t] - full[t]) <= 1e-9);
    }
  }
}

TEST_CASE("classical structural complexity of the coin is one bit",
          "[quantum]") {
  for (auto [p, q] : {std::pair{0.3, 0.2}, {0.25, 0.25}, {0.8, 0.6}}) {
    const TransducerSpec coin = actively_perturbed_coin(p, q);
    const StructuralResult result =
        structural_complexity(coin, ComplexityKind::Classical, 16);
    CHECK(result.value_bits == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("quantum structural complexity of the quarter coin", "[quantum]") {
  const TransducerSpec coin = actively_perturbed_coin(0.25, 0.25);
  const StructuralResult result =
      structural_complexity(coin, ComplexityKind::Quantum, 16);
  CHECK(result.value_bits == Catch::Approx(0.5435644431995964).margin(1e-9));
  REQUIRE(result.argmax.size() == 2);
}

TEST_CASE("single-state machine has zero structural complexity", "[quantum]") {
  const TransducerSpec spec = testing::copy_machine();
  CHECK(structural_complexity(spec, ComplexityKind::Classical, 8).value_bits ==
        Catch::Approx(0.0).margin(1e-12));
  CHECK(structural_complexity(spec, ComplexityKind::Quantum, 8).value_bits ==
        Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("structural complexity rejects all-reducible machines", "[quantum]") {
  // The stay-put machine has an identity chain under every input
  // distribution, so no grid point admits a stationary occupancy.
  try {
    structural_complexity(testing::disjoint_output_machine(),
                          ComplexityKind::Classical, 8);
    FAIL("expected ReducibleChain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ReducibleChain);
  }
}

TEST_CASE("structural complexity search is deterministic", "[quantum]") {
  const TransducerSpec coin = actively_perturbed_coin(0.37, 0.22);
  const StructuralResult a =
      structural_complexity(coin, ComplexityKind::Quantum, 16);
  const StructuralResult b =
      structural_complexity(coin, ComplexityKind::Quantum, 16);
  CHECK(a.value_bits == b.value_bits);
  CHECK(a.argmax == b.argmax);
}
