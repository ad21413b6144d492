// Copyright 2026 The cohdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "cohdist/distill.hpp"
#include "cohdist/dnorm.hpp"
#include "cohdist/ensembles.hpp"
#include "support.hpp"

namespace cohdist {
namespace {

using testing::diag2;
using testing::random_state;
using testing::random_unit;

TEST(SameDiagonalTest, MaximallyMixedQubit) {
  const Ensemble e = same_diagonal_decomposition(DensityMatrix::maximally_mixed(2));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_NEAR(e.weights(0), 0.5, 1e-12);
  EXPECT_NEAR(e.weights(1), 0.5, 1e-12);
  // |+> and |->, up to global phase.
  EXPECT_NEAR(std::abs(e.atoms[0].dot(e.atoms[1])), 0.0, 1e-12);
  for (const auto& a : e.atoms) EXPECT_NEAR(std::abs(a(0)), std::sqrt(0.5), 1e-12);
}

TEST(SameDiagonalTest, PureStateGivesOneAtom) {
  std::mt19937_64 rng(31);
  for (int d = 2; d <= 3; ++d) {
    const StateVector psi = random_unit(d, rng);
    const Ensemble e = same_diagonal_decomposition(DensityMatrix::pure(psi));
    ASSERT_EQ(e.size(), 1u);
    EXPECT_NEAR(std::abs(e.atoms[0].dot(psi)), 1.0, 1e-9);
  }
}

TEST(SameDiagonalTest, RandomQubitsAndQutrits) {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 2;
    const int rank = k % 5 == 0 ? 1 + (k / 5) % d : 0;
    const auto rho = random_state(d, rng, rank);
    const Ensemble e = same_diagonal_decomposition(rho);
    EXPECT_LE(reconstruction_residual(e, rho), 1e-8);
    EXPECT_LE(diagonal_residual(e, rho), 1e-8);
    EXPECT_LE(e.size(), 9u);
    EXPECT_NEAR(e.weights.sum(), 1.0, 1e-12);
    EXPECT_GE(e.weights.minCoeff(), 1e-12);
  }
}

TEST(SameDiagonalTest, ZeroDiagonalEntryReducesToSupport) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m << 0.6, 0.0, Complex(0.2, 0.1), 0.0, 0.0, 0.0, Complex(0.2, -0.1), 0.0, 0.4;
  const DensityMatrix rho(m);
  const Ensemble e = same_diagonal_decomposition(rho);
  EXPECT_LE(reconstruction_residual(e, rho), 1e-10);
  for (const auto& a : e.atoms) EXPECT_EQ(a(1), Complex(0.0));
}

TEST(SameDiagonalTest, RejectsLargeDimension) {
  try {
    same_diagonal_decomposition(DensityMatrix::maximally_mixed(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimTooLarge);
  }
}

TEST(EnsembleSearchTest, WarmStartedFidelityMatchesBound) {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 10; ++k) {
    const int d = 2 + k % 2;
    const auto rho = random_state(d, rng);
    for (int m = 2; m <= d; ++m) {
      const SearchResult s = ensemble_search(rho, MaxAvgPureFidelity{m}, d);
      EXPECT_NEAR(s.value, assisted_fidelity_bound(rho, m), 1e-5);
      EXPECT_LE(reconstruction_residual(s.ensemble, rho), 1e-8);
    }
  }
}

TEST(EnsembleSearchTest, DiagEntropyQubit) {
  const SearchResult s = ensemble_search(diag2(0.75), MaxAvgDiagEntropy{}, 2);
  EXPECT_NEAR(s.value, 0.8112781244591328, 1e-4);
}

TEST(EnsembleSearchTest, ColdStartIsOneSided) {
  std::mt19937_64 rng(34);
  SearchOptions opt;
  opt.warm_start = false;
  opt.restarts = 4;
  opt.evaluation_budget = 2000;
  for (int k = 0; k < 4; ++k) {
    const auto rho = random_state(4, rng);
    const SearchResult f = ensemble_search(rho, MaxAvgPureFidelity{3}, 8, opt);
    EXPECT_LE(f.value, assisted_fidelity_bound(rho, 3) + 1e-9);
    const SearchResult t = ensemble_search(rho, MinMaxInfNormSq{}, 8, opt);
    EXPECT_GE(t.value, max_diagonal(rho) - 1e-9);
    EXPECT_LE(reconstruction_residual(t.ensemble, rho), 1e-8);
  }
}

TEST(EnsembleSearchTest, PureInputSingleAtom) {
  std::mt19937_64 rng(35);
  const StateVector psi = random_unit(4, rng);
  const SearchResult s = ensemble_search(DensityMatrix::pure(psi), MaxAvgPureFidelity{2}, 1);
  ASSERT_EQ(s.ensemble.size(), 1u);
  EXPECT_NEAR(s.value, pure_distillation_fidelity(psi, 2), 1e-12);
}

TEST(EnsembleSearchTest, RejectsCapBelowRank) {
  EXPECT_THROW(ensemble_search(DensityMatrix::maximally_mixed(3), MinMaxInfNormSq{}, 2), Error);
}

TEST(EnsembleSearchTest, DeterministicForSeed) {
  std::mt19937_64 rng(36);
  const auto rho = random_state(4, rng);
  SearchOptions opt;
  opt.restarts = 3;
  opt.evaluation_budget = 600;
  const double a = ensemble_search(rho, MaxAvgDiagEntropy{}, 6, opt).value;
  const double b = ensemble_search(rho, MaxAvgDiagEntropy{}, 6, opt).value;
  EXPECT_EQ(a, b);
}

TEST(SteeringTest, MaximallyEntangledToPlusMinus) {
  const DensityMatrix half = DensityMatrix::maximally_mixed(2);
  const StateVector joint = canonical_purification(half);
  Ensemble target;
  target.weights = RealVector::Constant(2, 0.5);
  StateVector plus(2), minus(2);
  plus << 1.0, 1.0;
  minus << 1.0, -1.0;
  target.atoms = {plus / std::sqrt(2.0), minus / std::sqrt(2.0)};
  const SteeringMeasurement m = steering_measurement(joint, 2, target);
  ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
  for (const auto& op : m.operators) sum += op;
  EXPECT_LT((sum - ComplexMatrix::Identity(2, 2)).norm(), 1e-9);
  const auto branches = steered_states(joint, 2, m);
  for (std::size_t i = 0; i < 2; ++i) {
    const ComplexMatrix want = 0.5 * target.atoms[i] * target.atoms[i].adjoint();
    EXPECT_LT((branches[i] - want).norm(), 1e-8);
  }
}

TEST(SteeringTest, EigenEnsembleIsSchmidtBasis) {
  const DensityMatrix rho = diag2(0.7);
  const StateVector joint = canonical_purification(rho);
  Ensemble target;
  target.weights = (RealVector(2) << 0.3, 0.7).finished();
  target.atoms = {StateVector::Unit(2, 1), StateVector::Unit(2, 0)};
  const SteeringMeasurement m = steering_measurement(joint, 2, target);
  for (const auto& op : m.operators) {
    // Projectors onto computational basis states of A.
    EXPECT_LT((op * op - op).norm(), 1e-9);
    EXPECT_NEAR(std::abs(op(0, 1)), 0.0, 1e-12);
  }
}

TEST(SteeringTest, RandomQutritSameDiagonal) {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 10; ++k) {
    const auto rho = random_state(3, rng, k % 2 ? 2 : 3);
    const Ensemble e = same_diagonal_decomposition(rho);
    const StateVector joint = canonical_purification(rho);
    const SteeringMeasurement m = steering_measurement(joint, 3, e);
    ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
    for (const auto& op : m.operators) {
      sum += op;
      EXPECT_GE(eig_hermitian(op).values.minCoeff(), -1e-12);
    }
    EXPECT_LT((sum - ComplexMatrix::Identity(3, 3)).norm(), 1e-9);
    const auto branches = steered_states(joint, 3, m);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double p = branches[i].trace().real();
      EXPECT_NEAR(p, e.weights(i), 1e-8);
      const double overlap = (e.atoms[i].adjoint() * branches[i] * e.atoms[i])(0, 0).real() / p;
      EXPECT_GE(overlap, 1.0 - 1e-8);
    }
  }
}

TEST(SteeringTest, Errors) {
  const Ensemble e = same_diagonal_decomposition(diag2(0.7));
  StateVector bad = StateVector::Ones(3);
  EXPECT_THROW(steering_measurement(bad, 2, e), Error);
  const StateVector joint = canonical_purification(diag2(0.6));
  try {
    steering_measurement(joint, 2, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::IncompatibleEnsemble);
  }
}

TEST(ProtocolTest, SingleAtomExact) {
  std::mt19937_64 rng(38);
  const StateVector psi = random_unit(3, rng);
  Ensemble e;
  e.weights = RealVector::Ones(1);
  e.atoms = {psi};
  const ProtocolEstimate p = simulate_protocol(DensityMatrix::pure(psi), e, 2, 1000, 1);
  EXPECT_EQ(p.mean_fidelity, pure_distillation_fidelity(psi, 2));
  EXPECT_EQ(p.stderr, 0.0);
}

TEST(ProtocolTest, PlusMinusScoresOne) {
  const Ensemble e = same_diagonal_decomposition(DensityMatrix::maximally_mixed(2));
  const ProtocolEstimate p = simulate_protocol(DensityMatrix::maximally_mixed(2), e, 2, 100000, 2);
  EXPECT_NEAR(p.mean_fidelity, 1.0, 1e-12);
  EXPECT_EQ(p.stderr, 0.0);
}

TEST(ProtocolTest, SameDiagonalQubit) {
  const Ensemble e = same_diagonal_decomposition(diag2(0.75));
  const ProtocolEstimate p = simulate_protocol(diag2(0.75), e, 2, 100000, 3);
  EXPECT_LE(std::abs(p.mean_fidelity - (2.0 + std::sqrt(3.0)) / 4.0), std::max(3.0 * p.stderr, 1e-12));
}

TEST(ProtocolTest, MixedScoresConverge) {
  // |+> scores 1 and |0> scores 1/2 at m=2, so the sampler itself is exercised.
  Ensemble e;
  e.weights = (RealVector(2) << 0.5, 0.5).finished();
  StateVector plus(2);
  plus << 1.0, 1.0;
  e.atoms = {plus / std::sqrt(2.0), StateVector::Unit(2, 0)};
  const DensityMatrix rho(e.average());
  const ProtocolEstimate p = simulate_protocol(rho, e, 2, 1000000, 4);
  EXPECT_GT(p.stderr, 0.0);
  EXPECT_LE(std::abs(p.mean_fidelity - 0.75), 4.0 * p.stderr);
  const ProtocolEstimate q = simulate_protocol(rho, e, 2, 1000000, 4);
  EXPECT_EQ(p.mean_fidelity, q.mean_fidelity);
}

TEST(ProtocolTest, RejectsMismatchedEnsemble) {
  const Ensemble e = same_diagonal_decomposition(diag2(0.75));
  EXPECT_THROW(simulate_protocol(diag2(0.6), e, 2, 10, 1), Error);
}

}  // namespace
}  // namespace cohdist
