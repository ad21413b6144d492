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

#include "cohdist/hermat.hpp"
#include "support.hpp"

namespace cohdist {
namespace {

using testing::diag2;
using testing::random_state;

void expect_code(ErrorCode code, const auto& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(DensityMatrixTest, RejectsInvalidInput) {
  ComplexMatrix m(2, 2);
  m << 0.5, 0.3, 0.1, 0.5;
  expect_code(ErrorCode::NonHermitian, [&] { DensityMatrix r(m); });
  m << 0.7, 0.0, 0.0, 0.5;
  expect_code(ErrorCode::NotDensityMatrix, [&] { DensityMatrix r(m); });
  m << 1.2, 0.0, 0.0, -0.2;
  expect_code(ErrorCode::NotPSD, [&] { DensityMatrix r(m); });
}

TEST(DensityMatrixTest, StoresExactlyHermitianPart) {
  ComplexMatrix m(2, 2);
  m << 0.5, Complex(0.1, 1e-11), Complex(0.1, 0.0), 0.5;
  DensityMatrix r(m);
  EXPECT_EQ(hermiticity_defect(r.matrix()), 0.0);
}

TEST(DensityMatrixTest, Factories) {
  const auto psi = DensityMatrix::maximally_coherent(3);
  EXPECT_NEAR(std::abs(psi(0, 2) - Complex(1.0 / 3.0)), 0.0, 1e-15);
  const auto mix = DensityMatrix::maximally_mixed(4);
  EXPECT_NEAR(mix(1, 1).real(), 0.25, 1e-15);
  EXPECT_NEAR(max_diagonal(diag2(0.6)), 0.6, 1e-15);
}

TEST(FidelityTest, KnownValues) {
  EXPECT_NEAR(fidelity(diag2(1.0), DensityMatrix::maximally_mixed(2)), 0.5, 1e-12);
  EXPECT_NEAR(fidelity(DensityMatrix::maximally_coherent(2), DensityMatrix::maximally_mixed(2)), 0.5, 1e-12);
  std::mt19937_64 rng(3);
  const auto r = random_state(4, rng);
  EXPECT_NEAR(fidelity(r, r), 1.0, 1e-9);
  expect_code(ErrorCode::DimMismatch, [&] { fidelity(r, diag2(0.5)); });
}

TEST(FidelityTest, SymmetricAndBounded) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const auto a = random_state(3, rng);
    const auto b = random_state(3, rng, 1);
    const double f = fidelity(a, b);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
    EXPECT_NEAR(f, fidelity(b, a), 1e-9);
  }
}

TEST(EigenTest, ReconstructsAndSqrt) {
  std::mt19937_64 rng(5);
  const auto r = random_state(5, rng);
  const HermitianEigen e = eig_hermitian(r.matrix());
  const ComplexMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  EXPECT_LT((back - r.matrix()).norm(), 1e-12);
  const ComplexMatrix s = sqrtm_psd(r.matrix());
  EXPECT_LT((s * s - r.matrix()).norm(), 1e-12);
  ComplexMatrix neg = -ComplexMatrix::Identity(2, 2);
  expect_code(ErrorCode::NotPSD, [&] { sqrtm_psd(neg); });
}

TEST(TensorTest, PowersAndCap) {
  const auto t = tensor_power(diag2(0.6), 3);
  EXPECT_EQ(t.dim(), 8);
  EXPECT_NEAR(max_diagonal(t), 0.216, 1e-15);
  expect_code(ErrorCode::CapExceeded, [&] { tensor_power(diag2(0.6), 11, 1024); });
  expect_code(ErrorCode::DimMismatch, [&] { tensor_power(diag2(0.6), 0); });
  const RealVector v = tensor_power(delta_vector(diag2(0.6)), 3);
  EXPECT_LT((v - delta_vector(t)).norm(), 1e-15);
}

TEST(DephaseTest, KeepsDiagonalOnly) {
  std::mt19937_64 rng(6);
  const auto r = random_state(3, rng);
  const auto d = dephase(r);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) EXPECT_EQ(d(i, j), r(i, j));
      else EXPECT_EQ(d(i, j), Complex(0.0));
    }
  }
}

TEST(EntropyTest, Values) {
  EXPECT_NEAR(shannon_entropy((RealVector(3) << 0.5, 0.25, 0.25).finished()), 1.5, 1e-12);
  EXPECT_NEAR(shannon_entropy((RealVector(2) << 0.75, 0.25).finished()), 0.8112781244591328, 1e-12);
  EXPECT_NEAR(shannon_entropy((RealVector(2) << 1.0, 0.0).finished()), 0.0, 1e-15);
  expect_code(ErrorCode::NotDistribution, [] { shannon_entropy((RealVector(2) << 0.7, 0.7).finished()); });
}

}  // namespace
}  // namespace cohdist
