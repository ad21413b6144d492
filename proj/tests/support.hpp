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

#pragma once

#include <random>

#include "cohdist/hermat.hpp"

namespace cohdist::testing {

// Ginibre-induced state G G^dag / Tr with G of size d x rank.
inline DensityMatrix random_state(int d, std::mt19937_64& rng, int rank = 0) {
  if (rank <= 0) rank = d;
  std::normal_distribution<double> g;
  ComplexMatrix a(d, rank);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
  ComplexMatrix r = a * a.adjoint();
  r /= r.trace().real();
  return DensityMatrix(r);
}

inline StateVector random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  StateVector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(g(rng), g(rng));
  return v / v.norm();
}

inline RealVector random_magnitudes(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealVector v(d);
  for (int i = 0; i < d; ++i) v(i) = u(rng);
  return v;
}

inline DensityMatrix diag2(double a) {
  return DensityMatrix::diagonal((RealVector(2) << a, 1.0 - a).finished());
}

}  // namespace cohdist::testing
