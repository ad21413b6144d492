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

// The m-distillation norm
//
//   ||v||_[m] = min_x ||v - x||_1 + sqrt(m) ||x||_2
//             = max { <|v|, w> : ||w||_inf <= 1, ||w||_2 = sqrt(m) }
//
// and the pure-state fidelity of distillation F(psi, m) = ||psi||_[m]^2 / m.
// The norm only depends on the magnitudes |v_i|, so every routine here works
// on the real vector of magnitudes.

#include <cstdint>

#include "cohdist/hermat.hpp"

namespace cohdist {

struct MNormResult {
  double value = 0.0;
  // Number of unsaturated dual slots at the optimum. At integer m this is the
  // minimiser of ||v_tail(m-k+1)||_2 / sqrt(k) over 1 <= k <= m; at
  // non-integer m it is floor(m) minus the number of saturated entries,
  // clamped to [1, floor(m)].
  int k_star = 1;
  RealVector sorted;  // |v| in non-increasing order, zero-padded to ceil(m)
};

/// Semi-analytic norm: k-scan at integer m, dual water-filling otherwise.
/// Throws BadM when m < 1.
MNormResult mnorm(const RealVector& magnitudes, double m);
MNormResult mnorm(const StateVector& v, double m);

/// Dual maximisation solved by bisection on the Lagrange multiplier of the
/// l2 constraint. Expects entrywise nonnegative input.
double mnorm_dual_oracle(const RealVector& v, double m);

struct PrimalOracleOptions {
  int restarts = 20;
  int iterations = 5000;
  std::uint64_t seed = 0x5eed;
};

/// Primal minimisation over x in R^d_+. Combines projected subgradient
/// descent (random restarts) with an exact search along the clip family
/// x(s) = min(v, s) that the primal stationarity conditions single out.
/// Throws ConvergenceFailure when the result is more than 1e-5 above the
/// semi-analytic value.
double mnorm_primal_oracle(const RealVector& v, double m,
                           const PrimalOracleOptions& options = {});

/// (1/m) ||psi||_[m]^2, clipped to [0, 1].
double pure_distillation_fidelity(const StateVector& psi, int m);
double pure_distillation_fidelity(const RealVector& magnitudes, int m);

}  // namespace cohdist
