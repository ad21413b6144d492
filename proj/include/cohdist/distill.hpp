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

// Assisted distillation quantities: fidelities, one-shot and zero-error
// rates, the theta convex roof and the coherence of assistance.

#include "cohdist/ensembles.hpp"
#include "cohdist/hermat.hpp"
#include "cohdist/sdp.hpp"

namespace cohdist {

/// Caller promise that rho = sigma^{(x) copies} with dim sigma = base_dim.
/// base_dim == 0 means nothing is declared. Never inferred from the matrix.
struct Exactness {
  int base_dim = 0;
  int copies = 1;
};

/// True when the closed forms are exact: dim <= 3, or a declared tensor
/// power of a base of dimension <= 3 whose size matches dim.
bool closed_form_exact(int dim, const Exactness& declared = {});

/// floor(x + 1e-9); the guard absorbs solver noise on exact integers.
long guarded_floor(double x);

/// log2(guarded_floor(x)) for x >= 1.
double log2_floor(double x);

/// (1/m) ||delta(rho)||_[m]^2. Throws BadM for m < 1.
double assisted_fidelity_bound(const DensityMatrix& rho, int m);
double assisted_fidelity_bound(const RealVector& delta, int m);

/// Relaxed fidelity: max over omega in MM_m of F(rho, omega), via the SDP.
/// Throws BadM for m < 1 or m > dim and NumericalFailure when the solver
/// does not certify optimality.
double assisted_fidelity_sdp(const DensityMatrix& rho, int m, const SdpOptions& options = {});

/// min ||Delta(omega)||_inf over F(rho, omega) >= 1 - eps, via the SDP.
double min_diagonal_over_ball(const DensityMatrix& rho, double eps,
                              const SdpOptions& options = {});

struct RateReport {
  double eps = 0.0;
  int m_requested = 1;           // 2^relaxed_rate_bits
  double fidelity_bound = 1.0;   // assisted_fidelity_bound(rho, m_requested)
  double fidelity_sdp = 0.0;     // NaN when dim exceeds RateOptions::sdp_fidelity_dim
  double one_shot_rate_bits = 0.0;
  double relaxed_rate_bits = 0.0;
  double zero_error_bits = 0.0;
  double min_diagonal = 1.0;     // optimum of the ball program
  int m_from_fidelity = 1;       // largest m <= dim with fidelity_bound >= 1 - eps
  bool exact_flag = false;       // false: one_shot_rate_bits is only an upper bound
};

struct RateOptions {
  int sdp_fidelity_dim = 16;
  SdpOptions sdp;
};

/// Throws BadEpsilon unless 0 <= eps < 1.
RateReport one_shot_rate(const DensityMatrix& rho, double eps, const Exactness& declared = {},
                         const RateOptions& options = {});

struct ZeroErrorRate {
  double one_shot_bits = 0.0;              // log2 floor(1 / ||Delta(rho)||_inf)
  double asymptotic_bits_per_copy = 0.0;   // -log2 ||Delta(rho)||_inf
  bool exact = false;                      // otherwise both are upper bounds
};

ZeroErrorRate zero_error_rate(const DensityMatrix& rho, const Exactness& declared = {});

struct BoundedValue {
  double value = 0.0;
  bool exact = false;
  double other_bound = 0.0;  // the opposite one-sided bound when not exact
};

/// theta(omega) = min over decompositions of max_i ||psi_i||_inf^2. Exact for
/// dim <= 3 and for pure inputs; otherwise an upper bound from
/// ensemble_search, with ||Delta(omega)||_inf as other_bound.
BoundedValue theta_upper(const DensityMatrix& omega, const SearchOptions& options = {});

/// Coherence of assistance in bits. Exact S(Delta(rho)) for dim <= 3 and for
/// pure inputs; otherwise an ensemble_search lower bound, with S(Delta(rho))
/// as other_bound.
BoundedValue coherence_of_assistance(const DensityMatrix& rho, const SearchOptions& options = {});

}  // namespace cohdist
