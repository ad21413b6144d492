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

#include "cohdist/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cohdist/dnorm.hpp"

namespace cohdist {

namespace {

constexpr double kFloorGuard = 1e-9;

int rank_of(const DensityMatrix& rho) {
  const HermitianEigen e = eig_hermitian(rho.matrix());
  const double cut = 1e-12 * std::max(1.0, e.values.maxCoeff());
  return static_cast<int>((e.values.array() > cut).count());
}

SdpSolution solve_or_throw(const SdpProblem& problem, const SdpOptions& options, const char* what) {
  SdpSolution sol = solve(problem, options);
  if (sol.status != SdpStatus::Optimal) {
    std::ostringstream os;
    os << what << ": solver finished with status " << to_string(sol.status) << " after "
       << sol.iterations << " iterations";
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  return sol;
}

int default_atoms_cap(const DensityMatrix& rho) { return std::max(rank_of(rho), 2 * rho.dim()); }

}  // namespace

bool closed_form_exact(int dim, const Exactness& declared) {
  if (dim <= 3) return true;
  if (declared.base_dim < 1 || declared.base_dim > 3 || declared.copies < 1) return false;
  long expected = 1;
  for (int i = 0; i < declared.copies; ++i) expected *= declared.base_dim;
  return expected == dim;
}

long guarded_floor(double x) { return static_cast<long>(std::floor(x + kFloorGuard)); }

double log2_floor(double x) {
  const long n = guarded_floor(x);
  if (n < 1) {
    std::ostringstream os;
    os << "logfloor needs an argument >= 1, got " << x;
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  return std::log2(static_cast<double>(n));
}

double assisted_fidelity_bound(const RealVector& delta, int m) {
  if (m < 1) throw Error(ErrorCode::BadM, "m must be at least 1");
  const double n = mnorm(delta, static_cast<double>(m)).value;
  return std::clamp(n * n / m, 0.0, 1.0);
}

double assisted_fidelity_bound(const DensityMatrix& rho, int m) {
  return assisted_fidelity_bound(delta_vector(rho), m);
}

double assisted_fidelity_sdp(const DensityMatrix& rho, int m, const SdpOptions& options) {
  if (m < 1) throw Error(ErrorCode::BadM, "m must be at least 1");
  const BuiltProblem built = build_fidelity_over_Mm(rho, m);
  const SdpSolution sol = solve_or_throw(built.problem, options, "relaxed fidelity");
  const double root = std::clamp(sol.primal_value, 0.0, 1.0);
  return root * root;
}

double min_diagonal_over_ball(const DensityMatrix& rho, double eps, const SdpOptions& options) {
  const BuiltProblem built = build_min_diag_over_ball(rho, eps);
  const SdpSolution sol = solve_or_throw(built.problem, options, "min-diagonal over ball");
  return -sol.primal_value;
}

RateReport one_shot_rate(const DensityMatrix& rho, double eps, const Exactness& declared,
                         const RateOptions& options) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    std::ostringstream os;
    os << "eps must lie in [0, 1), got " << eps;
    throw Error(ErrorCode::BadEpsilon, os.str());
  }
  const int d = rho.dim();
  RateReport r;
  r.eps = eps;
  r.exact_flag = closed_form_exact(d, declared);
  r.min_diagonal = min_diagonal_over_ball(rho, eps, options.sdp);

  const long m_star = std::clamp<long>(guarded_floor(1.0 / r.min_diagonal), 1, d);
  r.m_requested = static_cast<int>(m_star);
  r.relaxed_rate_bits = std::log2(static_cast<double>(m_star));
  r.one_shot_rate_bits = r.relaxed_rate_bits;
  r.zero_error_bits = zero_error_rate(rho, declared).one_shot_bits;

  const RealVector delta = delta_vector(rho);
  r.fidelity_bound = assisted_fidelity_bound(delta, r.m_requested);
  r.fidelity_sdp = d <= options.sdp_fidelity_dim
                       ? assisted_fidelity_sdp(rho, r.m_requested, options.sdp)
                       : std::numeric_limits<double>::quiet_NaN();
  r.m_from_fidelity = 1;
  for (int m = 2; m <= d; ++m) {
    if (assisted_fidelity_bound(delta, m) >= 1.0 - eps - kFloorGuard) r.m_from_fidelity = m;
    else break;
  }
  return r;
}

ZeroErrorRate zero_error_rate(const DensityMatrix& rho, const Exactness& declared) {
  const double q = max_diagonal(rho);
  ZeroErrorRate z;
  z.one_shot_bits = log2_floor(1.0 / q);
  z.asymptotic_bits_per_copy = -std::log2(q);
  z.exact = closed_form_exact(rho.dim(), declared);
  return z;
}

BoundedValue theta_upper(const DensityMatrix& omega, const SearchOptions& options) {
  BoundedValue out;
  const double lower = max_diagonal(omega);
  if (omega.dim() <= 3 || rank_of(omega) == 1) {
    out.value = lower;
    out.exact = true;
    out.other_bound = lower;
    return out;
  }
  const SearchResult s = ensemble_search(omega, MinMaxInfNormSq{}, default_atoms_cap(omega), options);
  out.value = std::max(s.value, lower);
  out.exact = false;
  out.other_bound = lower;
  return out;
}

BoundedValue coherence_of_assistance(const DensityMatrix& rho, const SearchOptions& options) {
  BoundedValue out;
  const double upper = shannon_entropy(diagonal_of(rho).cwiseMax(0.0));
  if (rho.dim() <= 3 || rank_of(rho) == 1) {
    out.value = upper;
    out.exact = true;
    out.other_bound = upper;
    return out;
  }
  const SearchResult s =
      ensemble_search(rho, MaxAvgDiagEntropy{}, default_atoms_cap(rho), options);
  out.value = std::min(s.value, upper);
  out.exact = false;
  out.other_bound = upper;
  return out;
}

}  // namespace cohdist
