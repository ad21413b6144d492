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

#include "cohdist/dnorm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace cohdist {

namespace {

void require_valid_m(double m) {
  if (!(m >= 1.0) || !std::isfinite(m)) {
    std::ostringstream os;
    os << "m must be a finite real >= 1, got " << m;
    throw Error(ErrorCode::BadM, os.str());
  }
}

bool is_integral(double m) { return std::abs(m - std::round(m)) < 1e-12; }

RealVector sorted_padded(const RealVector& magnitudes, double m) {
  const auto padded_len =
      std::max<Eigen::Index>(magnitudes.size(), static_cast<Eigen::Index>(std::ceil(m - 1e-12)));
  RealVector s = RealVector::Zero(padded_len);
  s.head(magnitudes.size()) = magnitudes.cwiseAbs();
  std::stable_sort(s.data(), s.data() + s.size(), std::greater<>());
  return s;
}

}  // namespace

MNormResult mnorm(const RealVector& magnitudes, double m) {
  require_valid_m(m);
  MNormResult out;
  out.sorted = sorted_padded(magnitudes, m);
  const RealVector& s = out.sorted;
  const auto n = s.size();

  // tail2[i] = sum_{j >= i} s_j^2
  RealVector tail2 = RealVector::Zero(n + 1);
  for (Eigen::Index i = n - 1; i >= 0; --i) tail2(i) = tail2(i + 1) + s(i) * s(i);

  // j counts saturated dual entries (w_i = 1); the remaining weight sqrt(m - j)
  // is spread proportionally to the tail. The ratio ||tail_j|| / sqrt(m - j)
  // is unimodal in j and its minimiser is the consistent saturation level.
  const bool integral = is_integral(m);
  const double mm = integral ? std::round(m) : m;
  const auto j_max = static_cast<Eigen::Index>(std::ceil(mm - 1e-12)) - 1;
  Eigen::Index best_j = 0;
  double best_ratio = INFINITY;
  for (Eigen::Index j = 0; j <= j_max; ++j) {
    const double ratio = std::sqrt(tail2(j)) / std::sqrt(mm - double(j));
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best_j = j;
    }
  }
  out.value = s.head(best_j).sum() + std::sqrt(mm - double(best_j)) * std::sqrt(tail2(best_j));
  const int floor_m = static_cast<int>(std::floor(mm + 1e-12));
  out.k_star = std::clamp(floor_m - static_cast<int>(best_j), 1, floor_m);
  return out;
}

MNormResult mnorm(const StateVector& v, double m) {
  return mnorm(RealVector(v.cwiseAbs()), m);
}

double mnorm_dual_oracle(const RealVector& v_in, double m) {
  require_valid_m(m);
  const RealVector v = v_in.cwiseAbs();
  const auto support = (v.array() > 0.0).count();
  // Zero coordinates (real or padded) absorb leftover l2 budget for free.
  if (double(support) <= m) return v.sum();

  auto budget = [&](double mu) {
    return (v / mu).cwiseMin(1.0).squaredNorm();
  };
  double lo = 0.0;
  double hi = v.norm() / std::sqrt(m);  // budget(hi) <= m
  for (int it = 0; it < 300 && hi - lo > 1e-17 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (budget(mid) > m) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // budget(hi) <= m, so w is feasible up to the zero-coordinate padding.
  const RealVector w = (v / hi).cwiseMin(1.0);
  return v.dot(w);
}

double mnorm_primal_oracle(const RealVector& v_in, double m, const PrimalOracleOptions& options) {
  require_valid_m(m);
  const RealVector v = v_in.cwiseAbs();
  const double root_m = std::sqrt(m);
  auto objective = [&](const RealVector& x) {
    return (v - x).cwiseAbs().sum() + root_m * x.norm();
  };

  // Stationarity forces x_i = min(v_i, s) for a common level s. On each
  // interval between consecutive entries the objective is convex in s:
  //   f(s) = sum_{v_i > s} (v_i - s) + sqrt(m) sqrt(k s^2 + c).
  RealVector levels = v;
  std::sort(levels.data(), levels.data() + levels.size());
  auto along_clip = [&](double s) { return objective(v.cwiseMin(s)); };
  double best = std::min(along_clip(0.0), along_clip(levels.maxCoeff()));
  double lower = 0.0;
  for (Eigen::Index idx = 0; idx < levels.size(); ++idx) {
    const double upper = levels(idx);
    if (upper > lower) {
      const auto k = (v.array() > lower).count();  // entries strictly above the interval
      const double c = v.cwiseMin(lower).squaredNorm() - double(k) * lower * lower;
      best = std::min({best, along_clip(lower), along_clip(upper)});
      if (m > double(k) && c > 0.0) {
        const double s_star = std::sqrt(c / (m - double(k)));
        if (s_star > lower && s_star < upper) best = std::min(best, along_clip(s_star));
      }
    }
    lower = upper;
  }

  // Projected subgradient descent from random feasible starts.
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double step0 = std::max(v.sum(), 1e-300);
  for (int r = 0; r < options.restarts; ++r) {
    RealVector x(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) x(i) = v(i) * unit(rng);
    for (int t = 1; t <= options.iterations; ++t) {
      const double nx = x.norm();
      RealVector g(v.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double diff = v(i) - x(i);
        const double sign = diff > 0.0 ? -1.0 : (diff < 0.0 ? 1.0 : 0.0);
        g(i) = sign + (nx > 0.0 ? root_m * x(i) / nx : 0.0);
      }
      const double gn = g.norm();
      if (gn == 0.0) break;
      x = (x - (step0 / std::sqrt(double(t))) * g / gn / double(v.size())).cwiseMax(0.0);
      best = std::min(best, objective(x));
    }
  }

  const double reference = mnorm(v, m).value;
  if (best - reference > 1e-5) {
    std::ostringstream os;
    os << "primal value " << best << " exceeds semi-analytic " << reference << " by "
       << best - reference;
    throw Error(ErrorCode::ConvergenceFailure, os.str());
  }
  return best;
}

double pure_distillation_fidelity(const RealVector& magnitudes, int m) {
  require_valid_m(m);
  const double n = mnorm(magnitudes, m).value;
  const double f = n * n / double(m);
  if (f > 1.0 + 1e-12 || f < -1e-12) {
    std::ostringstream os;
    os << "fidelity " << f << " outside [0, 1]; is the input normalised?";
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  return std::clamp(f, 0.0, 1.0);
}

double pure_distillation_fidelity(const StateVector& psi, int m) {
  return pure_distillation_fidelity(RealVector(psi.cwiseAbs()), m);
}

}  // namespace cohdist
