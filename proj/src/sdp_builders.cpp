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

#include <cmath>
#include <sstream>

#include "cohdist/sdp.hpp"

namespace cohdist {

namespace {

constexpr double kSupportThreshold = 1e-12;

struct Support {
  RealVector values;    // positive eigenvalues of rho
  ComplexMatrix basis;  // d x r isometry onto the support
};

Support support_of(const DensityMatrix& rho) {
  const HermitianEigen e = eig_hermitian(rho.matrix());
  const double cut = kSupportThreshold * std::max(1.0, e.values.maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) > cut) keep.push_back(i);
  }
  Support s;
  s.values.resize(static_cast<Eigen::Index>(keep.size()));
  s.basis.resize(rho.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    s.values(k) = e.values(keep[k]);
    s.basis.col(k) = e.vectors.col(keep[k]);
  }
  return s;
}

// Adds the block [[P, X], [X^dag, omega]] with P pinned to diag(lambda) and
// returns the coefficient of Re Tr(X V), which equals ||sqrt(rho) sqrt(omega)||_1
// at the optimum over X.
ComplexMatrix add_fidelity_block(SdpProblem& p, const Support& s, int d,
                                 FidelityBlockLayout& layout) {
  const int r = static_cast<int>(s.values.size());
  const int n = r + d;
  layout.block = p.add_block(n);
  layout.support_rank = r;
  layout.dim = d;
  for (int i = 0; i < r; ++i) {
    for (int j = i; j < r; ++j) {
      LinearFunctional re;
      re.add_real_entry(layout.block, n, i, j);
      p.add_equality(std::move(re), i == j ? s.values(i) : 0.0);
      if (i != j) {
        LinearFunctional im;
        im.add_imag_entry(layout.block, n, i, j);
        p.add_equality(std::move(im), 0.0);
      }
    }
  }
  ComplexMatrix overlap = ComplexMatrix::Zero(n, n);
  overlap.block(r, 0, d, r) = s.basis / 2.0;
  overlap.block(0, r, r, d) = s.basis.adjoint() / 2.0;
  return overlap;
}

void add_unit_trace(SdpProblem& p, const FidelityBlockLayout& layout) {
  const int n = layout.support_rank + layout.dim;
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < layout.dim; ++i) c(layout.support_rank + i, layout.support_rank + i) = 1.0;
  LinearFunctional tr;
  tr.add(layout.block, std::move(c));
  p.add_equality(std::move(tr), 1.0);
}

ComplexMatrix unit_1x1(double v) { return ComplexMatrix::Constant(1, 1, Complex(v, 0.0)); }

}  // namespace

BuiltProblem build_fidelity_over_Mm(const DensityMatrix& rho, double m) {
  const int d = rho.dim();
  if (!(m >= 1.0) || !std::isfinite(m) || m > d + 1e-12) {
    std::ostringstream os;
    os << "need 1 <= m <= dim = " << d << " (the diagonal-bounded set is empty beyond), got " << m;
    throw Error(ErrorCode::BadM, os.str());
  }
  BuiltProblem out;
  SdpProblem& p = out.problem;
  const Support s = support_of(rho);
  const ComplexMatrix overlap = add_fidelity_block(p, s, d, out.layout);
  p.objective.add(out.layout.block, overlap);

  const int r = out.layout.support_rank;
  const int n = r + d;
  if (m > d - 1e-12) {
    // omega_ii <= 1/d together with unit trace pins every diagonal entry.
    for (int i = 0; i < d; ++i) {
      LinearFunctional f;
      f.add_real_entry(out.layout.block, n, r + i, r + i);
      p.add_equality(std::move(f), 1.0 / d);
    }
  } else {
    add_unit_trace(p, out.layout);
    for (int i = 0; i < d; ++i) {
      const int slack = p.add_block(1);
      LinearFunctional f;
      f.add_real_entry(out.layout.block, n, r + i, r + i);
      f.add(slack, unit_1x1(1.0));
      p.add_equality(std::move(f), 1.0 / m);
    }
  }
  return out;
}

BuiltProblem build_min_diag_over_ball(const DensityMatrix& rho, double eps) {
  if (!(eps >= 0.0) || !(eps < 1.0)) {
    std::ostringstream os;
    os << "eps must lie in [0, 1), got " << eps;
    throw Error(ErrorCode::BadEpsilon, os.str());
  }
  const int d = rho.dim();
  BuiltProblem out;
  SdpProblem& p = out.problem;

  if (eps == 0.0) {
    // The ball is {rho}: min t s.t. t - s_i = rho_ii, s_i >= 0.
    out.layout.block = -1;
    out.layout.dim = d;
    out.fixed_omega = rho.matrix();
    out.t_block = p.add_block(1);
    for (int i = 0; i < d; ++i) {
      const int slack = p.add_block(1);
      LinearFunctional f;
      f.add(out.t_block, unit_1x1(1.0));
      f.add(slack, unit_1x1(-1.0));
      p.add_equality(std::move(f), rho(i, i).real());
    }
    p.objective.add(out.t_block, unit_1x1(-1.0));
    return out;
  }

  const Support s = support_of(rho);
  const ComplexMatrix overlap = add_fidelity_block(p, s, d, out.layout);
  const int r = out.layout.support_rank;
  const int n = r + d;
  add_unit_trace(p, out.layout);
  out.t_block = p.add_block(1);
  for (int i = 0; i < d; ++i) {
    const int slack = p.add_block(1);
    LinearFunctional f;
    f.add_real_entry(out.layout.block, n, r + i, r + i);
    f.add(slack, unit_1x1(1.0));
    f.add(out.t_block, unit_1x1(-1.0));
    p.add_equality(std::move(f), 0.0);
  }
  // Re Tr(X V) - u = sqrt(1 - eps), u >= 0.
  const int surplus = p.add_block(1);
  LinearFunctional fid;
  fid.add(out.layout.block, overlap);
  fid.add(surplus, unit_1x1(-1.0));
  p.add_equality(std::move(fid), std::sqrt(1.0 - eps));
  p.objective.add(out.t_block, unit_1x1(-1.0));
  return out;
}

ComplexMatrix extract_omega(const BuiltProblem& built, const SdpSolution& solution) {
  if (built.layout.block < 0) return built.fixed_omega;
  const int r = built.layout.support_rank;
  const int d = built.layout.dim;
  return solution.primal_blocks.at(built.layout.block).block(r, r, d, d);
}

}  // namespace cohdist
