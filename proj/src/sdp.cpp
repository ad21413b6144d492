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

#include "cohdist/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cohdist {

namespace {

using Blocks = std::vector<ComplexMatrix>;

ComplexMatrix herm(const ComplexMatrix& m) { return (m + m.adjoint()) / 2.0; }

double blocks_inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += hermitian_inner(a[i], b[i]);
  return s;
}

double blocks_norm(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

Blocks zero_blocks(const std::vector<int>& dims) {
  Blocks out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(ComplexMatrix::Zero(d, d));
  return out;
}

Blocks scaled_identity(const std::vector<int>& dims, double s) {
  Blocks out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(ComplexMatrix::Identity(d, d) * s);
  return out;
}

// Per-block Nesterov-Todd scaling: W = G G^dag with G^-1 X G^-dag = G^dag Z G = diag(lambda).
struct NtScaling {
  ComplexMatrix g;
  ComplexMatrix g_inv;
  ComplexMatrix w;
  RealVector lambda;
};

bool nt_scaling(const ComplexMatrix& x, const ComplexMatrix& z, NtScaling& out) {
  Eigen::LLT<ComplexMatrix> lx(x);
  Eigen::LLT<ComplexMatrix> lz(z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const ComplexMatrix l = lx.matrixL();
  const ComplexMatrix r = lz.matrixL();
  Eigen::JacobiSVD<ComplexMatrix> svd(r.adjoint() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector s = svd.singularValues();
  if (s.minCoeff() <= 0.0) return false;
  const RealVector s_inv_half = s.cwiseSqrt().cwiseInverse();
  const RealVector s_half = s.cwiseSqrt();
  out.lambda = s;
  out.g = l * svd.matrixV() * s_inv_half.cast<Complex>().asDiagonal();
  const ComplexMatrix l_inv =
      l.triangularView<Eigen::Lower>().solve(ComplexMatrix::Identity(l.rows(), l.cols()));
  out.g_inv = s_half.cast<Complex>().asDiagonal() * svd.matrixV().adjoint() * l_inv;
  out.w = herm(out.g * out.g.adjoint());
  return true;
}

// Largest alpha in (0, inf] with x + alpha dx >= 0, for x > 0.
double max_step(const ComplexMatrix& x, const ComplexMatrix& dx) {
  Eigen::LLT<ComplexMatrix> lx(x);
  if (lx.info() != Eigen::Success) return 0.0;
  const ComplexMatrix l = lx.matrixL();
  const auto tri = l.triangularView<Eigen::Lower>();
  ComplexMatrix t = tri.solve(dx);
  t = tri.solve(ComplexMatrix(t.adjoint()));  // L^-1 dx^dag L^-dag, dx Hermitian
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm(t), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo < 0.0 ? -1.0 / lo : std::numeric_limits<double>::infinity();
}

double min_eigenvalue(const Blocks& blocks) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm(b), Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

}  // namespace

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::MaxIter: return "MaxIter";
    case SdpStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

double hermitian_inner(const ComplexMatrix& a, const ComplexMatrix& x) {
  return (a.array() * x.array().conjugate()).sum().real();
}

double evaluate(const LinearFunctional& f, const std::vector<ComplexMatrix>& blocks) {
  double s = 0.0;
  for (const auto& t : f.terms) s += hermitian_inner(t.coeff, blocks[t.block]);
  return s;
}

LinearFunctional& LinearFunctional::add_real_entry(int block, int dim, int i, int j, double weight) {
  ComplexMatrix c = ComplexMatrix::Zero(dim, dim);
  if (i == j) {
    c(i, i) = weight;
  } else {
    c(i, j) = weight / 2.0;
    c(j, i) = weight / 2.0;
  }
  return add(block, std::move(c));
}

LinearFunctional& LinearFunctional::add_imag_entry(int block, int dim, int i, int j, double weight) {
  ComplexMatrix c = ComplexMatrix::Zero(dim, dim);
  // Re Tr(C X) = 2 Re(conj(c_ij) X_ij) for Hermitian C; c_ij = i/2 picks Im X_ij.
  c(i, j) = Complex(0.0, weight / 2.0);
  c(j, i) = Complex(0.0, -weight / 2.0);
  return add(block, std::move(c));
}

int SdpProblem::total_dim() const {
  int n = 0;
  for (int d : block_dims) n += d;
  return n;
}

SdpSolution SdpSolver::solve(const SdpProblem& p) {
  const auto nb = p.block_dims.size();
  const auto ncons = static_cast<Eigen::Index>(p.equalities.size());
  if (nb == 0) throw Error(ErrorCode::IllPosed, "problem has no blocks");
  for (int d : p.block_dims) {
    if (d <= 0) throw Error(ErrorCode::IllPosed, "block dimensions must be positive");
    if (d > options_.block_cap) {
      std::ostringstream os;
      os << "block of size " << d << " exceeds the solver cap " << options_.block_cap;
      throw Error(ErrorCode::CapExceeded, os.str());
    }
  }
  auto check_functional = [&](const LinearFunctional& f, const char* what) {
    for (const auto& t : f.terms) {
      if (t.block < 0 || static_cast<std::size_t>(t.block) >= nb ||
          t.coeff.rows() != p.block_dims[t.block] || t.coeff.cols() != p.block_dims[t.block]) {
        throw Error(ErrorCode::IllPosed, std::string(what) + " term does not match its block");
      }
      if (hermiticity_defect(t.coeff) > 1e-12) {
        throw Error(ErrorCode::IllPosed, std::string(what) + " coefficient is not Hermitian");
      }
    }
  };
  check_functional(p.objective, "objective");
  for (const auto& e : p.equalities) check_functional(e.lhs, "equality");

  // Dense per-block coefficient matrices.
  std::vector<Blocks> a(ncons, zero_blocks(p.block_dims));
  std::vector<std::vector<int>> touches(ncons);
  RealVector b(ncons);
  for (Eigen::Index k = 0; k < ncons; ++k) {
    for (const auto& t : p.equalities[k].lhs.terms) a[k][t.block] += t.coeff;
    for (std::size_t bl = 0; bl < nb; ++bl) {
      if (a[k][bl].cwiseAbs().maxCoeff() > 0.0) touches[k].push_back(static_cast<int>(bl));
    }
    b(k) = p.equalities[k].rhs;
  }
  Blocks c = zero_blocks(p.block_dims);
  for (const auto& t : p.objective.terms) c[t.block] += t.coeff;

  auto apply_a = [&](const Blocks& x) {
    RealVector out(ncons);
    for (Eigen::Index k = 0; k < ncons; ++k) {
      double s = 0.0;
      for (int bl : touches[k]) s += hermitian_inner(a[k][bl], x[bl]);
      out(k) = s;
    }
    return out;
  };
  auto apply_at = [&](const RealVector& y) {
    Blocks out = zero_blocks(p.block_dims);
    for (Eigen::Index k = 0; k < ncons; ++k) {
      for (int bl : touches[k]) out[bl] += y(k) * a[k][bl];
    }
    return out;
  };

  // Linear independence of the equalities.
  if (ncons > 0) {
    Eigen::MatrixXd gram(ncons, ncons);
    for (Eigen::Index k = 0; k < ncons; ++k) {
      for (Eigen::Index l = k; l < ncons; ++l) {
        double s = 0.0;
        for (int bl : touches[k]) s += hermitian_inner(a[k][bl], a[l][bl]);
        gram(k, l) = gram(l, k) = s;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const double hi = es.eigenvalues().maxCoeff();
    const double lo = es.eigenvalues().minCoeff();
    if (!(hi > 0.0) || lo <= 1e-12 * hi) {
      throw Error(ErrorCode::IllPosed, "equality constraints are linearly dependent");
    }
  }

  const double n = p.total_dim();
  const double b_norm = b.norm();
  const double c_norm = blocks_norm(c);

  // Infeasible starting point.
  double max_a_norm = 0.0;
  double x_scale = 1.0;
  for (Eigen::Index k = 0; k < ncons; ++k) {
    const double an = blocks_norm(a[k]);
    max_a_norm = std::max(max_a_norm, an);
    x_scale = std::max(x_scale, (1.0 + std::abs(b(k))) / (1.0 + an));
  }
  const double xi = std::max({10.0, std::sqrt(n), n * x_scale});
  const double eta = std::max({10.0, std::sqrt(n), max_a_norm, c_norm});
  Blocks x = scaled_identity(p.block_dims, xi);
  Blocks z = scaled_identity(p.block_dims, eta);
  RealVector y = RealVector::Zero(ncons);

  SdpSolution sol;
  std::vector<NtScaling> nt(nb);
  scaled_.assign(nb, ComplexMatrix());
  schur_.resize(ncons, ncons);
  int stalls = 0;
  bool finished = false;

  auto record = [&](SdpStatus status, int it) {
    sol.status = status;
    sol.iterations = it;
    sol.primal_value = blocks_inner(c, x);
    sol.dual_value = b.dot(y);
    sol.primal_residual = (b - apply_a(x)).norm();
    Blocks rd = apply_at(y);
    for (std::size_t bl = 0; bl < nb; ++bl) rd[bl] -= z[bl] + c[bl];
    sol.dual_residual = blocks_norm(rd);
    sol.min_eigenvalue = min_eigenvalue(x);
    sol.primal_blocks = x;
    sol.dual_slack_blocks = z;
    sol.multipliers = y;
  };
  auto acceptable = [&]() {
    const double pv = blocks_inner(c, x);
    const double dv = b.dot(y);
    const double pres = (b - apply_a(x)).norm();
    return std::abs(pv - dv) <= options_.accept_gap * (1.0 + std::abs(pv)) &&
           pres <= options_.accept_feas * (1.0 + b_norm) &&
           min_eigenvalue(x) >= options_.accept_min_eig;
  };

  int it = 0;
  for (; it < options_.max_iterations; ++it) {
    const double pobj = blocks_inner(c, x);
    const double dobj = b.dot(y);
    const RealVector rp = b - apply_a(x);
    Blocks rd = apply_at(y);  // rd = C + Z - A^T(y)
    for (std::size_t bl = 0; bl < nb; ++bl) rd[bl] = c[bl] + z[bl] - rd[bl];
    const double pinf = rp.norm() / (1.0 + b_norm);
    const double dinf = blocks_norm(rd) / (1.0 + c_norm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double mu = blocks_inner(x, z) / n;

    if (pinf < options_.feas_tol && dinf < options_.feas_tol && gap < options_.gap_tol) {
      record(SdpStatus::Optimal, it);
      finished = true;
      break;
    }

    // Primal infeasibility: y/(-b^T y) approaches a ray with A^T(ray) >= 0.
    if (dobj < 0.0 && y.norm() > 1e8) {
      const RealVector ray = y / (-dobj);
      const Blocks s = apply_at(ray);
      if (min_eigenvalue(s) >= -options_.ray_tol * std::max(1.0, blocks_norm(s))) {
        record(SdpStatus::Infeasible, it);
        finished = true;
        break;
      }
    }
    // Dual infeasibility: X/<C,X> approaches a ray with A(ray) = 0, <C,ray> = 1.
    if (pobj > 0.0 && blocks_norm(x) > 1e8) {
      Blocks ray = x;
      for (auto& m : ray) m /= pobj;
      if (apply_a(ray).norm() <= options_.ray_tol) {
        record(SdpStatus::Infeasible, it);
        finished = true;
        break;
      }
    }

    bool ok = true;
    for (std::size_t bl = 0; bl < nb && ok; ++bl) ok = nt_scaling(x[bl], z[bl], nt[bl]);
    if (!ok) break;

    // Schur complement M_kl = <A_k, W A_l W>.
    for (Eigen::Index l = 0; l < ncons; ++l) {
      for (int bl : touches[l]) scaled_[bl] = nt[bl].w * a[l][bl] * nt[bl].w;
      for (Eigen::Index k = 0; k <= l; ++k) {
        double s = 0.0;
        for (int bl : touches[k]) {
          if (std::find(touches[l].begin(), touches[l].end(), bl) != touches[l].end()) {
            s += hermitian_inner(a[k][bl], scaled_[bl]);
          }
        }
        schur_(k, l) = schur_(l, k) = s;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> schur_llt(schur_);
    Eigen::LDLT<Eigen::MatrixXd> schur_ldlt;
    const bool use_llt = schur_llt.info() == Eigen::Success;
    if (!use_llt) schur_ldlt.compute(schur_);

    // W rd W is shared by predictor and corrector.
    Blocks w_rd_w(nb);
    for (std::size_t bl = 0; bl < nb; ++bl) w_rd_w[bl] = nt[bl].w * rd[bl] * nt[bl].w;
    const RealVector a_w_rd_w = apply_a(w_rd_w);

    auto direction = [&](const Blocks& rc, Blocks& dx, RealVector& dy, Blocks& dz) {
      const RealVector rhs = apply_a(rc) + a_w_rd_w - rp;
      dy = use_llt ? RealVector(schur_llt.solve(rhs)) : RealVector(schur_ldlt.solve(rhs));
      dz = apply_at(dy);
      for (std::size_t bl = 0; bl < nb; ++bl) {
        dz[bl] = herm(dz[bl] - rd[bl]);
        dx[bl] = herm(rc[bl] - nt[bl].w * dz[bl] * nt[bl].w);
      }
    };
    auto step_lengths = [&](const Blocks& dx, const Blocks& dz, double& ap, double& ad) {
      ap = std::numeric_limits<double>::infinity();
      ad = std::numeric_limits<double>::infinity();
      for (std::size_t bl = 0; bl < nb; ++bl) {
        ap = std::min(ap, max_step(x[bl], dx[bl]));
        ad = std::min(ad, max_step(z[bl], dz[bl]));
      }
    };

    // Predictor (affine scaling): rc = -X.
    Blocks rc(nb), dx(nb), dz(nb);
    RealVector dy;
    for (std::size_t bl = 0; bl < nb; ++bl) rc[bl] = -x[bl];
    direction(rc, dx, dy, dz);
    double ap = 0.0, ad = 0.0;
    step_lengths(dx, dz, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (std::size_t bl = 0; bl < nb; ++bl) {
      mu_aff += hermitian_inner(x[bl] + ap * dx[bl], z[bl] + ad * dz[bl]);
    }
    mu_aff /= n;
    const double sigma =
        std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), options_.sigma_min, options_.sigma_max);

    // Corrector in the scaled space, where the scaled point is diag(lambda):
    // lambda o D + D o lambda = 2 (sigma mu I - lambda^2 - sym(Dx Dz)).
    for (std::size_t bl = 0; bl < nb; ++bl) {
      const ComplexMatrix sx = nt[bl].g_inv * dx[bl] * nt[bl].g_inv.adjoint();
      const ComplexMatrix sz = nt[bl].g.adjoint() * dz[bl] * nt[bl].g;
      ComplexMatrix r = -herm(sx * sz);
      const RealVector& lam = nt[bl].lambda;
      for (Eigen::Index i = 0; i < lam.size(); ++i) r(i, i) += sigma * mu - lam(i) * lam(i);
      for (Eigen::Index i = 0; i < lam.size(); ++i) {
        for (Eigen::Index j = 0; j < lam.size(); ++j) r(i, j) *= 2.0 / (lam(i) + lam(j));
      }
      rc[bl] = herm(nt[bl].g * r * nt[bl].g.adjoint());
    }
    direction(rc, dx, dy, dz);
    step_lengths(dx, dz, ap, ad);
    ap = std::min(1.0, options_.step_fraction * ap);
    ad = std::min(1.0, options_.step_fraction * ad);

    for (std::size_t bl = 0; bl < nb; ++bl) {
      x[bl] = herm(x[bl] + ap * dx[bl]);
      z[bl] = herm(z[bl] + ad * dz[bl]);
    }
    y += ad * dy;

    stalls = (ap < 1e-10 && ad < 1e-10) ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }

  if (!finished) {
    record(acceptable() ? SdpStatus::Optimal : SdpStatus::MaxIter, it);
  }
  return sol;
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  SdpSolver solver(options);
  return solver.solve(problem);
}

}  // namespace cohdist
