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

// Small dense semidefinite programs over complex Hermitian blocks.
//
// Primal:  maximise  <C, X>   s.t.  <A_k, X> = b_k,  X = diag(X_1, ..., X_p) >= 0
// Dual:    minimise  b^T y    s.t.  sum_k y_k A_k - C = Z >= 0
//
// with the real inner product <A, X> = Re Tr(A X) on Hermitian matrices.
// Real symmetric blocks are the special case of zero imaginary parts, and
// scalar inequalities are expressed through 1x1 slack blocks.

#include <vector>

#include "cohdist/hermat.hpp"

namespace cohdist {

/// One Hermitian coefficient matrix acting on one block.
struct BlockTerm {
  int block = 0;
  ComplexMatrix coeff;
};

/// X -> sum over terms of Re Tr(coeff * X[block]).
struct LinearFunctional {
  std::vector<BlockTerm> terms;

  LinearFunctional& add(int block, ComplexMatrix coeff) {
    terms.push_back({block, std::move(coeff)});
    return *this;
  }
  /// Adds `weight` times the real part of entry (i, j) (or of X(i,i) when i == j).
  LinearFunctional& add_real_entry(int block, int dim, int i, int j, double weight = 1.0);
  /// Adds `weight` times the imaginary part of entry (i, j), i != j.
  LinearFunctional& add_imag_entry(int block, int dim, int i, int j, double weight = 1.0);
};

struct LinearEquality {
  LinearFunctional lhs;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<int> block_dims;
  LinearFunctional objective;  // maximised
  std::vector<LinearEquality> equalities;

  int add_block(int dim) {
    block_dims.push_back(dim);
    return static_cast<int>(block_dims.size()) - 1;
  }
  void add_equality(LinearFunctional lhs, double rhs) {
    equalities.push_back({std::move(lhs), rhs});
  }
  int total_dim() const;
};

enum class SdpStatus { Optimal, MaxIter, Infeasible };

const char* to_string(SdpStatus status);

struct SdpSolution {
  SdpStatus status = SdpStatus::MaxIter;
  double primal_value = 0.0;
  double dual_value = 0.0;
  std::vector<ComplexMatrix> primal_blocks;
  std::vector<ComplexMatrix> dual_slack_blocks;
  RealVector multipliers;  // y
  int iterations = 0;
  double primal_residual = 0.0;  // ||b - A(X)||_2
  double dual_residual = 0.0;    // ||A^T(y) - Z - C||_F
  double min_eigenvalue = 0.0;   // smallest eigenvalue over the primal blocks
};

struct SdpOptions {
  int max_iterations = 300;
  double gap_tol = 1e-11;        // relative gap targeted before stopping
  double feas_tol = 1e-11;       // relative residuals targeted before stopping
  double step_fraction = 0.98;   // fraction of the step to the cone boundary
  double sigma_min = 0.1;
  double sigma_max = 0.9;
  int block_cap = 256;
  // Acceptance thresholds for declaring Optimal when the targets above are
  // not reached before progress stalls.
  double accept_gap = 1e-7;      // times (1 + |primal|)
  double accept_feas = 1e-8;
  double accept_min_eig = -1e-9;
  double ray_tol = 1e-8;         // infeasibility certificate residual
};

/// Primal-dual path-following interior point method with Nesterov-Todd
/// scaling and a Mehrotra predictor-corrector step. Holds its scratch
/// buffers, so an instance must not be shared between threads.
class SdpSolver {
 public:
  explicit SdpSolver(SdpOptions options = {}) : options_(options) {}

  /// Throws IllPosed for inconsistent data or linearly dependent equalities,
  /// CapExceeded for oversized blocks.
  SdpSolution solve(const SdpProblem& problem);

  const SdpOptions& options() const { return options_; }

 private:
  SdpOptions options_;
  Eigen::MatrixXd schur_;
  std::vector<ComplexMatrix> scaled_;  // W A_l W, reused per constraint
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

/// <A, X> = Re Tr(A X) for Hermitian A and X.
double hermitian_inner(const ComplexMatrix& a, const ComplexMatrix& x);

/// Evaluates a functional at a block-diagonal point.
double evaluate(const LinearFunctional& f, const std::vector<ComplexMatrix>& blocks);

// ---------------------------------------------------------------------------
// Problem builders.

/// Variable layout of the fidelity block [[P, X], [X^dag, omega]] shared by
/// both builders. P lives on the support of rho (rank r), so the block is
/// (r + d) x (r + d); omega is the trailing d x d corner.
struct FidelityBlockLayout {
  int block = 0;
  int support_rank = 0;
  int dim = 0;
};

struct BuiltProblem {
  SdpProblem problem;
  FidelityBlockLayout layout;
  int t_block = -1;  // min-diagonal builder only: the 1x1 block holding t
  ComplexMatrix fixed_omega;  // set when the program pins omega (eps == 0)
};

/// max_{omega in MM_m} sqrt F(rho, omega), where MM_m is the set of states
/// with every diagonal entry <= 1/m. The optimum is the square root of the
/// relaxed assisted fidelity. Throws BadM for m < 1 or m > dim (empty set).
BuiltProblem build_fidelity_over_Mm(const DensityMatrix& rho, double m);

/// min ||Delta(omega)||_inf over { omega : F(rho, omega) >= 1 - eps }. The
/// objective is maximised as -t, so the optimum is minus the minimum.
/// eps == 0 collapses the ball to {rho}, which is encoded directly.
/// Throws BadEpsilon unless 0 <= eps < 1.
BuiltProblem build_min_diag_over_ball(const DensityMatrix& rho, double eps);

/// Recovers omega from a solved builder problem.
ComplexMatrix extract_omega(const BuiltProblem& built, const SdpSolution& solution);

}  // namespace cohdist
