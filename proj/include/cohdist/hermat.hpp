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

// Dense complex-Hermitian linear algebra used throughout the library.
//
// Matrices are plain Eigen dynamic matrices; the only strong type is
// DensityMatrix, which is validated once at construction and is immutable
// afterwards, so it can be shared freely between threads.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cohdist/error.hpp"

namespace cohdist {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Numerical thresholds shared by the kernel. Tests may tighten them.
struct Tolerances {
  double hermitian = 1e-9;        // max |m(i,j) - conj(m(j,i))| accepted as Hermitian
  double psd = 1e-10;             // eigenvalues in [-psd, 0) are clamped to zero
  double trace = 1e-10;           // |Tr rho - 1| accepted for a density matrix
  double distribution = 1e-9;     // |sum p - 1| accepted for a probability vector
  double reconstruction = 1e-10;  // per-dimension eig reconstruction target
  long dim_cap = 1024;            // largest dimension tensor_power may produce
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol;
  return tol;
}

class DensityMatrix {
 public:
  /// Validates Hermiticity, positivity and unit trace, then stores the
  /// exactly-Hermitian part of `m`.
  explicit DensityMatrix(const ComplexMatrix& m,
                         const Tolerances& tol = default_tolerances());

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix diagonal(const RealVector& probabilities);
  static DensityMatrix maximally_mixed(int dim);
  /// Uniform superposition state over `dim` basis vectors.
  static DensityMatrix maximally_coherent(int dim);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const ComplexMatrix& matrix() const { return mat_; }
  Complex operator()(int i, int j) const { return mat_(i, j); }

 private:
  struct Trusted {};
  DensityMatrix(ComplexMatrix m, Trusted) : mat_(std::move(m)) {}
  friend DensityMatrix dephase(const DensityMatrix& rho);
  friend DensityMatrix tensor_power(const DensityMatrix&, int, long);
  friend DensityMatrix kron(const DensityMatrix&, const DensityMatrix&);

  ComplexMatrix mat_;
};

struct HermitianEigen {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns are orthonormal eigenvectors
};

/// Largest entrywise deviation from Hermiticity, max |m(i,j) - conj(m(j,i))|.
double hermiticity_defect(const ComplexMatrix& m);

/// Fully dephasing channel: keeps the diagonal, zeroes everything else.
DensityMatrix dephase(const DensityMatrix& rho);

/// Throws NonHermitian if `m` is not Hermitian within tol.hermitian.
HermitianEigen eig_hermitian(const ComplexMatrix& m,
                             const Tolerances& tol = default_tolerances());

/// Principal square root of a PSD matrix. Throws NotPSD below -tol.psd.
ComplexMatrix sqrtm_psd(const ComplexMatrix& m,
                        const Tolerances& tol = default_tolerances());

/// Squared fidelity ||sqrt(rho) sqrt(sigma)||_1^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma,
                const Tolerances& tol = default_tolerances());

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
RealVector kron(const RealVector& a, const RealVector& b);
DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b);

/// rho^{(x) n}. Throws CapExceeded when dim^n exceeds `cap`.
DensityMatrix tensor_power(const DensityMatrix& rho, int n,
                           long cap = default_tolerances().dim_cap);
RealVector tensor_power(const RealVector& v, int n);

/// Base-2 Shannon entropy with 0 log 0 = 0. Throws NotDistribution.
double shannon_entropy(const RealVector& p,
                       const Tolerances& tol = default_tolerances());

/// Entrywise square roots of the diagonal of rho; a unit vector in R^d_+.
RealVector delta_vector(const DensityMatrix& rho);

/// Real diagonal of rho.
RealVector diagonal_of(const DensityMatrix& rho);

/// ||Delta(rho)||_inf, the largest diagonal entry.
double max_diagonal(const DensityMatrix& rho);

}  // namespace cohdist
