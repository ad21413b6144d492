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

#include "cohdist/hermat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cohdist {

namespace {

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) / 2.0;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorCode::DimMismatch, os.str());
  }
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m, const Tolerances& tol) {
  require_square(m, "DensityMatrix");
  const double defect = hermiticity_defect(m);
  if (defect > tol.hermitian) {
    std::ostringstream os;
    os << "Hermiticity defect " << defect << " exceeds " << tol.hermitian;
    throw Error(ErrorCode::NonHermitian, os.str());
  }
  mat_ = hermitian_part(m);
  const double tr = mat_.trace().real();
  if (std::abs(tr - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "trace " << tr << " differs from 1 by more than " << tol.trace;
    throw Error(ErrorCode::NotDensityMatrix, os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(mat_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -tol.psd) {
    std::ostringstream os;
    os << "smallest eigenvalue " << lo << " below " << -tol.psd;
    throw Error(ErrorCode::NotPSD, os.str());
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const double n = psi.norm();
  if (psi.size() == 0 || n == 0.0) {
    throw Error(ErrorCode::NotDensityMatrix, "pure state from a zero vector");
  }
  const StateVector u = psi / n;
  return DensityMatrix(ComplexMatrix(u * u.adjoint()), Trusted{});
}

DensityMatrix DensityMatrix::diagonal(const RealVector& probabilities) {
  ComplexMatrix m = ComplexMatrix::Zero(probabilities.size(), probabilities.size());
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) m(i, i) = probabilities(i);
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(ComplexMatrix(ComplexMatrix::Identity(dim, dim) / double(dim)),
                       Trusted{});
}

DensityMatrix DensityMatrix::maximally_coherent(int dim) {
  return pure(StateVector::Ones(dim));
}

DensityMatrix dephase(const DensityMatrix& rho) {
  ComplexMatrix d = ComplexMatrix::Zero(rho.dim(), rho.dim());
  d.diagonal() = rho.matrix().diagonal().real().cast<Complex>();
  return DensityMatrix(std::move(d), DensityMatrix::Trusted{});
}

HermitianEigen eig_hermitian(const ComplexMatrix& m, const Tolerances& tol) {
  require_square(m, "eig_hermitian");
  const double defect = hermiticity_defect(m);
  if (defect > tol.hermitian) {
    std::ostringstream os;
    os << "Hermiticity defect " << defect << " exceeds " << tol.hermitian;
    throw Error(ErrorCode::NonHermitian, os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "Hermitian eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

ComplexMatrix sqrtm_psd(const ComplexMatrix& m, const Tolerances& tol) {
  HermitianEigen e = eig_hermitian(m, tol);
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) < -tol.psd) {
      std::ostringstream os;
      os << "eigenvalue " << e.values(i) << " below " << -tol.psd;
      throw Error(ErrorCode::NotPSD, os.str());
    }
    e.values(i) = std::sqrt(std::max(0.0, e.values(i)));
  }
  return e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, const Tolerances& tol) {
  if (rho.dim() != sigma.dim()) {
    std::ostringstream os;
    os << "fidelity of " << rho.dim() << "- and " << sigma.dim() << "-dimensional states";
    throw Error(ErrorCode::DimMismatch, os.str());
  }
  // Trace norm of sqrt(rho) sqrt(sigma). Eigenvalues at rounding level are
  // dropped first: their square roots would otherwise leak ~1e-8 into F.
  auto root = [&](const ComplexMatrix& m) {
    HermitianEigen e = eig_hermitian(m, tol);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, e.values.maxCoeff());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
      if (e.values(i) < -tol.psd) throw Error(ErrorCode::NotPSD, "fidelity of a non-PSD matrix");
      e.values(i) = e.values(i) > floor ? std::sqrt(e.values(i)) : 0.0;
    }
    return ComplexMatrix(e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint());
  };
  const ComplexMatrix product = root(rho.matrix()) * root(sigma.matrix());
  const double root_sum = Eigen::JacobiSVD<ComplexMatrix>(product).singularValues().sum();
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

RealVector kron(const RealVector& a, const RealVector& b) {
  RealVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()), DensityMatrix::Trusted{});
}

DensityMatrix tensor_power(const DensityMatrix& rho, int n, long cap) {
  if (n < 1) throw Error(ErrorCode::DimMismatch, "tensor power needs n >= 1");
  long total = 1;
  for (int k = 0; k < n; ++k) {
    total *= rho.dim();
    if (total > cap) {
      std::ostringstream os;
      os << rho.dim() << "^" << n << " exceeds the dimension cap " << cap;
      throw Error(ErrorCode::CapExceeded, os.str());
    }
  }
  ComplexMatrix out = rho.matrix();
  for (int k = 1; k < n; ++k) out = kron(out, rho.matrix());
  return DensityMatrix(std::move(out), DensityMatrix::Trusted{});
}

RealVector tensor_power(const RealVector& v, int n) {
  RealVector out = v;
  for (int k = 1; k < n; ++k) out = kron(out, v);
  return out;
}

double shannon_entropy(const RealVector& p, const Tolerances& tol) {
  if (p.size() == 0) throw Error(ErrorCode::NotDistribution, "empty distribution");
  if (p.minCoeff() < -tol.distribution || std::abs(p.sum() - 1.0) > tol.distribution) {
    std::ostringstream os;
    os << "not a probability vector (sum " << p.sum() << ", min " << p.minCoeff() << ")";
    throw Error(ErrorCode::NotDistribution, os.str());
  }
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) h -= p(i) * std::log2(p(i));
  }
  return std::max(0.0, h);
}

RealVector diagonal_of(const DensityMatrix& rho) {
  return rho.matrix().diagonal().real();
}

RealVector delta_vector(const DensityMatrix& rho) {
  return diagonal_of(rho).cwiseMax(0.0).cwiseSqrt();
}

double max_diagonal(const DensityMatrix& rho) {
  return diagonal_of(rho).maxCoeff();
}

}  // namespace cohdist
