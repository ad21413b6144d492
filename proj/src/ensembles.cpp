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

#include "cohdist/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cohdist/dnorm.hpp"

namespace cohdist {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinWeight = 1e-12;

Complex unit_phase(double angle) { return std::polar(1.0, angle); }

Complex normalise_phase(Complex z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : Complex(1.0, 0.0);
}

// Drops negligible atoms and renormalises the remaining weights.
Ensemble prune(const std::vector<double>& weights, const std::vector<StateVector>& atoms) {
  Ensemble e;
  std::vector<double> w;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] >= kMinWeight) {
      w.push_back(weights[i]);
      e.atoms.push_back(atoms[i] / atoms[i].norm());
    }
  }
  e.weights = Eigen::Map<RealVector>(w.data(), static_cast<Eigen::Index>(w.size()));
  e.weights /= e.weights.sum();
  return e;
}

// ---------------------------------------------------------------------------
// Correlation-matrix extraction (unit diagonal, PSD, dimension <= 3).

struct Extracted {
  std::vector<double> weights;
  std::vector<StateVector> phases;  // unimodular vectors
};

struct RangeInfo {
  int rank = 0;
  ComplexMatrix pinv;      // pseudo-inverse on the range
  StateVector null_vector; // eigenvector of the smallest eigenvalue
  StateVector top;         // sqrt(lambda_max) * leading eigenvector
};

RangeInfo analyse(const ComplexMatrix& x, double threshold) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(x);
  RangeInfo info;
  const auto n = x.rows();
  info.pinv = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lam = es.eigenvalues()(k);
    if (lam > threshold) {
      ++info.rank;
      info.pinv += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint() / lam;
    }
  }
  info.null_vector = es.eigenvectors().col(0);
  info.top = es.eigenvectors().col(n - 1) * std::sqrt(std::max(0.0, es.eigenvalues()(n - 1)));
  return info;
}

double extraction_weight(const ComplexMatrix& pinv, const StateVector& v) {
  const double q = (v.adjoint() * pinv * v)(0, 0).real();
  return q > 0.0 ? 1.0 / q : 0.0;
}

StateVector phase_vector(double alpha, double beta) {
  StateVector v(3);
  v << 1.0, unit_phase(alpha), unit_phase(beta);
  return v;
}

// Maximises lambda(v) = 1 / (v^dag X^-1 v) over v = (1, e^{ia}, e^{ib}).
StateVector best_full_rank_direction(const ComplexMatrix& pinv, int grid, double offset) {
  auto score = [&](double a, double b) { return extraction_weight(pinv, phase_vector(a, b)); };
  const double h = kTwoPi / grid;
  double best_a = 0.0, best_b = 0.0, best = -1.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double a = offset + i * h;
      const double b = offset + j * h;
      const double s = score(a, b);
      if (s > best) {
        best = s;
        best_a = a;
        best_b = b;
      }
    }
  }
  // Golden-section polish, alternating coordinates.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto golden = [&](auto&& f, double lo, double hi) {
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 60; ++it) {
      if (fc > fd) {
        hi = d; d = c; fd = fc;
        c = hi - inv_phi * (hi - lo);
        fc = f(c);
      } else {
        lo = c; c = d; fc = fd;
        d = lo + inv_phi * (hi - lo);
        fd = f(d);
      }
    }
    return 0.5 * (lo + hi);
  };
  for (int round = 0; round < 4; ++round) {
    const double a = golden([&](double t) { return score(t, best_b); }, best_a - h, best_a + h);
    if (score(a, best_b) > score(best_a, best_b)) best_a = a;
    const double b = golden([&](double t) { return score(best_a, t); }, best_b - h, best_b + h);
    if (score(best_a, b) > score(best_a, best_b)) best_b = b;
  }
  return phase_vector(best_a, best_b);
}

// Unimodular v = (1, e^{ia}, e^{ib}) with n^dag v = 0, i.e. three complex
// numbers of fixed moduli closing a triangle. Returns both orientations.
std::vector<StateVector> unimodular_in_range(const StateVector& null_vector, const ComplexMatrix& pinv) {
  const Complex a = std::conj(null_vector(0));
  const Complex b = std::conj(null_vector(1));
  const Complex c = std::conj(null_vector(2));
  const double na = std::abs(a), nb = std::abs(b), nc = std::abs(c);
  const double tiny = 1e-12 * std::max({na, nb, nc});
  std::vector<StateVector> out;
  auto push = [&](Complex ea, Complex eb) {
    StateVector v(3);
    v << 1.0, normalise_phase(ea), normalise_phase(eb);
    out.push_back(v);
  };
  if (na <= tiny || nb <= tiny || nc <= tiny) {
    // One coordinate is unconstrained; scan it and keep the best weight.
    StateVector best;
    double best_w = -1.0;
    for (int i = 0; i < 256; ++i) {
      const Complex free_phase = unit_phase(kTwoPi * i / 256.0);
      StateVector v(3);
      if (na <= tiny) {
        v << 1.0, free_phase, normalise_phase(-b * free_phase / c);
      } else if (nb <= tiny) {
        v << 1.0, free_phase, normalise_phase(-a / c);
      } else {
        v << 1.0, normalise_phase(-a / b), free_phase;
      }
      const double w = extraction_weight(pinv, v);
      if (w > best_w) {
        best_w = w;
        best = v;
      }
    }
    out.push_back(best);
    return out;
  }
  const double cos_g = std::clamp((na * na + nb * nb - nc * nc) / (2.0 * na * nb), -1.0, 1.0);
  const double g = std::acos(cos_g);
  const Complex dir = -a / na;
  for (double sign : {1.0, -1.0}) {
    const Complex ub = nb * dir * unit_phase(sign * g);
    const Complex uc = -a - ub;
    push(ub / b, uc / c);
  }
  return out;
}

Extracted extract_correlation(ComplexMatrix x, const SameDiagonalOptions& opt, double offset) {
  const auto n = x.rows();
  Extracted out;
  double remaining = 1.0;
  for (int step = 0; step < 16 && remaining > kMinWeight; ++step) {
    x = (x + x.adjoint()) / 2.0;
    for (Eigen::Index i = 0; i < n; ++i) x(i, i) = 1.0;
    const RangeInfo info = analyse(x, opt.rank_threshold);
    if (info.rank <= 1 || n == 1) {
      StateVector v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = normalise_phase(info.top(i) * std::conj(info.top(0)));
      out.weights.push_back(remaining);
      out.phases.push_back(v);
      return out;
    }
    StateVector v;
    if (info.rank == 3) {
      v = best_full_rank_direction(info.pinv, opt.grid, offset);
    } else {
      const auto candidates = unimodular_in_range(info.null_vector, info.pinv);
      double best_w = -1.0;
      for (const auto& cand : candidates) {
        const double w = extraction_weight(info.pinv, cand);
        if (w > best_w) {
          best_w = w;
          v = cand;
        }
      }
    }
    const double lam = std::min(1.0, extraction_weight(info.pinv, v));
    out.weights.push_back(remaining * lam);
    out.phases.push_back(v);
    if (1.0 - lam < kMinWeight) return out;
    x = (x - lam * v * v.adjoint()) / (1.0 - lam);
    remaining *= 1.0 - lam;
  }
  return out;
}

}  // namespace

ComplexMatrix Ensemble::average() const {
  const auto d = atoms.empty() ? 0 : atoms.front().size();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    out += weights(static_cast<Eigen::Index>(i)) * atoms[i] * atoms[i].adjoint();
  }
  return out;
}

double reconstruction_residual(const Ensemble& e, const DensityMatrix& rho) {
  return (rho.matrix() - e.average()).norm();
}

double diagonal_residual(const Ensemble& e, const DensityMatrix& rho) {
  const RealVector diag = diagonal_of(rho);
  double worst = 0.0;
  for (const auto& a : e.atoms) {
    worst = std::max(worst, (a.cwiseAbs2() - diag).cwiseAbs().maxCoeff());
  }
  return worst;
}

Ensemble same_diagonal_decomposition(const DensityMatrix& rho, const SameDiagonalOptions& options) {
  const int d = rho.dim();
  if (d > 3) {
    std::ostringstream os;
    os << "same-diagonal decompositions are only guaranteed for d <= 3, got d = " << d;
    throw Error(ErrorCode::DimTooLarge, os.str());
  }
  const RealVector diag = diagonal_of(rho);
  std::vector<int> support;
  for (int i = 0; i < d; ++i) {
    if (diag(i) > 1e-14) support.push_back(i);
  }
  const auto ds = static_cast<Eigen::Index>(support.size());

  // Correlation matrix on the support: X = Delta^{-1/2} rho Delta^{-1/2}.
  ComplexMatrix x(ds, ds);
  for (Eigen::Index i = 0; i < ds; ++i) {
    for (Eigen::Index j = 0; j < ds; ++j) {
      x(i, j) = rho(support[i], support[j]) / std::sqrt(diag(support[i]) * diag(support[j]));
    }
  }

  auto lift = [&](const Extracted& ex) {
    std::vector<StateVector> atoms;
    for (const auto& ph : ex.phases) {
      StateVector a = StateVector::Zero(d);
      for (Eigen::Index i = 0; i < ds; ++i) a(support[i]) = std::sqrt(diag(support[i])) * ph(i);
      atoms.push_back(a);
    }
    return prune(ex.weights, atoms);
  };

  Ensemble best;
  double best_residual = INFINITY;
  for (int attempt = 0; attempt < std::max(1, options.restarts); ++attempt) {
    Extracted ex;
    if (ds == 2) {
      const Complex c = x(0, 1);
      const double mag = std::min(1.0, std::abs(c));
      const Complex ph = std::conj(normalise_phase(c));  // e^{-i theta}
      StateVector plus(2), minus(2);
      plus << 1.0, ph;
      minus << 1.0, -ph;
      ex.weights = {(1.0 + mag) / 2.0, (1.0 - mag) / 2.0};
      ex.phases = {plus, minus};
    } else {
      const double offset = attempt * (kTwoPi / options.grid) / options.restarts;
      ex = extract_correlation(x, options, offset);
    }
    Ensemble e = lift(ex);
    const double res = std::max(reconstruction_residual(e, rho), diagonal_residual(e, rho));
    if (res < best_residual) {
      best_residual = res;
      best = std::move(e);
    }
    if (best_residual <= options.residual_target || ds <= 2) break;
  }
  if (best_residual > options.residual_target || static_cast<int>(best.size()) > options.max_atoms) {
    std::ostringstream os;
    os << "same-diagonal decomposition residual " << best_residual << " with " << best.size()
       << " atoms misses the target " << options.residual_target;
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  return best;
}

// ---------------------------------------------------------------------------
// Objective evaluation and search.

double evaluate_objective(const Ensemble& e, const EnsembleObjective& objective) {
  return std::visit(
      [&](const auto& obj) -> double {
        using T = std::decay_t<decltype(obj)>;
        double acc = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) {
          const double w = e.weights(static_cast<Eigen::Index>(i));
          if (w < kMinWeight) continue;
          const RealVector probs = e.atoms[i].cwiseAbs2();
          if constexpr (std::is_same_v<T, MaxAvgPureFidelity>) {
            acc += w * pure_distillation_fidelity(RealVector(probs.cwiseSqrt()), obj.m);
          } else if constexpr (std::is_same_v<T, MinMaxInfNormSq>) {
            acc = std::max(acc, probs.maxCoeff());
          } else {
            acc += w * shannon_entropy(probs / probs.sum());
          }
        }
        return acc;
      },
      objective);
}

bool is_maximisation(const EnsembleObjective& objective) {
  return !std::holds_alternative<MinMaxInfNormSq>(objective);
}

namespace {

struct Spectrum {
  RealVector roots;     // sqrt(lambda_j) on the support
  ComplexMatrix basis;  // d x r
};

Spectrum spectrum_of(const DensityMatrix& rho) {
  const HermitianEigen e = eig_hermitian(rho.matrix());
  const double cut = 1e-12 * std::max(1.0, e.values.maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = e.values.size() - 1; k >= 0; --k) {
    if (e.values(k) > cut) keep.push_back(k);
  }
  Spectrum s;
  s.roots.resize(static_cast<Eigen::Index>(keep.size()));
  s.basis.resize(rho.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    s.roots(j) = std::sqrt(e.values(keep[j]));
    s.basis.col(j) = e.vectors.col(keep[j]);
  }
  return s;
}

// Polar factor M (M^dag M)^{-1/2}; M is atoms_cap x rank.
ComplexMatrix isometry_from(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.adjoint() * m);
  RealVector inv_root = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return m * es.eigenvectors() * inv_root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Ensemble ensemble_from_isometry(const Spectrum& s, const ComplexMatrix& u) {
  std::vector<double> w;
  std::vector<StateVector> atoms;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const StateVector coeffs = (u.row(i).transpose().array() * s.roots.cast<Complex>().array()).matrix();
    const StateVector raw = s.basis * coeffs;
    const double p = raw.squaredNorm();
    w.push_back(p);
    atoms.push_back(p > 0.0 ? StateVector(raw) : StateVector(StateVector::Zero(raw.size())));
  }
  return prune(w, atoms);
}

RealVector pack(const ComplexMatrix& m) {
  RealVector out(2 * m.size());
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    out(2 * k) = m.data()[k].real();
    out(2 * k + 1) = m.data()[k].imag();
  }
  return out;
}

ComplexMatrix unpack(const RealVector& v, Eigen::Index rows, Eigen::Index cols) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = Complex(v(2 * k), v(2 * k + 1));
  return m;
}

}  // namespace

SearchResult ensemble_search(const DensityMatrix& rho, const EnsembleObjective& objective,
                             int atoms_cap, const SearchOptions& options) {
  const Spectrum spec = spectrum_of(rho);
  const auto rank = spec.roots.size();
  if (atoms_cap < rank) {
    std::ostringstream os;
    os << "atoms_cap " << atoms_cap << " is below rank " << rank;
    throw Error(ErrorCode::IncompatibleEnsemble, os.str());
  }
  const double sense = is_maximisation(objective) ? 1.0 : -1.0;

  int evaluations = 0;
  auto score = [&](const RealVector& params) {
    ++evaluations;
    const Ensemble e = ensemble_from_isometry(spec, isometry_from(unpack(params, atoms_cap, rank)));
    return sense * evaluate_objective(e, objective);
  };

  std::vector<RealVector> starts;
  if (options.warm_start && rho.dim() <= 3) {
    const Ensemble warm = same_diagonal_decomposition(rho);
    if (static_cast<int>(warm.size()) <= atoms_cap) {
      ComplexMatrix u = ComplexMatrix::Zero(atoms_cap, rank);
      for (std::size_t i = 0; i < warm.size(); ++i) {
        const StateVector scaled = std::sqrt(warm.weights(i)) * warm.atoms[i];
        const StateVector proj = spec.basis.adjoint() * scaled;
        for (Eigen::Index j = 0; j < rank; ++j) u(i, j) = proj(j) / spec.roots(j);
      }
      starts.push_back(pack(u));
    }
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  for (int r = 0; r < options.restarts; ++r) {
    RealVector p(2 * atoms_cap * rank);
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = gauss(rng);
    starts.push_back(pack(isometry_from(unpack(p, atoms_cap, rank))));
  }

  const int per_run = std::max(1, options.evaluation_budget / std::max<int>(1, starts.size()));
  RealVector best_params;
  double best = -INFINITY;
  for (const auto& start : starts) {
    RealVector x = start;
    double fx = score(x);
    const int stop_at = evaluations + per_run;
    double step = 0.25;
    while (step > 1e-9 && evaluations < stop_at) {
      bool improved = false;
      for (Eigen::Index k = 0; k < x.size() && evaluations < stop_at; ++k) {
        for (double dir : {1.0, -1.0}) {
          RealVector trial = x;
          trial(k) += dir * step;
          const double ft = score(trial);
          if (ft > fx) {
            x = std::move(trial);
            fx = ft;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (fx > best) {
      best = fx;
      best_params = x;
    }
  }

  SearchResult out;
  out.ensemble = ensemble_from_isometry(spec, isometry_from(unpack(best_params, atoms_cap, rank)));
  out.value = evaluate_objective(out.ensemble, objective);
  const double res = reconstruction_residual(out.ensemble, rho);
  if (res > 1e-8) {
    std::ostringstream os;
    os << "search produced an ensemble with reconstruction residual " << res;
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Steering and protocol simulation.

StateVector canonical_purification(const DensityMatrix& rho) {
  const HermitianEigen e = eig_hermitian(rho.matrix());
  const int d = rho.dim();
  StateVector joint = StateVector::Zero(d * d);
  for (int a = 0; a < d; ++a) {
    const double root = std::sqrt(std::max(0.0, e.values(a)));
    joint.segment(a * d, d) = root * e.vectors.col(a);
  }
  return joint / joint.norm();
}

namespace {

// Rows indexed by A, columns by B.
ComplexMatrix as_matrix(const StateVector& joint, int dim_b) {
  const auto dim_a = joint.size() / dim_b;
  ComplexMatrix m(dim_a, dim_b);
  for (Eigen::Index a = 0; a < dim_a; ++a) m.row(a) = joint.segment(a * dim_b, dim_b).transpose();
  return m;
}

}  // namespace

ComplexMatrix reduced_state_b(const StateVector& joint, int dim_b) {
  const ComplexMatrix m = as_matrix(joint, dim_b);
  return m.transpose() * m.conjugate();
}

SteeringMeasurement steering_measurement(const StateVector& purification, int dim_b,
                                         const Ensemble& target) {
  if (dim_b <= 0 || purification.size() == 0 || purification.size() % dim_b != 0) {
    throw Error(ErrorCode::NotAPurification, "joint vector length is not a multiple of dim_b");
  }
  if (std::abs(purification.norm() - 1.0) > 1e-8) {
    throw Error(ErrorCode::NotAPurification, "joint vector is not normalised");
  }
  if (target.size() == 0 || target.atoms.front().size() != dim_b) {
    throw Error(ErrorCode::IncompatibleEnsemble, "ensemble atoms do not live on B");
  }
  const ComplexMatrix rho_b = reduced_state_b(purification, dim_b);
  const double mismatch = (rho_b - target.average()).norm();
  if (mismatch > 1e-8) {
    std::ostringstream os;
    os << "ensemble average differs from the reduced state by " << mismatch;
    throw Error(ErrorCode::IncompatibleEnsemble, os.str());
  }

  // With B = M^T (dim_b x dim_a), outcome operator E yields B E^T B^dag on B.
  // Choosing E_i^T = f_i f_i^dag with B f_i = sqrt(w_i) psi_i gives the atoms.
  const ComplexMatrix bmap = as_matrix(purification, dim_b).transpose();
  const auto dim_a = bmap.cols();
  Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(bmap);
  const ComplexMatrix pinv = cod.pseudoInverse();

  SteeringMeasurement out;
  ComplexMatrix total = ComplexMatrix::Zero(dim_a, dim_a);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const StateVector f = pinv * (std::sqrt(target.weights(i)) * target.atoms[i]);
    const StateVector fc = f.conjugate();
    out.operators.push_back(fc * fc.adjoint());
    total += out.operators.back();
  }
  // Complete to the identity on the part of A that B never sees.
  const ComplexMatrix rest = ComplexMatrix::Identity(dim_a, dim_a) - total;
  out.operators.front() += (rest + rest.adjoint()) / 2.0;
  return out;
}

std::vector<ComplexMatrix> steered_states(const StateVector& purification, int dim_b,
                                          const SteeringMeasurement& measurement) {
  const ComplexMatrix bmap = as_matrix(purification, dim_b).transpose();
  std::vector<ComplexMatrix> out;
  for (const auto& e : measurement.operators) {
    out.push_back(bmap * e.transpose() * bmap.adjoint());
  }
  return out;
}

ProtocolEstimate simulate_protocol(const DensityMatrix& rho, const Ensemble& target, int m,
                                   long shots, std::uint64_t seed) {
  if (shots <= 0) throw Error(ErrorCode::IllPosed, "shots must be positive");
  const double mismatch = reconstruction_residual(target, rho);
  if (mismatch > 1e-8) {
    std::ostringstream os;
    os << "ensemble does not reconstruct the state (residual " << mismatch << ")";
    throw Error(ErrorCode::IncompatibleEnsemble, os.str());
  }
  std::vector<double> scores(target.size());
  std::vector<double> cumulative(target.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    scores[i] = pure_distillation_fidelity(target.atoms[i], m);
    acc += target.weights(i);
    cumulative[i] = acc;
  }
  cumulative.back() = INFINITY;

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  double mean = 0.0, m2 = 0.0;
  for (long s = 1; s <= shots; ++s) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    const auto idx = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    const double x = scores[idx];
    const double delta = x - mean;
    mean += delta / double(s);
    m2 += delta * (x - mean);
  }
  ProtocolEstimate out;
  out.mean_fidelity = mean;
  out.stderr = shots > 1 ? std::sqrt(m2 / double(shots - 1) / double(shots)) : 0.0;
  return out;
}

}  // namespace cohdist
