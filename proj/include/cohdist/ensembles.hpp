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

// Pure-state decompositions rho = sum_i w_i |psi_i><psi_i|: constructive
// same-diagonal decompositions for d <= 3, a general local search over all
// decompositions, the steering measurement that realises a decomposition on
// a purifying system, and a Monte Carlo run of the assisted protocol.

#include <cstdint>
#include <variant>
#include <vector>

#include "cohdist/hermat.hpp"

namespace cohdist {

struct Ensemble {
  RealVector weights;
  std::vector<StateVector> atoms;  // unit vectors

  std::size_t size() const { return atoms.size(); }
  ComplexMatrix average() const;
};

/// ||rho - sum_i w_i psi_i psi_i^dag||_F
double reconstruction_residual(const Ensemble& e, const DensityMatrix& rho);

/// max_i max_j | |psi_i(j)|^2 - rho_jj |
double diagonal_residual(const Ensemble& e, const DensityMatrix& rho);

struct SameDiagonalOptions {
  int grid = 64;                  // alpha/beta grid per axis for the full-rank step
  int max_atoms = 9;
  int restarts = 10;              // grid offsets tried before giving up
  double rank_threshold = 1e-9;   // eigenvalues of the correlation matrix
  double residual_target = 1e-8;
};

/// Decomposition with Delta(psi_i) = Delta(rho) for every atom; d <= 3 only.
/// Throws DimTooLarge for d >= 4 and NumericalFailure if the residual
/// target is missed.
Ensemble same_diagonal_decomposition(const DensityMatrix& rho,
                                     const SameDiagonalOptions& options = {});

struct MaxAvgPureFidelity {
  int m = 2;
};
struct MinMaxInfNormSq {};
struct MaxAvgDiagEntropy {};
using EnsembleObjective = std::variant<MaxAvgPureFidelity, MinMaxInfNormSq, MaxAvgDiagEntropy>;

/// Objective value of an ensemble. Atoms with weight below 1e-12 are ignored.
double evaluate_objective(const Ensemble& e, const EnsembleObjective& objective);

/// True when larger objective values are better.
bool is_maximisation(const EnsembleObjective& objective);

struct SearchOptions {
  int restarts = 20;
  int evaluation_budget = 10000;  // shared across the warm start and all restarts
  std::uint64_t seed = 0x0a55157;
  bool warm_start = true;         // seed with same_diagonal_decomposition when d <= 3
};

struct SearchResult {
  Ensemble ensemble;
  double value = 0.0;
};

/// Local search over decompositions with at most `atoms_cap` atoms. Every
/// candidate is generated from an isometry U (atoms_cap x rank) through
/// sqrt(w_i) psi_i = sum_j U_ij sqrt(lambda_j) e_j, so each one reconstructs
/// rho exactly. The returned value is attained by the returned ensemble: a
/// lower bound for maximisation objectives, an upper bound otherwise.
SearchResult ensemble_search(const DensityMatrix& rho, const EnsembleObjective& objective,
                             int atoms_cap, const SearchOptions& options = {});

struct SteeringMeasurement {
  std::vector<ComplexMatrix> operators;  // POVM on the purifying system
};

/// sum_j sqrt(lambda_j) |j>_A |e_j>_B, with A first in the tensor order.
StateVector canonical_purification(const DensityMatrix& rho);

/// Reduced state on B of a joint vector ordered as index = a * dim_b + b.
ComplexMatrix reduced_state_b(const StateVector& joint, int dim_b);

/// POVM on A whose outcome i leaves B in atom i with probability w_i.
/// Throws NotAPurification for a malformed joint vector and
/// IncompatibleEnsemble when the ensemble average is not the reduced state.
SteeringMeasurement steering_measurement(const StateVector& purification, int dim_b,
                                         const Ensemble& target);

/// Unnormalised post-measurement states of B, Tr_A[(E_i x 1) |Psi><Psi|].
std::vector<ComplexMatrix> steered_states(const StateVector& purification, int dim_b,
                                          const SteeringMeasurement& measurement);

struct ProtocolEstimate {
  double mean_fidelity = 0.0;
  double stderr = 0.0;
};

/// Samples Alice's outcome i ~ w, scores the pure-state distillation fidelity
/// of atom i, and averages over `shots`. Deterministic for a fixed seed.
ProtocolEstimate simulate_protocol(const DensityMatrix& rho, const Ensemble& target, int m,
                                   long shots, std::uint64_t seed);

}  // namespace cohdist
