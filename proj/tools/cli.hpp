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

#include <iosfwd>
#include <string>
#include <vector>

#include "cohdist/distill.hpp"

namespace cohdist::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSelftest = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitCapacity = 3;
inline constexpr int kExitNumerical = 4;

// Largest dimension for which `fidelity` and `rate` also run the fidelity SDP.
inline constexpr int kSdpDimLimit = 16;

int exit_code_for(ErrorCode code);

struct StateFile {
  DensityMatrix rho;
  Exactness declared;
};

/// {"dim": d, "entries": [[[re, im], ...], ...], "declared_base": {"dim_sigma": k,
/// "copies": n}, "renormalize": false}. The last two keys are optional.
StateFile parse_state_json(const std::string& text);
StateFile read_state_file(const std::string& path);
std::string state_to_json(const DensityMatrix& rho, const Exactness& declared = {});
void write_state_file(const std::string& path, const DensityMatrix& rho,
                      const Exactness& declared = {});

enum class Family { Diag, Offdiag, Depolarized };

const char* family_name(Family f);

/// diag:        p|0><0| + (1-p)|1><1|
/// offdiag:     [[p, p(1-p)], [p(1-p), 1-p]]
/// depolarized: p Psi_2 + (1-p) 1/2
DensityMatrix family_state(Family f, double p);

struct CurveSpec {
  std::vector<Family> families{Family::Diag, Family::Offdiag, Family::Depolarized};
  std::vector<double> p_grid;
  std::vector<int> copies{1, 2, 3, 4};
  int m = 2;
};

/// p_grid 0, 0.01, ..., 1 and the defaults above.
CurveSpec default_curve_spec();

/// {"families": ["diag", ...], "p_grid": [...], "copies": [...], "m": 2}; every
/// key is optional and falls back to default_curve_spec().
CurveSpec parse_curve_spec(const std::string& text);

struct CurveRow {
  Family family;
  double p;
  int n;
  int m;
  double fidelity;
};

/// Rows sorted by family (panel order), then n, then p.
std::vector<CurveRow> compute_curves(const CurveSpec& spec);

/// Header `family,p,n,m,F_assisted`, values printed with 17 significant digits.
std::string curves_csv(const std::vector<CurveRow>& rows);

/// Runs the command line; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cohdist::cli
