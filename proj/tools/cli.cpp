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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cohdist/dnorm.hpp"

namespace cohdist::cli {

using nlohmann::json;

namespace {

Error parse_error(const std::string& what) { return Error(ErrorCode::ParseError, what); }

std::string sig6(double x) {
  if (std::isnan(x)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json nullable(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) throw parse_error(where + " is not a number");
  return j.get<double>();
}

// Expanded state plus what is known about its tensor structure.
struct Expanded {
  DensityMatrix rho;
  Exactness declared;
};

Expanded expand(const StateFile& sf, int copies, long cap) {
  if (copies < 1) throw Error(ErrorCode::DimMismatch, "copies must be at least 1");
  Expanded e{tensor_power(sf.rho, copies, cap), {}};
  if (sf.declared.base_dim > 0) {
    e.declared = {sf.declared.base_dim, sf.declared.copies * copies};
  } else {
    e.declared = {sf.rho.dim(), copies};
  }
  return e;
}

long resolve_cap(std::optional<long> flag) {
  if (flag) {
    if (*flag < 1) throw parse_error("--cap must be positive");
    return *flag;
  }
  if (const char* env = std::getenv("COHDIST_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw parse_error(std::string("COHDIST_CAP is not a positive integer: ") + env);
    }
    return v;
  }
  return default_tolerances().dim_cap;
}

StateFile load_checked(const std::string& path, long cap) {
  StateFile sf = read_state_file(path);
  if (sf.rho.dim() > cap) {
    throw Error(ErrorCode::CapExceeded, "state dimension " + std::to_string(sf.rho.dim()) +
                                            " exceeds cap " + std::to_string(cap));
  }
  return sf;
}

// ---------------------------------------------------------------------------
// Subcommands.

struct Common {
  std::string state_path;
  bool as_json = false;
  std::optional<long> cap;
  std::string dump_path;
};

void maybe_dump(const Common& c, const StateFile& sf) {
  if (!c.dump_path.empty()) write_state_file(c.dump_path, sf.rho, sf.declared);
}

int cmd_fidelity(const Common& c, const std::vector<int>& ms, const std::vector<int>& copies,
                 std::ostream& out) {
  const long cap = resolve_cap(c.cap);
  const StateFile sf = load_checked(c.state_path, cap);
  maybe_dump(c, sf);
  json rows = json::array();
  if (!c.as_json) out << "copies  dim  m  F_bound  F_sdp  exact\n";
  for (int n : copies) {
    const Expanded e = expand(sf, n, cap);
    const RealVector delta = delta_vector(e.rho);
    const bool exact = closed_form_exact(e.rho.dim(), e.declared);
    for (int m : ms) {
      const double bound = assisted_fidelity_bound(delta, m);
      const double sdp = (e.rho.dim() <= kSdpDimLimit && m <= e.rho.dim() && m >= 1)
                             ? assisted_fidelity_sdp(e.rho, m)
                             : NAN;
      if (c.as_json) {
        rows.push_back({{"copies", n}, {"dim", e.rho.dim()}, {"m", m}, {"fidelity_bound", bound},
                        {"fidelity_sdp", nullable(sdp)}, {"exact", exact}});
      } else {
        out << n << "  " << e.rho.dim() << "  " << m << "  " << sig6(bound) << "  " << sig6(sdp)
            << "  " << (exact ? "exact" : "upper-bound") << "\n";
      }
    }
  }
  if (c.as_json) out << json{{"rows", rows}}.dump(2) << "\n";
  return kExitOk;
}

int cmd_rate(const Common& c, const std::vector<double>& epss, const std::vector<int>& copies,
             std::ostream& out) {
  const long cap = resolve_cap(c.cap);
  const StateFile sf = load_checked(c.state_path, cap);
  maybe_dump(c, sf);
  json rows = json::array();
  if (!c.as_json) {
    out << "copies  eps  one_shot_bits  relaxed_bits  zero_error_bits  m  F_bound  F_sdp  exact\n";
  }
  for (int n : copies) {
    const Expanded e = expand(sf, n, cap);
    const ZeroErrorRate z = zero_error_rate(e.rho, e.declared);
    const double per_copy = z.asymptotic_bits_per_copy / n;
    for (double eps : epss) {
      RateOptions opt;
      opt.sdp_fidelity_dim = kSdpDimLimit;
      const RateReport r = one_shot_rate(e.rho, eps, e.declared, opt);
      if (c.as_json) {
        rows.push_back({{"copies", n},
                        {"eps", eps},
                        {"m_requested", r.m_requested},
                        {"fidelity_bound", r.fidelity_bound},
                        {"fidelity_sdp", nullable(r.fidelity_sdp)},
                        {"one_shot_rate_bits", r.one_shot_rate_bits},
                        {"relaxed_rate_bits", r.relaxed_rate_bits},
                        {"zero_error_bits", r.zero_error_bits},
                        {"min_diagonal", r.min_diagonal},
                        {"m_from_fidelity", r.m_from_fidelity},
                        {"asymptotic_zero_error_bits_per_copy", per_copy},
                        {"exact", r.exact_flag}});
      } else {
        out << n << "  " << sig6(eps) << "  " << sig6(r.one_shot_rate_bits) << "  "
            << sig6(r.relaxed_rate_bits) << "  " << sig6(r.zero_error_bits) << "  "
            << r.m_requested << "  " << sig6(r.fidelity_bound) << "  " << sig6(r.fidelity_sdp)
            << "  " << (r.exact_flag ? "exact" : "upper-bound") << "\n";
      }
    }
    if (!c.as_json) {
      out << "asymptotic zero-error rate (copies=" << n << "): " << sig6(per_copy)
          << " bits/copy" << (z.exact ? "" : " (upper bound)") << "\n";
    }
  }
  if (c.as_json) out << json{{"rows", rows}}.dump(2) << "\n";
  return kExitOk;
}

int cmd_decompose(const Common& c, std::ostream& out) {
  const long cap = resolve_cap(c.cap);
  const StateFile sf = load_checked(c.state_path, cap);
  maybe_dump(c, sf);
  const Ensemble e = same_diagonal_decomposition(sf.rho);
  const double rec = reconstruction_residual(e, sf.rho);
  const double dia = diagonal_residual(e, sf.rho);
  if (c.as_json) {
    json atoms = json::array();
    for (const auto& a : e.atoms) {
      json v = json::array();
      for (Eigen::Index i = 0; i < a.size(); ++i) v.push_back({a(i).real(), a(i).imag()});
      atoms.push_back(v);
    }
    std::vector<double> w(e.weights.data(), e.weights.data() + e.weights.size());
    out << json{{"weights", w},
                {"atoms", atoms},
                {"reconstruction_residual", rec},
                {"diagonal_residual", dia}}
               .dump(2)
        << "\n";
    return kExitOk;
  }
  for (std::size_t i = 0; i < e.size(); ++i) {
    out << "atom " << i << "  weight " << sig6(e.weights(i)) << "  [";
    for (Eigen::Index k = 0; k < e.atoms[i].size(); ++k) {
      const Complex z = e.atoms[i](k);
      out << (k ? ", " : "") << sig6(z.real()) << (z.imag() < 0 ? "-" : "+")
          << sig6(std::abs(z.imag())) << "i";
    }
    out << "]\n";
  }
  out << "residual reconstruction " << sig6(rec) << " diagonal " << sig6(dia) << "\n";
  return kExitOk;
}

int cmd_figure(const std::string& spec_path, const std::string& out_path, std::ostream& out) {
  const CurveSpec spec = spec_path.empty() ? default_curve_spec() : parse_curve_spec(slurp(spec_path));
  const std::string csv = curves_csv(compute_curves(spec));
  if (out_path.empty()) {
    out << csv;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw parse_error("cannot write " + out_path);
    f << csv;
  }
  return kExitOk;
}

DensityMatrix random_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
  ComplexMatrix r = a * a.adjoint();
  r /= r.trace().real();
  return DensityMatrix(r);
}

int cmd_selftest(std::uint64_t seed, std::ostream& out) {
  int failed = 0;
  auto check = [&](const std::string& name, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failed;
  };
  auto diag2 = [](double a) { return DensityMatrix::diagonal((RealVector(2) << a, 1.0 - a).finished()); };

  RealVector v(2);
  v << std::sqrt(3.0) / 2.0, 0.5;
  check("mnorm m=2 equals l1", std::abs(mnorm(v, 2).value - (std::sqrt(3.0) + 1.0) / 2.0) < 1e-12);
  check("maximally mixed qubit m=2", std::abs(assisted_fidelity_bound(DensityMatrix::maximally_mixed(2), 2) - 1.0) < 1e-12);
  check("diag(3/4,1/4) m=2", std::abs(assisted_fidelity_bound(diag2(0.75), 2) - (2.0 + std::sqrt(3.0)) / 4.0) < 1e-12);

  std::mt19937_64 rng(seed);
  const DensityMatrix q2 = random_state(2, rng);
  check("qubit relaxation tight", std::abs(assisted_fidelity_sdp(q2, 2) - assisted_fidelity_bound(q2, 2)) < 1e-6);

  const DensityMatrix cube = tensor_power(diag2(0.6), 3);
  check("zero-error diag(0.6,0.4)^3", zero_error_rate(cube).one_shot_bits == 2.0);
  check("one-shot diag(0.6,0.4)^3", one_shot_rate(cube, 0.0).one_shot_rate_bits == 2.0);

  const DensityMatrix q3 = random_state(3, rng);
  const Ensemble e = same_diagonal_decomposition(q3);
  check("qutrit same-diagonal decomposition",
        reconstruction_residual(e, q3) <= 1e-8 && diagonal_residual(e, q3) <= 1e-8);

  const ProtocolEstimate p = simulate_protocol(q3, e, 2, 20000, seed);
  check("protocol mean", std::abs(p.mean_fidelity - assisted_fidelity_bound(q3, 2)) <= std::max(4.0 * p.stderr, 1e-12));

  const auto rows = compute_curves(default_curve_spec());
  bool anchors = false;
  for (const auto& r : rows) {
    if (r.family == Family::Diag && r.n == 1 && std::abs(r.p - 0.9) < 1e-12) anchors = std::abs(r.fidelity - 0.8) < 1e-9;
  }
  check("figure anchor diag p=0.9", anchors);
  out << (failed ? "selftest failed" : "selftest passed") << "\n";
  return failed ? kExitSelftest : kExitOk;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NonHermitian:
    case ErrorCode::NotPSD:
    case ErrorCode::NotDensityMatrix:
    case ErrorCode::NotDistribution:
    case ErrorCode::DimMismatch:
    case ErrorCode::BadM:
    case ErrorCode::BadEpsilon:
    case ErrorCode::NotAPurification:
    case ErrorCode::IncompatibleEnsemble:
      return kExitInput;
    case ErrorCode::CapExceeded:
    case ErrorCode::DimTooLarge:
      return kExitCapacity;
    case ErrorCode::IllPosed:
    case ErrorCode::NumericalFailure:
    case ErrorCode::ConvergenceFailure:
      return kExitNumerical;
  }
  return kExitNumerical;
}

// ---------------------------------------------------------------------------
// State files.

StateFile parse_state_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw parse_error(std::string("malformed JSON: ") + ex.what());
  }
  if (!j.is_object()) throw parse_error("state file must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw parse_error("missing integer 'dim'");
  const long d = j["dim"].get<long>();
  if (d < 1) throw parse_error("'dim' must be positive");
  if (!j.contains("entries") || !j["entries"].is_array()) throw parse_error("missing array 'entries'");
  const json& rows = j["entries"];
  if (static_cast<long>(rows.size()) != d) throw parse_error("'entries' must have dim rows");
  ComplexMatrix m(d, d);
  for (long r = 0; r < d; ++r) {
    if (!rows[r].is_array() || static_cast<long>(rows[r].size()) != d) {
      throw parse_error("row " + std::to_string(r) + " must have dim entries");
    }
    for (long c = 0; c < d; ++c) {
      const json& z = rows[r][c];
      const std::string where = "entry (" + std::to_string(r) + ", " + std::to_string(c) + ")";
      if (!z.is_array() || z.size() != 2) throw parse_error(where + " must be a [re, im] pair");
      m(r, c) = Complex(number_at(z[0], where), number_at(z[1], where));
    }
  }
  if (j.value("renormalize", false)) {
    const double t = m.trace().real();
    if (!(t > 0.0)) throw Error(ErrorCode::NotDensityMatrix, "cannot renormalise a matrix with trace <= 0");
    m /= t;
  }
  Tolerances tol;
  tol.hermitian = 1e-9;
  tol.psd = 1e-9;
  tol.trace = 1e-8;
  StateFile sf{DensityMatrix(m, tol), {}};
  if (j.contains("declared_base")) {
    const json& b = j["declared_base"];
    if (!b.is_object() || !b.contains("dim_sigma") || !b.contains("copies") ||
        !b["dim_sigma"].is_number_integer() || !b["copies"].is_number_integer()) {
      throw parse_error("'declared_base' needs integer 'dim_sigma' and 'copies'");
    }
    sf.declared = {b["dim_sigma"].get<int>(), b["copies"].get<int>()};
    long expected = 1;
    for (int i = 0; i < sf.declared.copies && expected <= d; ++i) expected *= sf.declared.base_dim;
    if (sf.declared.base_dim < 1 || sf.declared.copies < 1 || expected != d) {
      throw parse_error("'declared_base' is inconsistent with 'dim'");
    }
  }
  return sf;
}

StateFile read_state_file(const std::string& path) { return parse_state_json(slurp(path)); }

std::string state_to_json(const DensityMatrix& rho, const Exactness& declared) {
  const int d = rho.dim();
  json entries = json::array();
  for (int r = 0; r < d; ++r) {
    json row = json::array();
    for (int c = 0; c < d; ++c) row.push_back({rho(r, c).real(), rho(r, c).imag()});
    entries.push_back(row);
  }
  json j{{"dim", d}, {"entries", entries}};
  if (declared.base_dim > 0) {
    j["declared_base"] = {{"dim_sigma", declared.base_dim}, {"copies", declared.copies}};
  }
  return j.dump(1) + "\n";
}

void write_state_file(const std::string& path, const DensityMatrix& rho, const Exactness& declared) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw parse_error("cannot write " + path);
  f << state_to_json(rho, declared);
}

// ---------------------------------------------------------------------------
// Figure curves.

const char* family_name(Family f) {
  switch (f) {
    case Family::Diag: return "diag";
    case Family::Offdiag: return "offdiag";
    case Family::Depolarized: return "depolarized";
  }
  return "?";
}

DensityMatrix family_state(Family f, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw parse_error("family parameter p must lie in [0, 1]");
  ComplexMatrix m(2, 2);
  switch (f) {
    case Family::Diag:
      m << p, 0.0, 0.0, 1.0 - p;
      break;
    case Family::Offdiag:
      m << p, p * (1.0 - p), p * (1.0 - p), 1.0 - p;
      break;
    case Family::Depolarized:
      m << 0.5, p / 2.0, p / 2.0, 0.5;
      break;
  }
  return DensityMatrix(m);
}

CurveSpec default_curve_spec() {
  CurveSpec s;
  for (int i = 0; i <= 100; ++i) s.p_grid.push_back(i / 100.0);
  return s;
}

CurveSpec parse_curve_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw parse_error(std::string("malformed JSON: ") + ex.what());
  }
  if (!j.is_object()) throw parse_error("curve spec must be a JSON object");
  CurveSpec s = default_curve_spec();
  try {
    if (j.contains("families")) {
      s.families.clear();
      for (const auto& name : j["families"].get<std::vector<std::string>>()) {
        if (name == "diag") s.families.push_back(Family::Diag);
        else if (name == "offdiag") s.families.push_back(Family::Offdiag);
        else if (name == "depolarized") s.families.push_back(Family::Depolarized);
        else throw parse_error("unknown family '" + name + "'");
      }
    }
    if (j.contains("p_grid")) s.p_grid = j["p_grid"].get<std::vector<double>>();
    if (j.contains("copies")) s.copies = j["copies"].get<std::vector<int>>();
    if (j.contains("m")) s.m = j["m"].get<int>();
  } catch (const json::exception& ex) {
    throw parse_error(std::string("bad curve spec: ") + ex.what());
  }
  for (double p : s.p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw parse_error("p_grid values must lie in [0, 1]");
  }
  for (int n : s.copies) {
    if (n < 1 || n > 24) throw parse_error("copies must lie in [1, 24]");
  }
  if (s.m < 1) throw parse_error("m must be at least 1");
  return s;
}

std::vector<CurveRow> compute_curves(const CurveSpec& spec) {
  std::vector<Family> families = spec.families;
  std::sort(families.begin(), families.end());
  families.erase(std::unique(families.begin(), families.end()), families.end());
  std::vector<int> copies = spec.copies;
  std::sort(copies.begin(), copies.end());
  copies.erase(std::unique(copies.begin(), copies.end()), copies.end());
  std::vector<double> grid = spec.p_grid;
  std::sort(grid.begin(), grid.end());

  std::vector<std::future<std::vector<CurveRow>>> jobs;
  for (Family f : families) {
    for (int n : copies) {
      jobs.push_back(std::async(std::launch::async, [&spec, &grid, f, n] {
        std::vector<CurveRow> rows;
        for (double p : grid) {
          const RealVector delta = tensor_power(delta_vector(family_state(f, p)), n);
          rows.push_back({f, p, n, spec.m, assisted_fidelity_bound(delta, spec.m)});
        }
        return rows;
      }));
    }
  }
  std::vector<CurveRow> out;
  for (auto& j : jobs) {
    auto rows = j.get();
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

std::string curves_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream os;
  os << "family,p,n,m,F_assisted\n";
  for (const auto& r : rows) {
    os << family_name(r.family) << "," << full(r.p) << "," << r.n << "," << r.m << ","
       << full(r.fidelity) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Assisted coherence distillation toolkit", "cohdist"};
  app.require_subcommand(1);

  Common common;
  std::vector<int> ms{2};
  std::vector<int> copies{1};
  std::vector<double> epss{0.0};
  std::string spec_path, out_path;
  std::uint64_t seed = 20181;
  long cap_value = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("state", common.state_path, "State file (JSON)")->required();
    sub->add_flag("--json", common.as_json, "Machine-readable output");
    sub->add_option("--cap", cap_value, "Dimension cap (overrides COHDIST_CAP)");
    sub->add_option("--dump-state", common.dump_path, "Write the parsed state to this file");
  };

  auto* fid = app.add_subcommand("fidelity", "Assisted fidelity: closed form and SDP");
  add_common(fid);
  fid->add_option("--m", ms, "Target dimensions, comma separated")->delimiter(',');
  fid->add_option("--copies", copies, "Numbers of copies, comma separated")->delimiter(',');

  auto* rate = app.add_subcommand("rate", "One-shot and zero-error rates");
  add_common(rate);
  rate->add_option("--eps", epss, "Error tolerances, comma separated")->delimiter(',');
  rate->add_option("--copies", copies, "Numbers of copies, comma separated")->delimiter(',');

  auto* dec = app.add_subcommand("decompose", "Same-diagonal pure-state decomposition (d <= 3)");
  add_common(dec);

  auto* fig = app.add_subcommand("figure", "Assisted-fidelity curves as CSV");
  fig->add_option("spec", spec_path, "Curve spec (JSON); defaults to the full grid");
  fig->add_option("--out", out_path, "Output CSV path (stdout when omitted)");

  auto* self = app.add_subcommand("selftest", "Quick numerical self check");
  self->add_option("--seed", seed, "Seed for random states and sampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (fid->count("--cap") + rate->count("--cap") + dec->count("--cap") > 0) {
      common.cap = cap_value;
    }
    if (*fid) return cmd_fidelity(common, ms, copies, out);
    if (*rate) return cmd_rate(common, epss, copies, out);
    if (*dec) return cmd_decompose(common, out);
    if (*fig) return cmd_figure(spec_path, out_path, out);
    if (*self) return cmd_selftest(seed, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}

}  // namespace cohdist::cli
