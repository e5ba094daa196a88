#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rkcare/brad.hpp"
#include "rkcare/dense_care.hpp"
#include "rkcare/errors.hpp"
#include "rkcare/kernels.hpp"
#include "rkcare/problem.hpp"
#include "rkcare/residual.hpp"
#include "rkcare/types.hpp"

namespace rkcare {

// Ordered pole sequence s_1, ..., s_J driving the subspace growth.
class ShiftSequence {
 public:
  static ShiftSequence from_list(const std::vector<Complex>& values, bool allow_repeats = false) {
    if (values.empty()) throw EmptyList("shift list is empty");
    for (const Complex& s : values)
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw InfiniteShift("shifts must be finite");
    if (!allow_repeats) {
      for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t k = i + 1; k < values.size(); ++k)
          if (std::abs(values[i] - values[k]) <= 1e-14 * std::abs(values[i]))
            throw Error("repeated shift (pass allow_repeats to permit)");
    }
    ShiftSequence seq;
    seq.values_ = values;
    seq.conjugate_closed_ = compute_closure(values);
    return seq;
  }

  const std::vector<Complex>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  Complex operator[](std::size_t i) const { return values_[i]; }
  bool conjugate_closed() const { return conjugate_closed_; }

 private:
  static bool compute_closure(const std::vector<Complex>& v) {
    std::vector<bool> used(v.size(), false);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (used[i] || v[i].imag() == 0.0) continue;
      bool found = false;
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k == i || used[k]) continue;
        if (std::abs(v[k] - std::conj(v[i])) <= 1e-12 * std::max(1.0, std::abs(v[i]))) {
          used[i] = used[k] = true;
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

  std::vector<Complex> values_;
  bool conjugate_closed_ = false;
};

namespace shifts_detail {

// |Rayleigh quotient| of the dominant eigenvalue of op (a matrix action),
// simple power iteration with a seeded start vector.
template <typename Op>
inline bool power_estimate(Eigen::Index n, const Op& op, unsigned seed, double& out) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(dist(rng), dist(rng));
  v.normalize();
  double prev = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector w = op(v);
    const double nw = w.norm();
    if (!(nw > 0.0) || !std::isfinite(nw)) return false;
    const Complex rayleigh = v.dot(w);  // v^H w
    const double est = std::abs(rayleigh.real()) > 0 ? std::abs(rayleigh.real()) : std::abs(rayleigh);
    v = w / nw;
    if (it > 4 && std::abs(est - prev) <= 1e-8 * std::max(est, 1e-300)) {
      out = est;
      return true;
    }
    prev = est;
  }
  out = prev;
  return prev > 0.0;  // accept the last estimate; spacing only needs the scale
}

// Relative Galerkin residual of the subspace carried by brad; the score the
// pole search minimizes. K is orthonormalized so K^H L = I and the reduced
// matrices collapse to plain products.
inline double galerkin_score(const CareProblem& problem, const Brad& brad, const Matrix& VtB,
                             double denom) {
  const Brad ob = orthonormalize_K(brad);
  const Matrix Aj = ob.H.adjoint() * ob.K;
  const Matrix Bj = ob.K.adjoint() * VtB;
  const Matrix Cj = ob.ctilde().adjoint() * ob.K;
  const Matrix Y = solve_care_dense(Aj, Bj, Cj).Y;
  const double res = problem.E ? residual_norm_generalized(ob, ob.K, Y, *problem.E)
                               : residual_norm(ob, ob.K, Y);
  return res / denom;
}

struct PoleSearchState {
  Brad brad;
  Matrix VtB;
};

inline PoleSearchState advance(const CareProblem& problem, const PoleSearchState& state,
                               const ShiftedFactorization& fact) {
  PoleSearchState out;
  out.brad = extend(state.brad, problem, fact);
  out.VtB = state.VtB;
  out.VtB.conservativeResize(out.brad.V.cols(), Eigen::NoChange);
  out.VtB.bottomRows(out.brad.p) = out.brad.V.rightCols(out.brad.p).adjoint() * problem.B;
  return out;
}

// Greedy pole selection with a coordinate-descent polish, scored by the
// measured Galerkin residual. Candidate poles live on a fixed log grid over
// the mirrored spectral estimates; their factorizations are built once and
// reused. Returns false when the search cannot run to completion (tiny
// problems that saturate the space, unvalidated input, failed reduced
// solves); the caller then falls back to the plain log-spaced sequence.
inline bool greedy_shifts(const CareProblem& problem, std::size_t count, double small, double big,
                          std::vector<Complex>& result) {
  if (!problem.validated) return false;
  const double denom = (problem.C * problem.C.adjoint()).norm();
  if (!(denom > 0.0)) return false;

  constexpr int kGrid = 24;
  std::vector<Complex> cand;
  std::vector<ShiftedFactorization> fact;
  const double lo = std::log(0.5 * small), hi = std::log(2.0 * big);
  for (int g = 0; g < kGrid; ++g) {
    const Complex s(std::exp(lo + (hi - lo) * g / (kGrid - 1.0)), 0.0);
    try {
      fact.push_back(make_shifted_factorization(problem.A, problem.E, s));
      cand.push_back(s);
    } catch (const Error&) {
    }
  }
  if (cand.empty()) return false;
  const std::size_t nc = cand.size();

  PoleSearchState state;
  try {
    state.brad = brad_init(problem);
  } catch (const Error&) {
    return false;
  }
  state.VtB = state.brad.V.adjoint() * problem.B;
  const PoleSearchState initial = state;

  // one-step lookahead: take the candidate whose extension has the smallest
  // measured residual
  std::vector<std::size_t> picks;
  double current = std::numeric_limits<double>::infinity();
  for (std::size_t step = 0; step < count; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = nc;
    PoleSearchState best_state;
    for (std::size_t i = 0; i < nc; ++i) {
      try {
        PoleSearchState trial = advance(problem, state, fact[i]);
        const double rel = galerkin_score(problem, trial.brad, trial.VtB, denom);
        if (rel < best) {
          best = rel;
          best_i = i;
          best_state = std::move(trial);
        }
      } catch (const Error&) {
      }
    }
    if (best_i == nc) return false;  // every candidate failed (space saturated)
    picks.push_back(best_i);
    state = std::move(best_state);
    current = best;
  }

  // coordinate descent over the sequence: try every candidate at every
  // position, scored by the final residual of the rebuilt sequence
  const auto rebuild = [&](const PoleSearchState& prefix, const std::vector<std::size_t>& seq,
                           std::size_t from) -> double {
    PoleSearchState s = prefix;
    for (std::size_t k = from; k < seq.size(); ++k) s = advance(problem, s, fact[seq[k]]);
    return galerkin_score(problem, s.brad, s.VtB, denom);
  };
  constexpr int kSweeps = 3;
  for (int sweep = 0; sweep < kSweeps && current > 1e-13; ++sweep) {
    const double at_entry = current;
    PoleSearchState prefix = initial;
    for (std::size_t pos = 0; pos < picks.size(); ++pos) {
      std::size_t best_i = picks[pos];
      for (std::size_t i = 0; i < nc; ++i) {
        if (i == picks[pos]) continue;
        std::vector<std::size_t> trial = picks;
        trial[pos] = i;
        try {
          const double rel = rebuild(prefix, trial, pos);
          if (rel < current) {
            current = rel;
            best_i = i;
          }
        } catch (const Error&) {
        }
      }
      picks[pos] = best_i;
      prefix = advance(problem, prefix, fact[picks[pos]]);
    }
    if (current > 0.95 * at_entry) break;  // converged; further sweeps won't pay
  }

  result.resize(count);
  for (std::size_t k = 0; k < count; ++k) result[k] = cand[picks[k]];
  return true;
}

}  // namespace shifts_detail

// J real shifts in the right half-plane, mirroring the spectral estimates of
// Lambda(A, E). For a stable pencil the mirrored points are the classical
// ADI-style resolvent locations: they keep every shifted factorization
// A^H - s E^H away from the spectrum and give geometric convergence, whereas
// points on the spectrum side stall. The poles are picked greedily from a
// log grid between the estimated edges by minimizing the measured Galerkin
// residual and polished by coordinate descent; when that search cannot run
// (the problem saturates in fewer than J blocks, or a reduced solve fails)
// the plain log-spaced grid is returned instead. Deterministic for a fixed
// seed. Falls back to [1, 1e6] with a warning when the spectral estimates
// fail.
inline ShiftSequence heuristic_shifts(const CareProblem& problem, std::size_t count,
                                      unsigned seed = 12345) {
  if (count < 1) throw EmptyList("heuristic_shifts: count must be >= 1");
  const Eigen::Index n = problem.A.rows();

  double big = 0.0, small = 0.0;
  bool ok = true;
  try {
    std::optional<SparseSolver> elu;
    if (problem.E) {
      elu.emplace(*problem.E);
      if (!elu->ok()) throw SingularE("E singular");
    }
    // largest |Re lambda|: power iteration on E^{-1} A
    ok = shifts_detail::power_estimate(
        n,
        [&](const Vector& v) -> Vector {
          Vector w = problem.A * v;
          if (elu) w = elu->solve(w);
          return w;
        },
        seed, big);
    // smallest |Re lambda|: power iteration on A^{-1} E
    SparseSolver alu(problem.A);
    if (!alu.ok()) ok = false;
    if (ok) {
      double inv = 0.0;
      ok = shifts_detail::power_estimate(
          n,
          [&](const Vector& v) -> Vector {
            Vector w = problem.E ? Vector(*problem.E * v) : v;
            return Vector(alu.solve(w));
          },
          seed + 1, inv);
      if (ok && inv > 0.0) small = 1.0 / inv;
      else ok = false;
    }
  } catch (const Error&) {
    ok = false;
  }
  if (!ok || !(big > 0.0) || !(small > 0.0)) {
    std::cerr << "warning: heuristic_shifts spectral estimate failed; "
                 "falling back to [1, 1e6]\n";
    small = 1.0;
    big = 1e6;
  }
  if (small > big) std::swap(small, big);

  std::vector<Complex> out(count);
  if (ok && shifts_detail::greedy_shifts(problem, count, small, big, out))
    return ShiftSequence::from_list(out, /*allow_repeats=*/true);

  if (count == 1) {
    out[0] = Complex(std::sqrt(small * big), 0.0);
  } else {
    const double la = std::log(small), lb = std::log(big);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(count - 1);
      out[i] = Complex(std::exp(la + t * (lb - la)), 0.0);
    }
  }
  return ShiftSequence::from_list(out, /*allow_repeats=*/true);
}

// Shift file: one "re [im]" pair per line, or a JSON array of numbers /
// [re, im] pairs.
inline ShiftSequence load_shifts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open shift file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  std::vector<Complex> values;
  if (first != std::string::npos && text[first] == '[') {
    nlohmann::json j = nlohmann::json::parse(text);
    for (const auto& e : j) {
      if (e.is_number())
        values.emplace_back(e.get<double>(), 0.0);
      else if (e.is_array() && e.size() == 2)
        values.emplace_back(e[0].get<double>(), e[1].get<double>());
      else
        throw ParseError("shift JSON entries must be numbers or [re, im] pairs");
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      std::istringstream ss(line);
      double re = 0, im = 0;
      if (!(ss >> re)) continue;  // blank line
      ss >> im;
      values.emplace_back(re, im);
    }
  }
  return ShiftSequence::from_list(values, /*allow_repeats=*/true);
}

}  // namespace rkcare
