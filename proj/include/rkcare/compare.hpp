#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "rkcare/projector.hpp"

namespace rkcare {

struct CompareEntry {
  ProjectorChoice choice;
  ConvergenceHistory history;
  bool converged = false;
  bool failed = false;       // aborted by a per-choice error
  std::string failure;
};

struct CompareResult {
  Brad brad;  // the shared decomposition
  std::vector<CompareEntry> entries;
};

inline unsigned worker_thread_cap() {
  if (const char* env = std::getenv("RICCATI_RK_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Prefix of the shared BRAD after j blocks (copies the small blocks; V is a
// column slice).
inline Brad brad_prefix(const Brad& brad, Eigen::Index j) {
  const Eigen::Index p = brad.p;
  Brad out;
  out.p = p;
  out.j = j;
  out.R0 = brad.R0;
  out.V = brad.V.leftCols((j + 1) * p);
  out.K = brad.K.topLeftCorner((j + 1) * p, j * p);
  out.H = brad.H.topLeftCorner((j + 1) * p, j * p);
  out.poles.assign(brad.poles.begin(), brad.poles.begin() + j);
  return out;
}

// Runs every choice against one shared BRAD (built once over all shifts).
inline CompareResult compare_choices(const CareProblem& problem, const ShiftSequence& shifts,
                                     const std::vector<ProjectorChoice>& choices,
                                     const RunOptions& options = {}) {
  if (!problem.validated) throw Error("compare_choices: problem must be validated");
  const double denom = residual_denominator(problem);

  CompareResult result;
  Brad brad = brad_init(problem);
  const std::size_t budget = std::min<std::size_t>(shifts.size(), options.max_blocks);
  for (std::size_t step = 0; step < budget; ++step) {
    try {
      brad = extend(brad, problem, shifts[step]);
    } catch (const ShiftHitsSpectrum& e) {
      std::cerr << "warning: " << e.what() << "; skipping shift\n";
    } catch (const Breakdown&) {
      break;
    }
  }
  result.brad = brad;
  const Matrix VtB = brad.V.adjoint() * problem.B;

  result.entries.resize(choices.size());
  auto run_choice = [&](std::size_t idx) {
    CompareEntry& entry = result.entries[idx];
    entry.choice = choices[idx];
    try {
      for (Eigen::Index j = 1; j <= brad.j; ++j) {
        const auto t0 = std::chrono::steady_clock::now();
        Brad pre = brad_prefix(brad, j);
        if (options.orthonormalize) pre = orthonormalize_K(pre);
        StepRecord rec;
        rec.j = j;
        rec.dim = j * brad.p;
        const Matrix L = build_L(pre, choices[idx]);
        ProjectedCare projected =
            project_small(pre.K, pre.H, L, pre.ctilde(), VtB.topRows((j + 1) * brad.p));
        rec.cond_LtK = projected.cond_LtK;
        Matrix Y;
        try {
          Y = solve_care_dense(projected.Aj, projected.Bj, projected.Cj).Y;
        } catch (const NoStabilizingSolution&) {
          rec.solve_failed = true;
          entry.history.push_back(rec);
          continue;
        }
        const double res = problem.E
                               ? residual_norm_generalized(pre, L, Y, *problem.E, options.norm)
                               : residual_norm(pre, L, Y, options.norm);
        rec.rel_residual = res / denom;
        if (options.truncate) {
          try {
            TruncatedSolution trunc = truncate(pre, Y, TruncationPolicy{options.trunc_threshold});
            const double tres =
                problem.E
                    ? truncated_residual_norm_generalized(pre, trunc, *problem.E, options.norm)
                    : truncated_residual_norm(pre, trunc, options.norm);
            rec.trunc_rank = trunc.r;
            rec.trunc_rel_residual = tres / denom;
          } catch (const AllTruncated&) {
          }
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        entry.history.push_back(rec);
        if (rec.rel_residual <= options.tol) {
          entry.converged = true;
          break;
        }
      }
    } catch (const Error& e) {
      entry.failed = true;
      entry.failure = e.what();
    }
  };

  const unsigned cap = worker_thread_cap();
  if (cap <= 1 || choices.size() <= 1) {
    for (std::size_t i = 0; i < choices.size(); ++i) run_choice(i);
  } else {
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < choices.size(); ++i) workers.emplace_back(run_choice, i);
    for (auto& w : workers) w.join();
  }
  return result;
}

}  // namespace rkcare
