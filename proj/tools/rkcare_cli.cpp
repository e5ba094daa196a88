// Command-line driver for the rational Krylov CARE projection solver:
// problem ingestion or generation, solver configuration, and
// machine-readable convergence artifacts.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rkcare/rkcare.hpp"

namespace fs = std::filesystem;
using namespace rkcare;

namespace {

struct Cli {
  std::string problem_manifest;
  std::string fdm_spec;
  std::string shifts_file;
  int heuristic_count = 0;
  std::vector<std::string> l_choices{"K"};
  double tol = 1e-10;
  int max_blocks = 100000;
  bool truncate = false;
  double tau = 1e-12;
  std::string norm = "fro";
  bool mm_out = false;
  bool dense_verify = false;
  std::string out_dir = ".";
  unsigned seed = 12345;
};

FdmSpec parse_fdm(const std::string& text) {
  FdmSpec spec;
  std::istringstream ss(text);
  std::string item;
  int field = 0;
  auto parse_range = [](const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw Error("range must be LO:HI, got '" + s + "'");
    return Interval{std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  };
  while (std::getline(ss, item, ',')) {
    switch (field++) {
      case 0: spec.g = std::stol(item); break;
      case 1: spec.convection_x = std::stod(item); break;
      case 2: spec.convection_y = std::stod(item); break;
      case 3: spec.b_range = parse_range(item); break;
      case 4: spec.c_range = parse_range(item); break;
      default: throw Error("--fdm takes at most G,FX,FY,BRANGE,CRANGE");
    }
  }
  return spec;
}

ProjectorChoice parse_choice(const std::string& text) {
  if (text == "K") return ProjectorChoice::galerkin_k();
  if (text == "H") return ProjectorChoice::petrov_h();
  if (text.rfind("combo:", 0) == 0) {
    const std::string rest = text.substr(6);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw Error("--L combo syntax: combo:ALPHA,BETA");
    return ProjectorChoice::combo(Complex(std::stod(rest.substr(0, comma)), 0.0),
                                  Complex(std::stod(rest.substr(comma + 1)), 0.0));
  }
  throw Error("unknown L choice '" + text + "' (expected K, H, or combo:ALPHA,BETA)");
}

CareProblem load_problem(const Cli& cli) {
  if (!cli.problem_manifest.empty()) return load_problem_manifest(cli.problem_manifest);
  if (!cli.fdm_spec.empty()) return fdm_2d_problem(parse_fdm(cli.fdm_spec));
  throw Error("one of --problem or --fdm is required");
}

ShiftSequence load_shift_sequence(const Cli& cli, const CareProblem& problem) {
  if (!cli.shifts_file.empty()) return load_shifts(cli.shifts_file);
  if (cli.heuristic_count > 0)
    return heuristic_shifts(problem, static_cast<std::size_t>(cli.heuristic_count), cli.seed);
  throw Error("one of --shifts or --heuristic is required");
}

RunOptions make_options(const Cli& cli) {
  RunOptions options;
  options.tol = cli.tol;
  options.max_blocks = static_cast<std::size_t>(cli.max_blocks);
  options.truncate = cli.truncate;
  options.trunc_threshold = cli.tau;
  options.norm = (cli.norm == "2") ? NormChoice::Spectral : NormChoice::Frobenius;
  return options;
}

nlohmann::json config_echo(const Cli& cli) {
  nlohmann::json j;
  j["problem"] = cli.problem_manifest;
  j["fdm"] = cli.fdm_spec;
  j["shifts"] = cli.shifts_file;
  j["heuristic"] = cli.heuristic_count;
  j["L"] = cli.l_choices;
  j["tol"] = cli.tol;
  j["max_blocks"] = cli.max_blocks;
  j["truncate"] = cli.truncate;
  j["tau"] = cli.tau;
  j["norm"] = cli.norm;
  j["mm_out"] = cli.mm_out;
  j["seed"] = cli.seed;
  return j;
}

int cmd_solve(const Cli& cli) {
  CareProblem problem = load_problem(cli);
  if (cli.dense_verify && problem.n > 500) {
    std::cerr << "error: --dense-verify requires n <= 500\n";
    return 1;
  }
  ShiftSequence shifts = load_shift_sequence(cli, problem);
  const ProjectorChoice choice = parse_choice(cli.l_choices.front());
  RunResult result = run(problem, shifts, choice, make_options(cli));

  fs::create_directories(cli.out_dir);
  write_history_json((fs::path(cli.out_dir) / "history.json").string(), result.history,
                     config_echo(cli));
  write_history_csv((fs::path(cli.out_dir) / "history.csv").string(), result.history);

  const Matrix Z = result.solution.Z();
  if (cli.mm_out) {
    write_solution_matrix_market((fs::path(cli.out_dir) / "Z.mtx").string(),
                                 (fs::path(cli.out_dir) / "Y.mtx").string(), Z,
                                 result.solution.Yj);
  } else {
    nlohmann::json meta = config_echo(cli);
    meta["converged"] = result.converged;
    meta["rel_residual"] = result.final_rel_residual;
    write_solution_binary((fs::path(cli.out_dir) / "solution.rks").string(), Z,
                          result.solution.Yj, meta);
  }
  if (result.truncated) {
    const Matrix Zhat = result.solution.brad.V * result.truncated->Qhat;
    Matrix Yhat = result.truncated->Yhat.cast<Complex>().asDiagonal();
    if (cli.mm_out)
      write_solution_matrix_market((fs::path(cli.out_dir) / "Zhat.mtx").string(),
                                   (fs::path(cli.out_dir) / "Yhat.mtx").string(), Zhat, Yhat);
    else
      write_solution_binary((fs::path(cli.out_dir) / "solution_truncated.rks").string(), Zhat,
                            Yhat, {{"rank", result.truncated->r}});
  }

  if (cli.dense_verify) {
    const double dense = dense_residual_oracle(problem, result.solution.dense());
    std::cout << "dense residual: " << dense / residual_denominator(problem) << " (relative)\n";
  }
  std::cout << (result.converged ? "converged" : "shifts exhausted")
            << ", rel_residual = " << result.final_rel_residual << ", steps = "
            << result.history.size() << "\n";
  return result.converged ? 0 : 2;
}

int cmd_compare(const Cli& cli) {
  CareProblem problem = load_problem(cli);
  ShiftSequence shifts = load_shift_sequence(cli, problem);
  std::vector<ProjectorChoice> choices;
  for (const std::string& c : cli.l_choices) choices.push_back(parse_choice(c));
  CompareResult result = compare_choices(problem, shifts, choices, make_options(cli));

  fs::create_directories(cli.out_dir);
  std::ofstream csv((fs::path(cli.out_dir) / "history.csv").string());
  csv << "choice,j,dim,rel_residual,r,trunc_rel_residual,cond_LtK\n";
  nlohmann::json merged;
  merged["schema"] = "rkcare-history-v1";
  merged["config"] = config_echo(cli);
  bool any_failed = false, any_ok = false;
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const CompareEntry& entry = result.entries[i];
    const std::string key = cli.l_choices[i];
    if (entry.failed) {
      any_failed = true;
      std::cerr << "choice " << key << " failed: " << entry.failure << "\n";
    } else {
      any_ok = true;
    }
    merged["curves"][key] = history_to_json(entry.history);
    for (const StepRecord& r : entry.history) {
      csv << key << "," << r.j << "," << r.dim << "," << report_detail::fmt(r.rel_residual)
          << "," << r.trunc_rank << "," << report_detail::fmt(r.trunc_rel_residual) << ","
          << report_detail::fmt(r.cond_LtK) << "\n";
    }
  }
  std::ofstream((fs::path(cli.out_dir) / "history.json").string()) << merged.dump(2) << "\n";
  if (any_failed && any_ok) return 3;
  return any_failed ? 1 : 0;
}

int cmd_generate(const Cli& cli) {
  if (cli.fdm_spec.empty()) throw Error("generate requires --fdm");
  CareProblem problem = fdm_2d_problem(parse_fdm(cli.fdm_spec));
  write_problem(problem, cli.out_dir);
  std::cout << "wrote n = " << problem.n << " problem to " << cli.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational Krylov projection solver for large-scale CAREs"};
  app.require_subcommand(1);
  Cli cli;

  auto add_common = [&](CLI::App* sub, bool needs_shifts) {
    sub->add_option("--problem", cli.problem_manifest, "problem manifest (JSON)");
    sub->add_option("--fdm", cli.fdm_spec, "generator spec G[,FX,FY,BRANGE,CRANGE]");
    if (needs_shifts) {
      sub->add_option("--shifts", cli.shifts_file, "shift file ('re im' lines or JSON array)");
      sub->add_option("--heuristic", cli.heuristic_count, "use J heuristic shifts");
      sub->add_option("--L", cli.l_choices, "projector choice: K, H, or combo:ALPHA,BETA");
      sub->add_option("--tol", cli.tol, "relative residual tolerance");
      sub->add_option("--max-blocks", cli.max_blocks, "maximum subspace blocks");
      sub->add_flag("--truncate", cli.truncate, "truncate the approximate solution");
      sub->add_option("--tau", cli.tau, "truncation threshold (relative)");
      sub->add_option("--norm", cli.norm, "residual norm: fro or 2")
          ->check(CLI::IsMember({"fro", "2"}));
      sub->add_flag("--mm-out", cli.mm_out, "write the solution as Matrix Market files");
      sub->add_flag("--dense-verify", cli.dense_verify, "dense residual check (n <= 500)");
      sub->add_option("--seed", cli.seed, "seed for heuristic shifts");
    }
    sub->add_option("--out", cli.out_dir, "output directory");
  };

  CLI::App* solve = app.add_subcommand("solve", "run the projection method");
  add_common(solve, true);
  CLI::App* compare = app.add_subcommand("compare", "run several L choices on one shared subspace");
  add_common(compare, true);
  CLI::App* generate = app.add_subcommand("generate", "materialize a generated problem to disk");
  add_common(generate, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(cli);
    if (compare->parsed()) return cmd_compare(cli);
    if (generate->parsed()) return cmd_generate(cli);
  } catch (const ShiftsExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
