#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mclp/io.hpp"

using namespace mclp;

namespace {

constexpr int kParseError = 64;
constexpr int kDataError = 65;
constexpr int kSubproblem = 70;
constexpr int kRestartExhausted = 71;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << text;
}

ProblemFile read_problem(const std::string& path) {
  try {
    return parse_problem(slurp(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

int status_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return 0;
    case SolveStatus::Infeasible: return 1;
    case SolveStatus::Unbounded: return 2;
    case SolveStatus::SubproblemRequired: return kSubproblem;
    case SolveStatus::RestartExhausted: return kRestartExhausted;
  }
  return 1;
}

int cmd_check(const std::string& file) {
  ProblemFile p = read_problem(file);
  validate(p.data, p.rho);
  Feasibility f = feasibility_check(p.data, p.rho);
  std::cout << to_string(f) << "\n";
  return static_cast<int>(f);
}

struct SolveFlags {
  std::string initial, trace, csv, svg;
  size_t samples = 0;
  size_t max_insert = 1;
};

int cmd_solve(const std::string& file, const SolveFlags& fl) {
  ProblemFile p = read_problem(file);
  validate(p.data, p.rho);
  SolveOptions opts;
  opts.max_insert = fl.max_insert;
  opts.initial = p.initial;
  if (!fl.initial.empty()) opts.initial = parse_params_file(slurp(fl.initial), p.data.K, p.data.J);
  SolveResult res = solve(p.data, p.rho, opts);
  std::cout << format_report(p.data, res);
  if (!fl.trace.empty()) spit(fl.trace, write_trace(res.trace));
  if (res.status == SolveStatus::Optimal) {
    if (!fl.csv.empty()) spit(fl.csv, write_csv(p.data, sample_solution(p.data, res, fl.samples)));
    if (!fl.svg.empty()) spit(fl.svg, write_svg(p.data, res));
  }
  return status_code(res.status);
}

int cmd_oracle(const std::string& file, size_t steps, bool breakpoints) {
  ProblemFile p = read_problem(file);
  validate(p.data, p.rho);
  RatVector grid;
  if (breakpoints) {
    SolveOptions opts;
    opts.initial = p.initial;
    SolveResult res = solve(p.data, p.rho, opts);
    if (res.status != SolveStatus::Optimal) {
      std::cout << "structural solve: " << to_string(res.status) << "\n";
      return status_code(res.status);
    }
    grid = breakpoint_grid(res);
  } else {
    grid = uniform_grid(p.rho.T, steps);
  }
  OracleResult r = oracle(p.data, p.rho, grid);
  switch (r.status) {
    case LpStatus::Optimal: std::cout << r.objective << "\n"; return 0;
    case LpStatus::Infeasible: std::cout << "infeasible discretization\n"; return 1;
    case LpStatus::Unbounded: std::cout << "unbounded discretization\n"; return 2;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact parametric simplex solver for continuous linear programs"};
  app.require_subcommand(1);

  std::string file;
  auto* check = app.add_subcommand("check", "Feasibility verdict (exit 0 both feasible, 1 primal infeasible, "
                                             "2 dual infeasible, 3 both infeasible)");
  check->add_option("file", file, "Problem file")->required();

  SolveFlags fl;
  auto* solve_cmd = app.add_subcommand("solve", "Solve and print the optimal solution");
  solve_cmd->add_option("file", file, "Problem file")->required();
  solve_cmd->add_option("--initial", fl.initial, "File with the starting boundary parameters");
  solve_cmd->add_option("--trace", fl.trace, "Write the iteration trace");
  solve_cmd->add_option("--csv", fl.csv, "Write sampled trajectories as CSV");
  solve_cmd->add_option("--svg", fl.svg, "Write an SVG plot of the trajectories");
  solve_cmd->add_option("--samples", fl.samples, "Uniform sample intervals in the CSV (0 keeps only breakpoints)");
  solve_cmd->add_option("--max-insert", fl.max_insert, "Longest chain of bases tried by an insertion")
      ->check(CLI::Range(1, 4));

  size_t steps = 1;
  bool breakpoints = false;
  auto* oracle_cmd = app.add_subcommand("oracle", "Objective of the time-discretized problem");
  oracle_cmd->add_option("file", file, "Problem file")->required();
  oracle_cmd->add_option("--steps", steps, "Uniform grid intervals")->check(CLI::PositiveNumber);
  oracle_cmd->add_flag("--breakpoints", breakpoints, "Use the breakpoints of the structural solution as the grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kParseError;
  }

  try {
    if (*check) return cmd_check(file);
    if (*solve_cmd) return cmd_solve(file, fl);
    if (*oracle_cmd) return cmd_oracle(file, steps, breakpoints);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const DegeneracyError& e) {
    std::cerr << "degenerate data: " << e.what() << "\n";
    return kDataError;
  } catch (const SignError& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSubproblem;
  }
  return 0;
}
