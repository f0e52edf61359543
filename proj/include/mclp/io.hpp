#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mclp/driver.hpp"
#include "mclp/lp.hpp"

namespace mclp {

struct ProblemFile {
  ProblemData data;
  BoundaryParams rho;
  std::optional<BoundaryParams> initial;
};

// Structured problem document; errors carry "line L, column C" positions.
ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);
BoundaryParams parse_params_file(const std::string& text, size_t K, size_t J);
std::string write_problem(const ProblemFile& p);

BaseSequence parse_sequence(const std::string& text);

std::string write_trace(const std::vector<IterationRecord>& trace);
std::vector<IterationRecord> parse_trace(const std::string& text);

// Solution with zero-length intervals removed.
struct CompactSolution {
  RatVector breakpoints;  // t_0 = 0 < t_1 < ... < t_N = T
  std::vector<RatesBasis> bases;
  std::vector<RatesSolution> rates;
  RatVector u0, uN, p0, pN;
  std::vector<RatVector> x;  // x(t_n), n = 0..N (x(0) after the impulse u0; x(T) = xN)
  std::vector<RatVector> q;  // q at primal time t_n, n = 0..N
  Objectives value;
};

CompactSolution compact(const ProblemData& data, const SolveResult& res);
std::string format_report(const ProblemData& data, const SolveResult& res);

struct SampleRow {
  Rational t;
  Evaluation e;
  bool impulse = false;
};

// samples+1 uniform times (none when samples = 0) merged with all breakpoints.
std::vector<SampleRow> sample_solution(const ProblemData& data, const SolveResult& res, size_t samples);
std::string write_csv(const ProblemData& data, const std::vector<SampleRow>& rows);
std::string write_svg(const ProblemData& data, const SolveResult& res);

struct OracleResult {
  LpStatus status = LpStatus::Infeasible;
  Rational objective;
};

RatVector uniform_grid(const Rational& T, size_t n);
RatVector breakpoint_grid(const SolveResult& res);
// Discretized problem with piecewise-constant rates on the given grid, solved exactly.
OracleResult oracle(const ProblemData& data, const BoundaryParams& rho, const RatVector& grid);

}  // namespace mclp
