#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mclp/pivots.hpp"

namespace mclp {

struct IterationRecord {
  size_t ell = 0;
  size_t line = 0;  // index of the parametric line (increments on restart)
  Rational theta;
  std::optional<Rational> theta_bar;  // nullopt means the region extends to infinity
  BaseSequence seq;
  std::optional<CollisionKind> vkind, wkind;
  PivotKind pivot = PivotKind::None;
  std::vector<std::string> shrinking;
  Rational objective;  // primal value at min(theta_bar, 1)
  std::optional<BoundaryDictionary> dict;
  std::optional<Rational> ratio;
  std::string note;

  friend bool operator==(const IterationRecord& a, const IterationRecord& b);
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, SubproblemRequired, RestartExhausted };
const char* to_string(SolveStatus s);

struct SolveOptions {
  std::optional<BoundaryParams> initial;
  size_t max_insert = 1;
  size_t max_iterations = 100000;
  size_t max_restarts = 32;
  size_t restart_halvings = 64;
  size_t restart_directions = 8;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Optimal;
  Feasibility feasibility = Feasibility::BothFeasible;
  BaseSequence seq;
  std::vector<RatesSolution> rates;
  SolutionH H;
  BoundaryParams goal;
  std::vector<IterationRecord> trace;
  std::vector<ParamLine> lines;  // lines[r] is the line of records with line == r
  size_t restarts = 0;
  std::string message;
};

// Strict inequalities for a single-interval optimal start.
bool satisfies_initial_conditions(const ProblemData& data, const BoundaryParams& rho0);
BoundaryParams choose_initial(const ProblemData& data, const BoundaryParams& goal);

struct InitialSolution {
  BaseSequence seq;
  SolutionH H;
};
InitialSolution initial_solution(const ProblemData& data, const BoundaryParams& rho0);

class RestartExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// New parametric line from a perturbed interior point of seq's region to the current goal.
ParamLine restart(const ProblemData& data, const ParamLine& line, const Rational& theta, const Rational& theta_bar,
                  const BaseSequence& seq, const SolveOptions& opts = {});

SolveResult solve(const ProblemData& data, const BoundaryParams& goal, const SolveOptions& opts = {});

// Bound on the number of validity regions along a line: C(4(K+J), 2(K+J)) * 2^C(K+J, K).
mpz_class iteration_bound(size_t K, size_t J);

}  // namespace mclp
