#pragma once

#include <vector>

#include "mclp/linalg.hpp"

namespace mclp {

enum class SignClass { Z, P, U };
enum class Relation { LE, EQ, GE };
enum class Sense { Max, Min };
enum class LpStatus { Optimal, Infeasible, Unbounded };
enum class PivotRule { Bland, Dantzig };

struct LpInstance {
  RatVector objective;
  RatMatrix matrix;
  RatVector rhs;
  std::vector<Relation> relations;
  std::vector<SignClass> classes;
  Sense sense = Sense::Max;
};

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::vector<size_t> basis;  // structural variable indices, slacks numbered n, n+1, ...
  RatVector primal;           // structural variables only
  RatVector dual;             // one per constraint row
  Rational objective;
  // Infeasible: phase-one dual multipliers (a Farkas-type combination of rows).
  // Unbounded: a primal ray along which the objective improves without bound.
  RatVector certificate;
};

struct BasicValues {
  RatVector primal;  // structural and slack variables in the order of solve_for_basis' columns
  RatVector dual;
};

LpOutcome solve_lp(const LpInstance& inst, PivotRule rule = PivotRule::Bland);

// Basic solution for a prescribed basis over [matrix | slacks]; slacks exist for
// LE/GE rows only and are numbered after the structural columns in row order.
BasicValues solve_for_basis(const LpInstance& inst, const std::vector<size_t>& basis);

}  // namespace mclp
