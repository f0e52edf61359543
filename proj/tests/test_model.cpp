#include <random>

#include "doctest.h"
#include "fixtures.hpp"

using namespace mclp;
using namespace fixtures;

TEST_CASE("validation") {
  ProblemData d = example_data();
  CHECK_NOTHROW(validate(d, example_goal()));

  ProblemData col = d;
  col.b = {d.A(0, 0), d.A(1, 0)};
  CHECK_THROWS_AS(validate(col, example_goal()), DegeneracyError);

  BoundaryParams bad = example_goal();
  bad.lambda[0] = 1;
  CHECK_THROWS_AS(validate(d, bad), SignError);
  bad = example_goal();
  bad.T = 0;
  CHECK_THROWS_AS(validate(d, bad), SignError);
}

TEST_CASE("perturbation reaches general position") {
  ProblemData d = example_data();
  ProblemData col = d;
  col.b = {d.A(0, 0), d.A(1, 0)};
  for (const Rational& eps : {R(1, 10), R(1, 100), R(1, 1000)}) {
    for (const ProblemData& in : {d, col}) {
      ProblemData p = perturb(in, eps);
      CHECK_NOTHROW(check_nondegenerate(p));
      for (size_t k = 0; k < 2; ++k) CHECK((p.b[k] - in.b[k]).abs() <= eps);
      for (size_t j = 0; j < 2; ++j) CHECK((p.c[j] - in.c[j]).abs() <= eps);
    }
  }
  CHECK_THROWS_AS(perturb(d, 0), std::invalid_argument);
}

TEST_CASE("feasibility classification") {
  CHECK(feasibility_check(example_data(), example_goal()) == Feasibility::BothFeasible);
  CHECK(feasibility_check(example_data(), example_start()) == Feasibility::BothFeasible);

  // x(0) = beta - U(0) = -1 - U(0) < 0 for every U(0) >= 0.
  ProblemData one;
  one.K = one.J = 1;
  one.A = RatMatrix{{1}};
  one.b = {1};
  one.c = {1};
  BoundaryParams rho{{-1}, {-1}, 1, {0}, {0}};
  CHECK_FALSE(primal_feasible(one, rho));
  Feasibility f = feasibility_check(one, rho);
  CHECK((f == Feasibility::PrimalInfeasible || f == Feasibility::BothInfeasible));
}

TEST_CASE("parametric line is affine") {
  ParamLine line{example_start(), example_goal()};
  CHECK(line.at(0) == example_start());
  CHECK(line.at(1) == example_goal());
  std::mt19937 g(9);
  std::uniform_int_distribution<int> v(-20, 20), w(1, 17);
  for (int t = 0; t < 50; ++t) {
    Rational a(v(g), w(g)), b(v(g), w(g));
    CHECK(line.at((a + b) / 2) == R(1, 2) * (line.at(a) + line.at(b)));
  }
}
