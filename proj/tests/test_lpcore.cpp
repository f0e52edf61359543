#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mclp/lp.hpp"

using namespace mclp;
using namespace fixtures;

namespace {

LpInstance one_var(Relation rel, const Rational& rhs, SignClass cls, Sense sense = Sense::Max) {
  LpInstance lp;
  lp.objective = {1};
  lp.matrix = RatMatrix{{1}};
  lp.rhs = {rhs};
  lp.relations = {rel};
  lp.classes = {cls};
  lp.sense = sense;
  return lp;
}

// Best vertex of max c.x over x >= 0, Gx <= h by enumerating pairs of tight constraints.
std::optional<Rational> brute_force_2d(const RatVector& c, const RatMatrix& G, const RatVector& h) {
  std::vector<std::pair<RatVector, Rational>> rows;
  for (size_t i = 0; i < G.rows(); ++i) rows.push_back({{G(i, 0), G(i, 1)}, h[i]});
  rows.push_back({{-1, 0}, 0});
  rows.push_back({{0, -1}, 0});
  std::optional<Rational> best;
  for (size_t a = 0; a < rows.size(); ++a)
    for (size_t b = a + 1; b < rows.size(); ++b) {
      RatMatrix M{{rows[a].first[0], rows[a].first[1]}, {rows[b].first[0], rows[b].first[1]}};
      if (determinant(M).is_zero()) continue;
      RatVector x = solve_linear(M, RatVector{rows[a].second, rows[b].second});
      bool ok = true;
      for (const auto& [g, r] : rows) ok = ok && g[0] * x[0] + g[1] * x[1] <= r;
      if (!ok) continue;
      Rational v = c[0] * x[0] + c[1] * x[1];
      if (!best || v > *best) best = v;
    }
  return best;
}

}  // namespace

TEST_CASE("trivial infeasible and unbounded programs") {
  CHECK(solve_lp(one_var(Relation::LE, -1, SignClass::P)).status == LpStatus::Infeasible);
  CHECK(solve_lp(one_var(Relation::GE, 0, SignClass::P)).status == LpStatus::Unbounded);
  LpOutcome u = solve_lp(one_var(Relation::GE, -5, SignClass::U, Sense::Min));
  REQUIRE(u.status == LpStatus::Optimal);
  CHECK(u.objective == -5);
  CHECK(u.primal == RatVector{-5});
}

TEST_CASE("small program with known optimum") {
  LpInstance lp;
  lp.objective = {3, 2};
  lp.matrix = RatMatrix{{1, 1}, {1, 3}, {1, 0}};
  lp.rhs = {4, 6, 3};
  lp.relations.assign(3, Relation::LE);
  lp.classes.assign(2, SignClass::P);
  for (PivotRule rule : {PivotRule::Bland, PivotRule::Dantzig}) {
    LpOutcome o = solve_lp(lp, rule);
    REQUIRE(o.status == LpStatus::Optimal);
    CHECK(o.primal == RatVector{3, 1});
    CHECK(o.objective == 11);
    Rational dual_obj;
    for (size_t i = 0; i < 3; ++i) {
      CHECK(o.dual[i].sign() >= 0);
      dual_obj += o.dual[i] * lp.rhs[i];
    }
    CHECK(dual_obj == 11);
  }
}

TEST_CASE("random two-variable programs match vertex enumeration") {
  std::mt19937 g(3);
  std::uniform_int_distribution<int> v(-6, 6), m(1, 4);
  for (int t = 0; t < 150; ++t) {
    LpInstance lp;
    lp.objective = {v(g), v(g)};
    const size_t rows = static_cast<size_t>(m(g)) + 2;
    lp.matrix = RatMatrix(rows, 2);
    lp.rhs.resize(rows);
    for (size_t i = 0; i + 2 < rows; ++i) {
      lp.matrix(i, 0) = v(g);
      lp.matrix(i, 1) = v(g);
      lp.rhs[i] = v(g);
    }
    // Box keeps the feasible set bounded.
    lp.matrix(rows - 2, 0) = 1;
    lp.rhs[rows - 2] = 10;
    lp.matrix(rows - 1, 1) = 1;
    lp.rhs[rows - 1] = 10;
    lp.relations.assign(rows, Relation::LE);
    lp.classes.assign(2, SignClass::P);
    std::optional<Rational> expect = brute_force_2d(lp.objective, lp.matrix, lp.rhs);
    for (PivotRule rule : {PivotRule::Bland, PivotRule::Dantzig}) {
      LpOutcome o = solve_lp(lp, rule);
      if (!expect) {
        CHECK(o.status == LpStatus::Infeasible);
        continue;
      }
      REQUIRE(o.status == LpStatus::Optimal);
      CHECK(o.objective == *expect);
      Rational dual_obj;
      for (size_t i = 0; i < rows; ++i) dual_obj += o.dual[i] * lp.rhs[i];
      CHECK(dual_obj == *expect);
    }
  }
}

TEST_CASE("basic solutions for a prescribed basis") {
  ProblemData d = example_data();
  LpInstance lp;
  lp.matrix = RatMatrix(2, 4);
  for (size_t k = 0; k < 2; ++k) {
    for (size_t j = 0; j < 2; ++j) lp.matrix(k, j) = d.A(k, j);
    lp.matrix(k, 2 + k) = 1;
  }
  lp.rhs = d.b;
  lp.relations.assign(2, Relation::EQ);
  lp.classes.assign(4, SignClass::P);
  lp.objective = {0, 0, 0, 0};

  CHECK(solve_for_basis(lp, {2, 3}).primal == RatVector{0, 0, 3, 1});
  CHECK(solve_for_basis(lp, {2, 1}).primal == RatVector{0, R(1, 4), R(5, 2), 0});

  LpInstance dep = lp;
  dep.matrix = RatMatrix{{1, 2, 1, 0}, {2, 4, 0, 1}};
  CHECK_THROWS_AS(solve_for_basis(dep, {0, 1}), SingularError);
}
