#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "mclp/driver.hpp"

using namespace mclp;
using namespace fixtures;

TEST_CASE("example run follows the known sequence of bases") {
  SolveResult r = example_run();
  REQUIRE(r.status == SolveStatus::Optimal);
  REQUIRE(r.trace.size() == 4);
  CHECK(r.restarts == 0);
  std::vector<Rational> bars = {R(2, 27), R(9, 29), R(2, 3), 1};
  for (size_t i = 0; i < 4; ++i) {
    REQUIRE(r.trace[i].theta_bar);
    CHECK(*r.trace[i].theta_bar == bars[i]);
    if (i > 0) CHECK(r.trace[i].theta == bars[i - 1]);
  }
  CHECK(to_string(r.trace[1].seq) == "({1,2},{1}) [({1,2},{1,2})] ({1},{1,2})");
  CHECK(to_string(r.trace[2].seq) == "({1},{1}) [({1},{1}) ({1,2},{1,2})] ({1},{1,2})");
  CHECK(to_string(r.trace[3].seq) == "({1},{1}) [({1},{1}) ({1},{2}) ({1,2},{1,2})] ({1},{1,2})");
  CHECK(r.trace[0].vkind == CollisionKind::E);
  CHECK(r.trace[2].vkind == CollisionKind::A);
  CHECK(r.trace[2].pivot == PivotKind::Internal);
  CHECK(r.trace[3].vkind == CollisionKind::MultiplePre);
}

TEST_CASE("example boundary dictionaries") {
  SolveResult r = example_run();
  REQUIRE(r.trace.size() == 4);
  const auto& d1 = r.trace[0].dict;
  REQUIRE(d1);
  CHECK(d1->row_values == RatVector{8, 10, R(421, 54), R(503, 54)});
  CHECK(d1->col_values == RatVector{R(17, 54), 0, R(67, 54), R(25, 27)});
  CHECK(d1->Ahat == RatMatrix{{5, 2, 0, 0}, {3, 4, 0, 0}, {5, 2, 5, 2}, {3, 4, 3, 4}});
  CHECK(compatibility_holds(example_data(), *d1));
  REQUIRE(r.trace[0].ratio);
  CHECK(*r.trace[0].ratio == R(503, 216));

  const auto& d2 = r.trace[1].dict;
  REQUIRE(d2);
  CHECK(d2->Ahat == RatMatrix{{R(7, 2), R(-1, 2), R(-3, 2), -2},
                              {0, -1, -3, -4},
                              {R(7, 2), R(-1, 2), R(7, 2), 0},
                              {R(3, 4), R(1, 4), R(3, 4), 1}});
  CHECK(compatibility_holds(example_data(), *d2));
  REQUIRE(r.trace[1].ratio);
  CHECK(*r.trace[1].ratio == R(5, 29));
}

TEST_CASE("example optimal solution") {
  SolveResult r = example_run();
  REQUIRE(r.status == SolveStatus::Optimal);
  const SolutionH& H = r.H;
  CHECK(H.tau(1) == 1);
  CHECK(H.tau(2) == 1);
  CHECK(H.tau(3) == 0);
  CHECK(H.block(HBlock::U0) == RatVector{0, R(5, 2)});
  CHECK(H.block(HBlock::PN) == RatVector{0, R(5, 3)});
  CHECK(H.block(HBlock::XN) == RatVector{R(41, 6), 0});
  CHECK(H.block(HBlock::QN) == RatVector{0, R(2, 3)});
  CHECK(H.block(HBlock::Q0) == RatVector{R(1, 2), 0});
  CHECK(H.x_at(1) == RatVector{R(11, 2), 0});
  CHECK(r.rates[0].u == RatVector{0, R(1, 4)});
  CHECK(r.rates[1].u == RatVector{R(1, 3), 0});

  Evaluation e1 = evaluate(example_data(), r.seq, r.rates, H, 1);
  CHECK(e1.x == RatVector{R(11, 2), 0});
  Evaluation e2 = evaluate(example_data(), r.seq, r.rates, H, 2);
  CHECK(e2.x == RatVector{R(41, 6), 0});
  Certificate c = certify_optimal(example_data(), r.seq, r.rates, H, example_goal());
  CHECK_MESSAGE(c.ok, c.violation);
}

TEST_CASE("default initial point satisfies the start conditions") {
  ProblemData d = example_data();
  BoundaryParams r0 = choose_initial(d, example_goal());
  CHECK(satisfies_initial_conditions(d, r0));
  CHECK(r0.T == 1);
  CHECK(r0.beta == RatVector{8, 10});
  CHECK(r0.gamma == RatVector{-3, -4});
  SolveResult r = solve(d, example_goal());
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(objectives(d, r.rates, r.H, example_goal()).primal ==
        objectives(d, example_run().rates, example_run().H, example_goal()).primal);
}

TEST_CASE("iteration bound") {
  CHECK(iteration_bound(1, 1) == 70 * 4);
}

TEST_CASE("goal that already satisfies the start conditions") {
  ProblemData d = example_data();
  BoundaryParams g = choose_initial(d, example_goal());
  SolveOptions o;
  o.initial = g;
  SolveResult r = solve(d, g, o);
  REQUIRE(r.status == SolveStatus::Optimal);
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].pivot == PivotKind::None);
  CHECK(r.seq.N() == 1);
}

TEST_CASE("infeasible data stops before iterating") {
  ProblemData one;
  one.K = one.J = 1;
  one.A = RatMatrix{{1}};
  one.b = {1};
  one.c = {1};
  SolveResult r = solve(one, {{-1}, {-1}, 1, {0}, {0}});
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK(r.trace.empty());
}

TEST_CASE("restart separates a simultaneous collision") {
  Instance in = symmetric_instance();
  SolveResult r = solve(in.data, in.rho);
  REQUIRE(r.status == SolveStatus::Optimal);
  REQUIRE(r.restarts >= 1);
  CHECK(r.trace[0].vkind == CollisionKind::MultiplePre);
  CHECK(r.trace[0].shrinking == std::vector<std::string>{"q0_1", "q0_2"});
  REQUIRE(r.lines.size() == r.restarts + 1);
  const ParamLine& second = r.lines[1];
  CHECK(second.goal == in.rho);
  CHECK(second.at(1) == in.rho);
  for (const auto& x : second.start.lambda) CHECK(x.sign() <= 0);
  for (const auto& x : second.start.mu) CHECK(x.sign() >= 0);
  // The new start is interior for the sequence that collided.
  Assembly a = assemble(in.data, r.trace[0].seq, rates_for_sequence(in.data, r.trace[0].seq), second.start);
  SolutionH H = solve_structure(a);
  for (size_t i : a.hp) CHECK(H.h[i].sign() > 0);
  // Both boundary values now shrink at distinct points.
  REQUIRE(r.trace.size() >= 3);
  CHECK(r.trace[1].line == 1);
  CHECK(r.trace[1].shrinking == std::vector<std::string>{"q0_1"});
  CHECK(r.trace[2].shrinking == std::vector<std::string>{"q0_2"});
  CHECK(*r.trace[1].theta_bar < *r.trace[2].theta_bar);

  SolveResult again = solve(in.data, in.rho);
  CHECK(again.trace == r.trace);
}

TEST_CASE("invariants along random runs") {
  std::mt19937 g(123);
  size_t optimal = 0;
  for (int t = 0; t < 40; ++t) {
    Instance in = random_instance(g, 3);
    SolveResult r = solve(in.data, in.rho);
    if (r.status != SolveStatus::Optimal) continue;
    ++optimal;
    std::set<std::pair<size_t, std::string>> seen;
    for (size_t i = 0; i < r.trace.size(); ++i) {
      const IterationRecord& rec = r.trace[i];
      CHECK(seen.insert({rec.line, to_string(rec.seq)}).second);
      if (i > 0 && r.trace[i - 1].line == rec.line) CHECK(r.trace[i - 1].theta < rec.theta);
      const ParamLine& line = r.lines[rec.line];
      const Rational end = rec.theta_bar ? min(*rec.theta_bar, Rational(1)) : Rational(1);
      const Rational mid = (rec.theta + end) / 2;
      auto rates = rates_for_sequence(in.data, rec.seq);
      SolutionH H = solve_structure(assemble(in.data, rec.seq, rates, line.at(mid)));
      Certificate c = certify_optimal(in.data, rec.seq, rates, H, line.at(mid));
      CHECK_MESSAGE(c.ok, c.violation);
      CHECK(c.value.primal == c.value.dual);

      // The decomposition at a collision is the same from both sides.
      if (!rec.theta_bar || *rec.theta_bar >= 1 || i + 1 >= r.trace.size()) continue;
      const IterationRecord& next = r.trace[i + 1];
      if (next.line != rec.line || rec.note.rfind("restart", 0) == 0) continue;
      Replay before = replay(in.data, r, rec);
      Decomposition dv = decompose(rec.seq, before.rates, before.Hbar, before.a.zero);
      auto nrates = rates_for_sequence(in.data, next.seq);
      Assembly na = assemble(in.data, next.seq, nrates, line.at(next.theta));
      SolutionH HW = solve_structure(na);
      Decomposition dw = decompose(next.seq, nrates, HW, na.zero);
      CHECK(dv.xt == dw.xt);
      CHECK(dv.qt == dw.qt);
      CHECK(dv.Ut == dw.Ut);
      CHECK(dv.Pt == dw.Pt);
    }
  }
  CHECK(optimal > 0);
}
