#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "mclp/io.hpp"

using namespace mclp;
using namespace fixtures;

namespace {

std::string example_text() {
  std::ifstream in(std::string(MCLP_EXAMPLES_DIR) + "/example.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("problem files") {
  ProblemFile p = parse_problem(example_text());
  CHECK(p.data.A == example_data().A);
  CHECK(p.data.b == example_data().b);
  CHECK(p.data.c == example_data().c);
  CHECK(p.rho == example_goal());
  REQUIRE(p.initial);
  CHECK(*p.initial == example_start());

  ProblemFile again = parse_problem(write_problem(p));
  CHECK(again.data.A == p.data.A);
  CHECK(again.rho == p.rho);
  CHECK(again.initial == p.initial);
  CHECK(parse_params_file(example_text(), 2, 2) == example_start());
}

TEST_CASE("parse errors carry positions") {
  std::string bad = example_text();
  bad.replace(bad.find("\"T\": 2"), 6, "\"T\": \"1/0\"");
  std::string e = error_of(bad);
  CHECK(e.find("line 9") != std::string::npos);
  CHECK(e.find("column") != std::string::npos);

  std::string broken = "{\n  \"K\": 2,\n  \"J\": 2,\n  \"A\": [[5, 2], [3, 4]\n}";
  CHECK(error_of(broken).find("line 5") != std::string::npos);

  std::string short_b = example_text();
  short_b.replace(short_b.find("\"b\": [3, 1]"), 11, "\"b\": [3]");
  CHECK_FALSE(error_of(short_b).empty());
  CHECK_FALSE(error_of("[1, 2]").empty());
}

TEST_CASE("sequence notation") {
  BaseSequence s = parse_sequence("({1},{1}) [({1},{1}) ({1},{2}) ({1,2},{1,2})] ({1},{1,2})");
  CHECK(s.K0 == IndexSet{0});
  CHECK(s.N() == 3);
  CHECK(s.bases[1] == RatesBasis{{0}, {1}});
  CHECK(s.JN1 == IndexSet{0, 1});
  CHECK(to_string(s) == "({1},{1}) [({1},{1}) ({1},{2}) ({1,2},{1,2})] ({1},{1,2})");
  CHECK(to_string(parse_sequence("({},{}) [] ({},{})")) == "({},{}) [] ({},{})");
  CHECK_THROWS_AS(parse_sequence("({1},{1}) [({1},{1})"), ParseError);
  CHECK_THROWS_AS(parse_sequence("({0},{1}) [] ({},{})"), ParseError);
}

TEST_CASE("trace files round trip") {
  std::mt19937 g(8);
  std::vector<SolveResult> runs{example_run(), solve(symmetric_instance().data, symmetric_instance().rho)};
  for (int t = 0; t < 10; ++t) {
    Instance in = random_instance(g, 3);
    runs.push_back(solve(in.data, in.rho));
  }
  for (const auto& r : runs) {
    std::vector<IterationRecord> expect = r.trace;
    for (auto& rec : expect) rec.dict.reset();
    CHECK(parse_trace(write_trace(r.trace)) == expect);
  }
  std::string text = write_trace(example_run().trace);
  for (const char* bar : {"theta_bar=2/27", "theta_bar=9/29", "theta_bar=2/3", "theta_bar=1\t"})
    CHECK(text.find(bar) != std::string::npos);
}

TEST_CASE("samples agree with the exact evaluation") {
  SolveResult r = example_run();
  ProblemData d = example_data();
  auto only = sample_solution(d, r, 0);
  CompactSolution c = compact(d, r);
  REQUIRE(only.size() == c.breakpoints.size());
  for (size_t i = 0; i < only.size(); ++i) {
    CHECK(only[i].t == c.breakpoints[i]);
    Evaluation e = evaluate(d, r.seq, r.rates, r.H, only[i].t);
    CHECK(only[i].e.x == e.x);
    CHECK(only[i].e.q == e.q);
    CHECK(only[i].e.U == e.U);
    CHECK(only[i].e.P == e.P);
  }
  CHECK(c.breakpoints == RatVector{0, 1, 2});
  CHECK(only.front().impulse);
  CHECK(only.back().impulse);
  CHECK(c.x[1] == RatVector{R(11, 2), 0});

  auto rows = sample_solution(d, r, 8);
  CHECK(rows.size() == 9);
  std::string csv = write_csv(d, rows);
  CHECK(csv.rfind("t,x_1,x_2,q_1,q_2,u_1,u_2,p_1,p_2,impulse_flag\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

  Evaluation e0 = evaluate(d, r.seq, r.rates, r.H, 0);
  CHECK(e0.U == r.H.block(HBlock::U0));

  std::string svg = write_svg(d, r);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);

  std::string report = format_report(d, r);
  CHECK(report.find("41/6") != std::string::npos);
  CHECK(report.find("349/12") != std::string::npos);
}
