#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "mclp/io.hpp"

using namespace mclp;
using namespace fixtures;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;

  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why << msg;
    }
  }
};

Rational region_mid(const IterationRecord& rec) {
  const Rational end = rec.theta_bar ? min(*rec.theta_bar, Rational(1)) : Rational(1);
  return (rec.theta + end) / 2;
}

// First `count` instances from a fixed seed whose solve does not end as infeasible or unbounded.
std::vector<std::pair<Instance, SolveResult>> feasible_runs(unsigned seed, size_t count, size_t max_dim) {
  std::mt19937 g(seed);
  std::vector<std::pair<Instance, SolveResult>> out;
  while (out.size() < count) {
    Instance in = random_instance(g, max_dim);
    if (feasibility_check(in.data, in.rho) != Feasibility::BothFeasible) continue;
    SolveResult r = solve(in.data, in.rho);
    out.emplace_back(std::move(in), std::move(r));
  }
  return out;
}

void certify_run(Check& c, const ProblemData& d, const SolveResult& r, const BoundaryParams& goal,
                 const std::string& tag) {
  c.require(r.status == SolveStatus::Optimal, tag + ": status " + to_string(r.status) + " (" + r.message + ")");
  if (r.status != SolveStatus::Optimal) return;
  for (const auto& rec : r.trace) {
    const BoundaryParams rho = r.lines[rec.line].at(region_mid(rec));
    auto rates = rates_for_sequence(d, rec.seq);
    SolutionH H = solve_structure(assemble(d, rec.seq, rates, rho));
    Certificate cert = certify_optimal(d, rec.seq, rates, H, rho);
    c.require(cert.ok, tag + " iterate " + std::to_string(rec.ell) + ": " + cert.violation);
    c.require(cert.value.primal == cert.value.dual, tag + ": duality gap");
  }
  Certificate fin = certify_optimal(d, r.seq, r.rates, r.H, goal);
  c.require(fin.ok, tag + " final: " + fin.violation);
  c.require(fin.value.primal == fin.value.dual, tag + " final: duality gap");
}

Check golden() {
  Check c;
  SolveResult r = example_run();
  c.require(r.status == SolveStatus::Optimal, "status");
  c.require(r.trace.size() == 4, "iterations " + std::to_string(r.trace.size()));
  if (!c.ok) return c;
  const std::vector<Rational> bars{R(2, 27), R(9, 29), R(2, 3), 1};
  const std::vector<std::string> seqs{
      "({1,2},{1,2}) [({1,2},{1,2})] ({1,2},{1,2})",
      "({1,2},{1}) [({1,2},{1,2})] ({1},{1,2})",
      "({1},{1}) [({1},{1}) ({1,2},{1,2})] ({1},{1,2})",
      "({1},{1}) [({1},{1}) ({1},{2}) ({1,2},{1,2})] ({1},{1,2})",
  };
  for (size_t i = 0; i < 4; ++i) {
    c.require(r.trace[i].theta_bar && *r.trace[i].theta_bar == bars[i], "theta_bar " + std::to_string(i + 1));
    c.require(to_string(r.trace[i].seq) == seqs[i], "sequence " + std::to_string(i + 1));
  }
  c.require(r.trace[0].dict && r.trace[0].dict->Ahat == RatMatrix{{5, 2, 0, 0}, {3, 4, 0, 0}, {5, 2, 5, 2}, {3, 4, 3, 4}},
            "first dictionary");
  c.require(r.trace[0].ratio && *r.trace[0].ratio == R(503, 216), "first ratio");
  c.require(r.trace[1].ratio && *r.trace[1].ratio == R(5, 29), "second ratio");
  const SolutionH& H = r.H;
  // At the goal the last interval has length 0; the compacted solution drops it.
  CompactSolution cs = compact(example_data(), r);
  c.require(cs.breakpoints == RatVector{0, 1, 2}, "tau");
  c.require(r.rates[0].u == RatVector{0, R(1, 4)} && r.rates[1].u == RatVector{R(1, 3), 0}, "rates");
  c.require(H.block(HBlock::U0) == RatVector{0, R(5, 2)}, "u0");
  c.require(H.block(HBlock::PN) == RatVector{0, R(5, 3)}, "pN");
  c.require(H.x_at(1) == RatVector{R(11, 2), 0}, "x1");
  c.require(H.block(HBlock::XN) == RatVector{R(41, 6), 0}, "xN");
  c.require(H.q_at(r.seq.N()) == RatVector{0, R(2, 3)}, "qN");
  c.require(H.block(HBlock::Q0) == RatVector{R(1, 2), 0}, "q0");
  return c;
}

Check certificates(const std::vector<std::pair<Instance, SolveResult>>& runs) {
  Check c;
  certify_run(c, example_data(), example_run(), example_goal(), "example");
  for (size_t i = 0; i < runs.size(); ++i)
    certify_run(c, runs[i].first.data, runs[i].second, runs[i].first.rho, "instance " + std::to_string(i));
  return c;
}

void oracle_case(Check& c, const ProblemData& d, const BoundaryParams& rho, const SolveResult& r,
                 const std::string& tag) {
  c.require(r.status == SolveStatus::Optimal, tag + ": status " + to_string(r.status));
  if (r.status != SolveStatus::Optimal) return;
  const Rational opt = objectives(d, r.rates, r.H, rho).primal;
  OracleResult exact = oracle(d, rho, breakpoint_grid(r));
  c.require(exact.status == LpStatus::Optimal && exact.objective == opt, tag + ": breakpoint grid");
  std::optional<Rational> prev;
  for (size_t n : {4, 8, 16, 32}) {
    OracleResult o = oracle(d, rho, uniform_grid(rho.T, n));
    // A coarse grid may be infeasible; once feasible every refinement stays feasible.
    if (o.status != LpStatus::Optimal) {
      c.require(!prev, tag + ": grid " + std::to_string(n) + " infeasible after a feasible grid");
      continue;
    }
    c.require(o.objective <= opt, tag + ": grid " + std::to_string(n) + " above the objective");
    c.require(!prev || *prev <= o.objective, tag + ": grid " + std::to_string(n) + " decreased");
    prev = o.objective;
  }
}

Check oracles(const std::vector<std::pair<Instance, SolveResult>>& runs) {
  Check c;
  oracle_case(c, example_data(), example_goal(), example_run(), "example");
  for (size_t i = 0; i < runs.size(); ++i)
    oracle_case(c, runs[i].first.data, runs[i].first.rho, runs[i].second, "instance " + std::to_string(i));
  return c;
}

void invariants_at(Check& c, const ProblemData& d, const BaseSequence& seq, const BoundaryParams& rho,
                   const std::string& tag) {
  auto rates = rates_for_sequence(d, seq);
  Assembly a = assemble(d, seq, rates, rho);
  c.require(is_nonsingular(a.M), tag + ": M singular");
  if (!c.ok) return;
  SolutionH H = solve_structure(a);
  Rational total = 0;
  for (size_t n = 1; n <= seq.N(); ++n) total += H.tau(n);
  c.require(total == rho.T, tag + ": sum of tau");
  c.require(zero_boundary_count(H) == 2 * (d.K + d.J), tag + ": zero boundary count");
  for (size_t i : a.hp) c.require(H.h[i].sign() > 0, tag + ": H_P not positive");
  for (size_t n = 1; n < seq.N(); ++n) {
    Rational cu0 = 0, cu1 = 0;
    for (size_t j = 0; j < d.J; ++j) {
      cu0 += d.c[j] * rates[n - 1].u[j];
      cu1 += d.c[j] * rates[n].u[j];
    }
    c.require(cu1 < cu0, tag + ": rates objective not decreasing");
  }
}

Check invariants(const std::vector<std::pair<Instance, SolveResult>>& runs) {
  Check c;
  auto one = [&](const ProblemData& d, const SolveResult& r, const std::string& tag) {
    for (const auto& rec : r.trace)
      invariants_at(c, d, rec.seq, r.lines[rec.line].at(region_mid(rec)), tag + " iterate " + std::to_string(rec.ell));
  };
  one(example_data(), example_run(), "example");
  for (size_t i = 0; i < runs.size(); ++i)
    if (runs[i].second.status == SolveStatus::Optimal) one(runs[i].first.data, runs[i].second, "instance " + std::to_string(i));
  return c;
}

Check determinism(size_t& found) {
  Check c;
  std::mt19937 g(2024);
  for (int t = 0; t < 600 && found < 5; ++t) {
    Instance in = random_instance(g, 3);
    SolveResult res = solve(in.data, in.rho);
    for (const auto& rec : res.trace) {
      if (!rec.theta_bar || *rec.theta_bar >= 1 || rec.note.rfind("restart", 0) == 0) continue;
      Replay p = replay(in.data, res, rec);
      std::vector<DictChoice> choices;
      try {
        choices = pivot_choices(in.data, rec.seq, p.rates, p.coll, p.Hbar, p.a.zero);
      } catch (const NeedsRestart&) {
        continue;
      }
      if (choices.size() < 2) continue;
      ++found;
      std::optional<std::string> first;
      for (const auto& ch : choices) {
        PivotOptions o;
        o.choice = ch;
        std::string out;
        try {
          out = to_string(mclp_pivot(in.data, rec.seq, p.rates, p.coll, p.Hbar, p.a.zero, p.rho_bar, p.drho, o).seq);
        } catch (const NeedsRestart&) {
          out = "restart";
        }
        if (!first) first = out;
        c.require(out == *first, "instance " + std::to_string(t) + ": choices disagree");
      }
    }
  }
  c.require(found > 0, "no pivot with several admissible dictionaries");
  return c;
}

Check initialization() {
  Check c;
  std::mt19937 g(606);
  for (int t = 0; t < 50; ++t) {
    Instance in = random_instance(g, 3);
    const std::string tag = "instance " + std::to_string(t);
    BoundaryParams rho0 = choose_initial(in.data, in.rho);
    c.require(satisfies_initial_conditions(in.data, rho0), tag + ": start conditions");
    InitialSolution s = initial_solution(in.data, rho0);
    c.require(s.seq.N() == 1, tag + ": N");
    for (HBlock b : {HBlock::U0, HBlock::UN, HBlock::P0, HBlock::PN})
      for (const auto& v : s.H.block(b)) c.require(v == 0, tag + ": impulse not zero");
    auto rates = rates_for_sequence(in.data, s.seq);
    Assembly a = assemble(in.data, s.seq, rates, rho0);
    for (size_t i : a.hp) c.require(s.H.h[i].sign() > 0, tag + ": H_P not positive");
    Certificate cert = certify_optimal(in.data, s.seq, rates, s.H, rho0);
    c.require(cert.ok, tag + ": " + cert.violation);
  }
  return c;
}

Check termination(const std::vector<std::pair<Instance, SolveResult>>& runs) {
  Check c;
  const SolveOptions defaults;
  auto one = [&](const ProblemData& d, const SolveResult& r, const std::string& tag) {
    c.require(mpz_class(r.trace.size()) <= iteration_bound(d.K, d.J), tag + ": iteration bound");
    c.require(r.restarts <= defaults.max_restarts, tag + ": restart budget");
    for (size_t i = 1; i < r.trace.size(); ++i)
      if (r.trace[i].line == r.trace[i - 1].line)
        c.require(r.trace[i - 1].theta < r.trace[i].theta, tag + ": theta not increasing");
  };
  one(example_data(), example_run(), "example");
  for (size_t i = 0; i < runs.size(); ++i) one(runs[i].first.data, runs[i].second, "instance " + std::to_string(i));
  return c;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  bool all = true;
  auto report = [&](int id, const std::string& name, const std::function<Check()>& f) {
    auto t0 = clock::now();
    Check c;
    try {
      c = f();
    } catch (const std::exception& e) {
      c.ok = false;
      c.why << "exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(clock::now() - t0).count();
    all = all && c.ok;
    std::cout << (c.ok ? "PASS" : "FAIL") << " " << id << " " << name << " (" << secs << " s)";
    if (!c.ok) std::cout << ": " << c.why.str();
    std::cout << std::endl;
  };

  std::vector<std::pair<Instance, SolveResult>> pool, small;
  double pool_secs = 0;
  {
    auto t0 = clock::now();
    pool = feasible_runs(2026, 100, 3);
    pool_secs = std::chrono::duration<double>(clock::now() - t0).count();
  }
  small.assign(pool.begin(), pool.begin() + 20);

  report(1, "golden example", golden);
  report(2, "certificates on the example and 100 random instances", [&] {
    Check c = certificates(pool);
    c.require(pool_secs < 60, "solve time " + std::to_string(pool_secs) + " s");
    return c;
  });
  report(3, "discretized oracle on the example and 20 random instances", [&] { return oracles(small); });
  report(4, "structural invariants", [&] { return invariants(pool); });
  size_t found = 0;
  report(5, "pivot result independent of the dictionary choice", [&] {
    Check c = determinism(found);
    std::cout << "  pivots with several admissible dictionaries: " << found << "\n";
    return c;
  });
  report(6, "initial solutions on 50 random instances", initialization);
  report(7, "termination", [&] { return termination(pool); });
  return all ? 0 : 1;
}
