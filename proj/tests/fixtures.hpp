#pragma once

#include <random>
#include <utility>

#include "mclp/driver.hpp"

namespace fixtures {

using mclp::Rational;
using mclp::RatVector;

inline Rational R(long n, long d = 1) { return Rational(n, d); }

inline mclp::ProblemData example_data() {
  mclp::ProblemData d;
  d.K = 2;
  d.J = 2;
  d.A = mclp::RatMatrix{{5, 2}, {3, 4}};
  d.b = {3, 1};
  d.c = {1, 2};
  return d;
}

inline mclp::BoundaryParams example_goal() { return {{8, 10}, {5, 6}, 2, {0, 0}, {0, 0}}; }
inline mclp::BoundaryParams example_start() { return {{8, 10}, {-2, -2}, R(1, 10), {-1, -1}, {1, 1}}; }

inline mclp::BaseSequence full_single(size_t K, size_t J) {
  mclp::IndexSet Ks, Js;
  for (size_t k = 0; k < K; ++k) Ks.insert(k);
  for (size_t j = 0; j < J; ++j) Js.insert(j);
  return {Ks, Js, Ks, Js, {{Ks, Js}}};
}

struct Instance {
  mclp::ProblemData data;
  mclp::BoundaryParams rho;
};

// Random non-degenerate instance with K, J <= max_dim and small integer data.
inline Instance random_instance(std::mt19937& g, size_t max_dim) {
  std::uniform_int_distribution<int> dim(1, static_cast<int>(max_dim)), v(-9, 9), pos(0, 6);
  for (;;) {
    Instance in;
    mclp::ProblemData& d = in.data;
    d.K = static_cast<size_t>(dim(g));
    d.J = static_cast<size_t>(dim(g));
    d.A = mclp::RatMatrix(d.K, d.J);
    for (size_t k = 0; k < d.K; ++k)
      for (size_t j = 0; j < d.J; ++j) d.A(k, j) = v(g);
    for (size_t k = 0; k < d.K; ++k) d.b.push_back(v(g));
    for (size_t j = 0; j < d.J; ++j) d.c.push_back(v(g));
    mclp::BoundaryParams& r = in.rho;
    r.T = Rational(1 + pos(g), 1 + pos(g) % 3);
    for (size_t k = 0; k < d.K; ++k) {
      r.beta.push_back(v(g));
      r.lambda.push_back(-pos(g) / 2);
    }
    for (size_t j = 0; j < d.J; ++j) {
      r.gamma.push_back(v(g));
      r.mu.push_back(pos(g) / 2);
    }
    try {
      mclp::validate(d, r);
      return in;
    } catch (const mclp::DegeneracyError&) {
    }
  }
}

// Inputs of the pivot taken after a trace record, rebuilt from the record's line.
struct Replay {
  std::vector<mclp::RatesSolution> rates;
  mclp::Assembly a;
  mclp::SolutionH H, dH, Hbar;
  mclp::Collision coll;
  mclp::BoundaryParams rho_bar, drho;
};

inline Replay replay(const mclp::ProblemData& d, const mclp::SolveResult& res, const mclp::IterationRecord& rec) {
  Replay r;
  const mclp::ParamLine& line = res.lines.at(rec.line);
  r.drho = line.direction();
  r.rates = mclp::rates_for_sequence(d, rec.seq);
  r.a = mclp::assemble(d, rec.seq, r.rates, line.at(rec.theta));
  r.H = mclp::solve_structure(r.a);
  r.dH = mclp::gradient(r.a, mclp::build_rhs(d, rec.seq, r.drho));
  r.Hbar = mclp::axpy(r.H, *rec.theta_bar - rec.theta, r.dH);
  r.rho_bar = line.at(*rec.theta_bar);
  r.coll = mclp::classify_collision(d, rec.seq, r.rates, r.Hbar, r.a.zero,
                                    mclp::decompose(rec.seq, r.rates, r.Hbar, r.a.zero));
  return r;
}

inline mclp::SolveResult example_run() {
  mclp::SolveOptions o;
  o.initial = example_start();
  return mclp::solve(example_data(), example_goal(), o);
}

// Two symmetric states whose boundary values shrink together on the first line.
inline Instance symmetric_instance() {
  Instance in;
  in.data.K = in.data.J = 2;
  in.data.A = mclp::RatMatrix{{2, 1}, {1, 2}};
  in.data.b = {1, 1};
  in.data.c = {1, 1};
  in.rho = {{5, 5}, {3, 3}, 2, {0, 0}, {0, 0}};
  return in;
}

}  // namespace fixtures
