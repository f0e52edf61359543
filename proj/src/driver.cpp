#include "mclp/driver.hpp"

#include <functional>
#include <random>
#include <sstream>

namespace mclp {

namespace {

bool same_dict(const std::optional<BoundaryDictionary>& a, const std::optional<BoundaryDictionary>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->rows == b->rows && a->cols == b->cols && a->row_values == b->row_values &&
         a->col_values == b->col_values && a->Ahat == b->Ahat;
}

std::vector<Rational*> free_components(BoundaryParams& p) {
  std::vector<Rational*> out;
  for (auto* v : {&p.beta, &p.gamma, &p.lambda, &p.mu})
    for (auto& x : *v) out.push_back(&x);
  return out;
}

uint64_t data_seed(const ProblemData& d) {
  std::ostringstream os;
  os << d.K << ' ' << d.J;
  for (size_t k = 0; k < d.K; ++k)
    for (size_t j = 0; j < d.J; ++j) os << ' ' << d.A(k, j);
  for (const auto& v : d.b) os << ' ' << v;
  for (const auto& v : d.c) os << ' ' << v;
  // FNV-1a keeps the seed identical across platforms and standard libraries.
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : os.str()) h = (h ^ ch) * 1099511628211ull;
  return h;
}

bool strictly_interior(const ProblemData& d, const BaseSequence& seq, const BoundaryParams& rho) {
  try {
    Assembly a = assemble(d, seq, rates_for_sequence(d, seq), rho);
    SolutionH H = solve_structure(a);
    for (size_t r : a.hp)
      if (H.h[r].sign() <= 0) return false;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<std::string> names(const std::vector<HComp>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(to_string(c));
  return out;
}

}  // namespace

bool operator==(const IterationRecord& a, const IterationRecord& b) {
  return a.ell == b.ell && a.line == b.line && a.theta == b.theta && a.theta_bar == b.theta_bar && a.seq == b.seq &&
         a.vkind == b.vkind && a.wkind == b.wkind && a.pivot == b.pivot && a.shrinking == b.shrinking &&
         a.objective == b.objective && same_dict(a.dict, b.dict) && a.ratio == b.ratio && a.note == b.note;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::SubproblemRequired: return "subproblem-required";
    case SolveStatus::RestartExhausted: return "restart-exhausted";
  }
  return "?";
}

bool satisfies_initial_conditions(const ProblemData& d, const BoundaryParams& r) {
  if (r.T.sign() <= 0) return false;
  for (size_t k = 0; k < d.K; ++k) {
    if (r.beta[k].sign() <= 0 || r.lambda[k].sign() >= 0) return false;
    if ((r.beta[k] + d.b[k] * r.T + r.lambda[k]).sign() <= 0) return false;
  }
  for (size_t j = 0; j < d.J; ++j) {
    if (r.gamma[j].sign() >= 0 || r.mu[j].sign() <= 0) return false;
    if ((r.gamma[j] + d.c[j] * r.T + r.mu[j]).sign() >= 0) return false;
  }
  return true;
}

BoundaryParams choose_initial(const ProblemData& d, const BoundaryParams& goal) {
  BoundaryParams r;
  r.T = 1;
  for (size_t k = 0; k < d.K; ++k) r.beta.push_back(max(goal.beta[k], Rational(2) + d.b[k].abs()));
  for (size_t j = 0; j < d.J; ++j) r.gamma.push_back(min(goal.gamma[j], Rational(-2) - d.c[j].abs()));
  r.lambda.assign(d.K, Rational(-1));
  r.mu.assign(d.J, Rational(1));
  return r;
}

InitialSolution initial_solution(const ProblemData& d, const BoundaryParams& rho0) {
  if (!satisfies_initial_conditions(d, rho0))
    throw std::invalid_argument("initial parameters do not satisfy the single-interval conditions");
  InitialSolution s;
  IndexSet Ks, Js;
  for (size_t k = 0; k < d.K; ++k) Ks.insert(k);
  for (size_t j = 0; j < d.J; ++j) Js.insert(j);
  s.seq = {Ks, Js, Ks, Js, {{Ks, Js}}};
  s.H = solve_structure(assemble(d, s.seq, rates_for_sequence(d, s.seq), rho0));
  return s;
}

ParamLine restart(const ProblemData& d, const ParamLine& line, const Rational& theta, const Rational& theta_bar,
                  const BaseSequence& seq, const SolveOptions& opts) {
  const Rational mid = (theta + theta_bar) / 2;
  const BoundaryParams base = line.at(mid);
  BoundaryParams dir = line.direction();
  std::vector<Rational*> u = free_components(dir);
  Rational uu;
  for (auto* x : u) uu += *x * *x;

  std::mt19937_64 rng(data_seed(d) ^ (static_cast<uint64_t>(mid.num().get_si()) * 0x9e3779b97f4a7c15ull));
  std::uniform_int_distribution<int> pick(-4, 4);
  for (size_t attempt = 0; attempt < opts.restart_directions; ++attempt) {
    BoundaryParams step = base;
    std::vector<Rational*> s = free_components(step);
    RatVector r(s.size());
    for (auto& x : r) x = pick(rng);
    if (!uu.is_zero()) {
      Rational ru;
      for (size_t i = 0; i < r.size(); ++i) ru += r[i] * *u[i];
      for (size_t i = 0; i < r.size(); ++i) r[i] -= ru / uu * *u[i];
    }
    // lambda and mu components at their bound move strictly inside; clamping would keep them on it.
    const size_t nl = base.beta.size() + base.gamma.size();
    for (size_t k = 0; k < base.lambda.size(); ++k)
      if (base.lambda[k].is_zero()) r[nl + k] = -(r[nl + k].abs() + 1);
    for (size_t j = 0; j < base.mu.size(); ++j)
      if (base.mu[j].is_zero()) r[nl + base.lambda.size() + j] = r[nl + base.lambda.size() + j].abs() + 1;
    bool nonzero = false;
    for (const auto& x : r) nonzero = nonzero || !x.is_zero();
    if (!nonzero) continue;
    Rational eps(1, 2);
    for (size_t h = 0; h < opts.restart_halvings; ++h, eps /= 2) {
      BoundaryParams p = base;
      std::vector<Rational*> ps = free_components(p);
      for (size_t i = 0; i < ps.size(); ++i) *ps[i] += eps * r[i];
      // Snapping to short rationals keeps coefficient growth bounded across repeated restarts.
      const Rational w = eps / 8;
      for (auto* x : ps) *x = simplest_between(*x - w, *x + w);
      for (auto& x : p.lambda) x = min(x, Rational(0));
      for (auto& x : p.mu) x = max(x, Rational(0));
      p.T = simplest_between(p.T - w, p.T + w);
      bool signs = p.T.sign() > 0;
      for (const auto& x : p.lambda) signs = signs && x.sign() <= 0;
      for (const auto& x : p.mu) signs = signs && x.sign() >= 0;
      if (signs && strictly_interior(d, seq, p)) return {p, line.goal};
    }
  }
  throw RestartExhausted("no perturbation direction keeps the current region interior");
}

mpz_class iteration_bound(size_t K, size_t J) {
  mpz_class c1, c2;
  mpz_bin_uiui(c1.get_mpz_t(), 4 * (K + J), 2 * (K + J));
  mpz_bin_uiui(c2.get_mpz_t(), K + J, K);
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, c2.get_ui());
  return c1 * p;
}

SolveResult solve(const ProblemData& d, const BoundaryParams& goal, const SolveOptions& opts) {
  validate(d, goal);
  SolveResult res;
  res.goal = goal;
  res.feasibility = feasibility_check(d, goal);
  switch (res.feasibility) {
    case Feasibility::BothFeasible: break;
    case Feasibility::DualInfeasible:
      res.status = SolveStatus::Unbounded;
      return res;
    default:
      res.status = SolveStatus::Infeasible;
      return res;
  }

  BoundaryParams rho0 = opts.initial ? *opts.initial : choose_initial(d, goal);
  InitialSolution init = initial_solution(d, rho0);
  ParamLine line{rho0, goal};
  res.lines.push_back(line);
  BaseSequence seq = init.seq;
  Rational theta;
  size_t line_no = 0;

  for (size_t ell = 1; ell <= opts.max_iterations; ++ell) {
    const BoundaryParams drho = line.direction();
    const BoundaryParams rho = line.at(theta);
    auto rates = rates_for_sequence(d, seq);
    Assembly a = assemble(d, seq, rates, rho);
    SolutionH H = solve_structure(a);
    SolutionH dH = gradient(a, build_rhs(d, seq, drho));
    RatioResult rr = ratio_step(H, dH, a.hp);

    IterationRecord rec;
    rec.ell = ell;
    rec.line = line_no;
    rec.theta = theta;
    rec.seq = seq;
    if (rr.delta) rec.theta_bar = theta + *rr.delta;

    if (!rec.theta_bar || *rec.theta_bar >= 1) {
      res.H = axpy(H, Rational(1) - theta, dH);
      res.rates = rates;
      res.seq = seq;
      rec.objective = objectives(d, rates, res.H, goal).primal;
      if (rec.theta_bar) {
        SolutionH Hbar = axpy(H, *rr.delta, dH);
        rec.vkind = classify_collision(d, seq, rates, Hbar, a.zero, decompose(seq, rates, Hbar, a.zero)).kind;
        for (size_t r : rr.argmax) rec.shrinking.push_back(to_string(a.layout.comp(r)));
      }
      res.trace.push_back(rec);
      Certificate cert = certify_optimal(d, seq, rates, res.H, goal);
      if (!cert.ok) throw std::logic_error("final solution fails certification: " + cert.violation);
      res.status = SolveStatus::Optimal;
      return res;
    }

    const Rational theta_bar = *rec.theta_bar;
    const BoundaryParams rho_bar = line.at(theta_bar);
    SolutionH Hbar = axpy(H, *rr.delta, dH);
    Decomposition dec = decompose(seq, rates, Hbar, a.zero);
    Collision coll = classify_collision(d, seq, rates, Hbar, a.zero, dec);
    rec.vkind = coll.kind;
    rec.shrinking = names(coll.shrinking);
    rec.objective = objectives(d, rates, Hbar, rho_bar).primal;

    try {
      PivotOptions po;
      po.max_insert = opts.max_insert;
      PivotResult pr = mclp_pivot(d, seq, rates, coll, Hbar, a.zero, rho_bar, drho, po);
      rec.wkind = pr.wkind;
      rec.pivot = pr.kind;
      rec.note = pr.note;
      if (pr.step && pr.step->kind == PivotKind::TypeII) {
        rec.dict = pr.step->before;
        rec.ratio = pr.step->ratio;
      }
      res.trace.push_back(rec);
      seq = pr.seq;
      theta = theta_bar;
    } catch (const NeedsRestart& e) {
      if (res.restarts >= opts.max_restarts) {
        res.status = e.subproblem() ? SolveStatus::SubproblemRequired : SolveStatus::RestartExhausted;
        res.message = e.what();
        res.seq = seq;
        return res;
      }
      try {
        line = restart(d, line, theta, theta_bar, seq, opts);
      } catch (const RestartExhausted& re) {
        res.status = e.subproblem() ? SolveStatus::SubproblemRequired : SolveStatus::RestartExhausted;
        res.message = std::string(e.what()) + "; " + re.what();
        res.seq = seq;
        return res;
      }
      res.lines.push_back(line);
      rec.note = std::string("restart: ") + e.what();
      res.trace.push_back(rec);
      ++res.restarts;
      ++line_no;
      theta = 0;
    }
  }
  throw std::runtime_error("iteration limit reached");
}

}  // namespace mclp
