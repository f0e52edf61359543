#include "mclp/lp.hpp"

#include <optional>

namespace mclp {

namespace {

struct Tableau {
  size_t m = 0, ncol = 0;  // ncol excludes the rhs column
  std::vector<RatVector> rows;
  std::vector<size_t> basis;
  std::vector<SignClass> cls;
  std::vector<bool> enterable;

  Rational& rhs(size_t i) { return rows[i][ncol]; }

  void pivot(size_t r, size_t j, RatVector& dj) {
    Rational inv = rows[r][j].inverse();
    for (auto& v : rows[r])
      if (!v.is_zero()) v *= inv;
    for (size_t i = 0; i < m; ++i) {
      if (i == r || rows[i][j].is_zero()) continue;
      Rational f = rows[i][j];
      for (size_t k = 0; k <= ncol; ++k)
        if (!rows[r][k].is_zero()) rows[i][k] -= f * rows[r][k];
    }
    if (!dj[j].is_zero()) {
      Rational f = dj[j];
      for (size_t k = 0; k <= ncol; ++k)
        if (!rows[r][k].is_zero()) dj[k] -= f * rows[r][k];
    }
    basis[r] = j;
  }
};

enum class RunResult { Optimal, Unbounded };

// Maximizes cost over the tableau; dj holds reduced costs with dj[ncol] = -objective.
RunResult run(Tableau& t, const RatVector& cost, PivotRule rule, size_t& ray_col, int& ray_dir) {
  RatVector dj(t.ncol + 1);
  for (size_t j = 0; j < t.ncol; ++j) dj[j] = cost[j];
  for (size_t i = 0; i < t.m; ++i) {
    const Rational& cb = cost[t.basis[i]];
    if (cb.is_zero()) continue;
    for (size_t k = 0; k <= t.ncol; ++k)
      if (!t.rows[i][k].is_zero()) dj[k] -= cb * t.rows[i][k];
  }
  std::vector<bool> is_basic(t.ncol, false);
  for (size_t b : t.basis) is_basic[b] = true;
  for (;;) {
    std::optional<size_t> enter;
    int dir = 1;
    Rational best;
    for (size_t j = 0; j < t.ncol; ++j) {
      if (is_basic[j] || !t.enterable[j] || dj[j].is_zero()) continue;
      int d = dj[j].sign();
      if (d < 0 && t.cls[j] != SignClass::U) continue;
      if (rule == PivotRule::Bland) {
        enter = j;
        dir = d;
        break;
      }
      if (!enter || dj[j].abs() > best) {
        enter = j;
        dir = d;
        best = dj[j].abs();
      }
    }
    if (!enter) return RunResult::Optimal;
    const size_t j = *enter;
    std::optional<size_t> leave;
    Rational best_ratio;
    for (size_t i = 0; i < t.m; ++i) {
      if (t.cls[t.basis[i]] == SignClass::U) continue;
      Rational a = t.rows[i][j];
      if (dir < 0) a = -a;
      if (a.sign() <= 0) continue;
      Rational ratio = t.rhs(i) / a;
      if (!leave || ratio < best_ratio || (ratio == best_ratio && t.basis[i] < t.basis[*leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (!leave) {
      ray_col = j;
      ray_dir = dir;
      return RunResult::Unbounded;
    }
    is_basic[t.basis[*leave]] = false;
    is_basic[j] = true;
    t.pivot(*leave, j, dj);
  }
}

// Column layout shared by solve_lp and solve_for_basis: structural, then one slack per LE/GE row.
struct Layout {
  size_t n = 0, ns = 0;
  std::vector<std::optional<size_t>> slack_of_row;
  std::vector<Rational> slack_sign;
};

Layout layout_of(const LpInstance& inst) {
  Layout l;
  l.n = inst.matrix.cols();
  l.slack_of_row.resize(inst.matrix.rows());
  l.slack_sign.resize(inst.matrix.rows());
  for (size_t i = 0; i < inst.matrix.rows(); ++i) {
    if (inst.relations[i] == Relation::EQ) continue;
    l.slack_of_row[i] = l.n + l.ns++;
    l.slack_sign[i] = inst.relations[i] == Relation::LE ? 1 : -1;
  }
  return l;
}

void check_instance(const LpInstance& inst) {
  const size_t m = inst.matrix.rows(), n = inst.matrix.cols();
  if (inst.rhs.size() != m || inst.relations.size() != m || inst.objective.size() != n || inst.classes.size() != n)
    throw std::invalid_argument("inconsistent LP instance dimensions");
}

RatVector solve_duals(const Tableau& t, const std::vector<RatVector>& cols, const RatVector& cost) {
  RatMatrix bt(t.m, t.m);
  RatVector cb(t.m);
  for (size_t r = 0; r < t.m; ++r) {
    const RatVector& col = cols[t.basis[r]];
    for (size_t i = 0; i < t.m; ++i) bt(r, i) = col[i];
    cb[r] = cost[t.basis[r]];
  }
  return solve_linear(bt, cb);
}

}  // namespace

LpOutcome solve_lp(const LpInstance& inst, PivotRule rule) {
  check_instance(inst);
  const size_t m = inst.matrix.rows();
  const Layout lay = layout_of(inst);
  const size_t n = lay.n, ns = lay.ns;

  Tableau t;
  t.m = m;
  t.ncol = n + ns + m;
  t.rows.assign(m, RatVector(t.ncol + 1));
  t.cls.assign(t.ncol, SignClass::P);
  t.enterable.assign(t.ncol, true);
  for (size_t j = 0; j < n; ++j) {
    t.cls[j] = inst.classes[j];
    if (inst.classes[j] == SignClass::Z) t.enterable[j] = false;
  }
  std::vector<Rational> row_sign(m, 1);
  // Original (normalized) columns, used for dual recovery.
  std::vector<RatVector> cols(t.ncol, RatVector(m));
  for (size_t i = 0; i < m; ++i) {
    row_sign[i] = inst.rhs[i].sign() < 0 ? -1 : 1;
    for (size_t j = 0; j < n; ++j) t.rows[i][j] = row_sign[i] * inst.matrix(i, j);
    if (lay.slack_of_row[i]) t.rows[i][*lay.slack_of_row[i]] = row_sign[i] * lay.slack_sign[i];
    t.rows[i][n + ns + i] = 1;
    t.rhs(i) = row_sign[i] * inst.rhs[i];
  }
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < t.ncol; ++j) cols[j][i] = t.rows[i][j];

  t.basis.resize(m);
  bool need_phase1 = false;
  for (size_t i = 0; i < m; ++i) {
    auto s = lay.slack_of_row[i];
    if (s && t.rows[i][*s] == 1) {
      t.basis[i] = *s;
    } else {
      t.basis[i] = n + ns + i;
      need_phase1 = true;
    }
  }
  for (size_t i = 0; i < m; ++i) t.enterable[n + ns + i] = false;

  LpOutcome out;
  size_t ray_col = 0;
  int ray_dir = 1;

  if (need_phase1) {
    RatVector cost1(t.ncol);
    for (size_t i = 0; i < m; ++i) cost1[n + ns + i] = -1;
    run(t, cost1, rule, ray_col, ray_dir);
    Rational infeas;
    for (size_t i = 0; i < m; ++i)
      if (t.basis[i] >= n + ns) infeas += t.rhs(i);
    if (infeas.sign() > 0) {
      out.status = LpStatus::Infeasible;
      RatVector y = solve_duals(t, cols, cost1);
      out.certificate.resize(m);
      for (size_t i = 0; i < m; ++i) out.certificate[i] = row_sign[i] * y[i];
      return out;
    }
    // Drive remaining zero-level artificials out of the basis where possible.
    RatVector dummy(t.ncol + 1);
    for (size_t i = 0; i < m; ++i) {
      if (t.basis[i] < n + ns) continue;
      for (size_t j = 0; j < n + ns; ++j) {
        if (!t.enterable[j] || t.rows[i][j].is_zero()) continue;
        bool basic = false;
        for (size_t b : t.basis) basic |= b == j;
        if (basic) continue;
        t.pivot(i, j, dummy);
        break;
      }
    }
  }

  RatVector cost(t.ncol);
  for (size_t j = 0; j < n; ++j) cost[j] = inst.sense == Sense::Max ? inst.objective[j] : -inst.objective[j];
  if (run(t, cost, rule, ray_col, ray_dir) == RunResult::Unbounded) {
    out.status = LpStatus::Unbounded;
    RatVector ray(n + ns);
    if (ray_col < n + ns) ray[ray_col] = ray_dir;
    for (size_t i = 0; i < m; ++i)
      if (t.basis[i] < n + ns) ray[t.basis[i]] = -ray_dir * t.rows[i][ray_col];
    ray.resize(n);
    out.certificate = ray;
    return out;
  }

  out.status = LpStatus::Optimal;
  out.primal.assign(n, Rational());
  for (size_t i = 0; i < m; ++i) {
    out.basis.push_back(t.basis[i]);
    if (t.basis[i] < n) out.primal[t.basis[i]] = t.rhs(i);
  }
  for (size_t j = 0; j < n; ++j)
    if (!out.primal[j].is_zero()) out.objective += inst.objective[j] * out.primal[j];
  RatVector y = solve_duals(t, cols, cost);
  out.dual.resize(m);
  for (size_t i = 0; i < m; ++i) out.dual[i] = (inst.sense == Sense::Max ? 1 : -1) * row_sign[i] * y[i];
  return out;
}

BasicValues solve_for_basis(const LpInstance& inst, const std::vector<size_t>& basis) {
  check_instance(inst);
  const size_t m = inst.matrix.rows();
  if (basis.size() != m) throw std::invalid_argument("basis size must equal the number of constraints");
  const Layout lay = layout_of(inst);
  const size_t total = lay.n + lay.ns;
  auto column = [&](size_t j) {
    RatVector c(m);
    if (j < lay.n) {
      c = inst.matrix.col(j);
    } else {
      for (size_t i = 0; i < m; ++i)
        if (lay.slack_of_row[i] == j) c[i] = lay.slack_sign[i];
    }
    return c;
  };
  RatMatrix b(m, m), bt(m, m);
  RatVector cb(m);
  for (size_t r = 0; r < m; ++r) {
    if (basis[r] >= total) throw std::out_of_range("basis index out of range");
    RatVector c = column(basis[r]);
    for (size_t i = 0; i < m; ++i) {
      b(i, r) = c[i];
      bt(r, i) = c[i];
    }
    cb[r] = basis[r] < lay.n ? inst.objective[basis[r]] : Rational();
  }
  RatVector xb = solve_linear(b, inst.rhs);
  BasicValues out;
  out.primal.assign(total, Rational());
  for (size_t r = 0; r < m; ++r) out.primal[basis[r]] = xb[r];
  out.dual = solve_linear(bt, cb);
  return out;
}

}  // namespace mclp
