#include "mclp/pivots.hpp"

#include <algorithm>
#include <functional>

#include "mclp/subsets.hpp"

namespace mclp {

namespace {

bool subset_of(const IndexSet& a, const IndexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::set<RateVar> primal_basic(const RatesBasis& b, size_t J) {
  std::set<RateVar> s;
  for (size_t k : b.K) s.insert({RateKind::Xdot, k});
  for (size_t j = 0; j < J; ++j)
    if (!b.J.count(j)) s.insert({RateKind::U, j});
  return s;
}

size_t basis_difference(const RatesBasis& a, const RatesBasis& b, size_t J) {
  auto sa = primal_basic(a, J), sb = primal_basic(b, J);
  size_t n = 0;
  for (const auto& v : sa)
    if (!sb.count(v)) ++n;
  return n;
}

// Removes internal bases a..b (1-based, inclusive).
BaseSequence remove_bases(const BaseSequence& s, size_t a, size_t b) {
  BaseSequence out = s;
  out.bases.erase(out.bases.begin() + static_cast<long>(a - 1), out.bases.begin() + static_cast<long>(b));
  return out;
}

Rational rate_objective(const ProblemData& d, const RatesBasis& b) {
  RatesSolution r = rates_for_basis(d, b);
  Rational v;
  for (size_t j = 0; j < d.J; ++j) v += d.c[j] * r.u[j];
  return v;
}

std::vector<RatesBasis> admissible_bases(const ProblemData& d) {
  std::vector<RatesBasis> out;
  for (size_t s = 0; s <= d.K; ++s) {
    if (d.J + s < d.K) continue;
    size_t js = d.J + s - d.K;  // |Jset| so that |Kset| + J - |Jset| = K
    if (js > d.J) continue;
    for_each_subset(d.K, s, [&](const std::vector<size_t>& ks) {
      for_each_subset(d.J, js, [&](const std::vector<size_t>& jv) {
        RatesBasis b{IndexSet(ks.begin(), ks.end()), IndexSet(jv.begin(), jv.end())};
        try {
          if (is_admissible(rates_for_basis(d, b))) out.push_back(b);
        } catch (const SingularError&) {
        }
        return false;
      });
      return false;
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

Rational boundary_value(const BVar& v, const SolutionH& H, const Decomposition& dec) {
  switch (v.kind) {
    case BKind::Xb: return dec.xb.at(v.index);
    case BKind::Qb: return dec.qb.at(v.index);
    case BKind::XN: return H[{HBlock::XN, 0, v.index}];
    case BKind::U0: return H[{HBlock::U0, 0, v.index}];
    case BKind::UN: return H[{HBlock::UN, 0, v.index}];
    case BKind::Q0: return H[{HBlock::Q0, 0, v.index}];
    case BKind::PN: return H[{HBlock::PN, 0, v.index}];
    case BKind::P0: return H[{HBlock::P0, 0, v.index}];
  }
  return {};
}

// Column of the primal Boundary-LP coefficient matrix [[A,0,I,0],[A,A,0,I]].
RatVector primal_column(const ProblemData& d, const BVar& v) {
  RatVector col(2 * d.K);
  switch (v.kind) {
    case BKind::U0:
      for (size_t k = 0; k < d.K; ++k) col[k] = col[d.K + k] = d.A(k, v.index);
      break;
    case BKind::UN:
      for (size_t k = 0; k < d.K; ++k) col[d.K + k] = d.A(k, v.index);
      break;
    case BKind::Xb: col[v.index] = 1; break;
    case BKind::XN: col[d.K + v.index] = 1; break;
    default: throw std::logic_error("not a primal boundary variable");
  }
  return col;
}

// Column of the dual coefficient matrix [[A^T,0,I,0],[A^T,A^T,0,I]] over (pN, p0, q*, q0).
RatVector dual_column(const ProblemData& d, const BVar& v) {
  RatVector col(2 * d.J);
  switch (v.kind) {
    case BKind::PN:
      for (size_t j = 0; j < d.J; ++j) col[j] = col[d.J + j] = d.A(v.index, j);
      break;
    case BKind::P0:
      for (size_t j = 0; j < d.J; ++j) col[d.J + j] = d.A(v.index, j);
      break;
    case BKind::Qb: col[v.index] = 1; break;
    case BKind::Q0: col[d.J + v.index] = 1; break;
    default: throw std::logic_error("not a dual boundary variable");
  }
  return col;
}

RatMatrix columns(const std::vector<RatVector>& cols, size_t rows) {
  RatMatrix m(rows, cols.size());
  for (size_t c = 0; c < cols.size(); ++c)
    for (size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
  return m;
}

BVar to_bvar(const HComp& c) {
  switch (c.block) {
    case HBlock::U0: return {BKind::U0, c.i};
    case HBlock::UN: return {BKind::UN, c.i};
    case HBlock::P0: return {BKind::P0, c.i};
    case HBlock::PN: return {BKind::PN, c.i};
    case HBlock::XN: return {BKind::XN, c.i};
    case HBlock::Q0: return {BKind::Q0, c.i};
    case HBlock::X0: return {BKind::Xb, c.i};
    case HBlock::QN: return {BKind::Qb, c.i};
    default: throw std::logic_error("not a boundary component");
  }
}

}  // namespace

std::optional<size_t> unique_minimizer(const SolutionH& H, const std::vector<size_t>& kept, const BVar& w) {
  std::vector<Rational> vals;
  for (size_t n : kept) vals.push_back(w.kind == BKind::Xb ? H.x(n, w.index) : H.q(n, w.index));
  Rational m = *std::min_element(vals.begin(), vals.end());
  std::optional<size_t> pos;
  for (size_t i = 0; i < vals.size(); ++i)
    if (vals[i] == m) {
      if (pos) return std::nullopt;
      pos = i;
    }
  return pos;
}


std::string describe(const BoundaryStep& st) {
  std::string s = "leaving " + to_string(st.leaving);
  if (st.entering) s += ", entering " + to_string(*st.entering);
  if (st.leaving_other) s += ", partner leaving " + to_string(*st.leaving_other);
  if (st.vprime) s += ", v' " + to_string(*st.vprime);
  return s;
}

const char* to_string(CollisionKind k) {
  switch (k) {
    case CollisionKind::A: return "a";
    case CollisionKind::B: return "b";
    case CollisionKind::C: return "c";
    case CollisionKind::D: return "d";
    case CollisionKind::E: return "e";
    case CollisionKind::F: return "f";
    case CollisionKind::MultiplePre: return "multiple-pre";
    case CollisionKind::MultipleAt: return "multiple-at";
    case CollisionKind::MultiplePost: return "multiple-post";
  }
  return "?";
}

std::optional<CollisionKind> collision_kind_from_string(const std::string& s) {
  for (auto k : {CollisionKind::A, CollisionKind::B, CollisionKind::C, CollisionKind::D, CollisionKind::E,
                 CollisionKind::F, CollisionKind::MultiplePre, CollisionKind::MultipleAt, CollisionKind::MultiplePost})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

const char* to_string(PivotKind k) {
  switch (k) {
    case PivotKind::None: return "none";
    case PivotKind::Internal: return "internal";
    case PivotKind::TypeI: return "boundary-I";
    case PivotKind::TypeII: return "boundary-II";
  }
  return "?";
}

bool is_primal(const BVar& v) {
  return v.kind == BKind::Xb || v.kind == BKind::XN || v.kind == BKind::U0 || v.kind == BKind::UN;
}

BVar partner(const BVar& v) {
  switch (v.kind) {
    case BKind::Xb: return {BKind::P0, v.index};
    case BKind::P0: return {BKind::Xb, v.index};
    case BKind::XN: return {BKind::PN, v.index};
    case BKind::PN: return {BKind::XN, v.index};
    case BKind::U0: return {BKind::Q0, v.index};
    case BKind::Q0: return {BKind::U0, v.index};
    case BKind::UN: return {BKind::Qb, v.index};
    case BKind::Qb: return {BKind::UN, v.index};
  }
  return v;
}

std::string to_string(const BVar& v) {
  static const char* names[] = {"xb", "xN", "u0", "uN", "q0", "pN", "qb", "p0"};
  return std::string(names[static_cast<int>(v.kind)]) + "_" + std::to_string(v.index + 1);
}

Collision classify_collision(const ProblemData& d, const BaseSequence& seq, const std::vector<RatesSolution>& rates,
                             const SolutionH& Hbar, const std::vector<bool>& zero, const Decomposition& dec) {
  const HLayout& l = Hbar.layout;
  const size_t N = l.N();
  Collision c;
  std::vector<size_t> taus;
  std::vector<HComp> states, bnds;
  for (size_t r = 0; r < l.size(); ++r) {
    if (zero[r] || !Hbar.h[r].is_zero()) continue;
    HComp hc = l.comp(r);
    c.shrinking.push_back(hc);
    if (hc.block == HBlock::Tau) taus.push_back(hc.n);
    else if (hc.block == HBlock::X || hc.block == HBlock::Q) states.push_back(hc);
    else bnds.push_back(hc);
  }
  auto multiple = [&] {
    c.kind = CollisionKind::MultiplePre;
    return c;
  };
  if (c.shrinking.empty()) return multiple();

  if (taus.empty()) {
    if (states.size() == 1 && bnds.empty()) {
      c.kind = CollisionKind::A;
      return c;
    }
    if (states.empty() && bnds.size() == 1) {
      c.kind = CollisionKind::E;
      c.boundary = to_bvar(bnds[0]);
      return c;
    }
    return multiple();
  }

  std::sort(taus.begin(), taus.end());
  const size_t a = taus.front(), b = taus.back();
  if (b - a + 1 != taus.size() || (a == 1 && b == N)) return multiple();
  c.span = {a, b};

  auto x_structural = [&](size_t k, size_t lo, size_t hi) {
    for (size_t n = lo; n <= hi; ++n)
      if (zero[l.x(n, k)]) return true;
    return false;
  };
  auto q_structural = [&](size_t j, size_t lo, size_t hi) {
    for (size_t n = lo; n <= hi; ++n)
      if (zero[l.q(n, j)]) return true;
    return false;
  };

  for (const auto& s : states) {
    if (s.n + 1 < a || s.n > b) return multiple();
    bool explained = s.block == HBlock::X ? x_structural(s.i, a - 1, b) : q_structural(s.i, a - 1, b);
    if (!explained) return multiple();
  }

  std::vector<BVar> joint;
  for (const auto& s : bnds) {
    if (s.block == HBlock::X0 && a == 1 && x_structural(s.i, 0, b)) joint.push_back({BKind::Xb, s.i});
    else if (s.block == HBlock::QN && b == N && q_structural(s.i, a - 1, N)) joint.push_back({BKind::Qb, s.i});
    else return multiple();
  }
  if (joint.size() > 1) return multiple();
  if (joint.size() == 1) {
    const BVar& v = joint[0];
    bool ok = v.kind == BKind::Xb ? dec.Ktied.count(v.index) && rates.front().xdot[v.index].sign() < 0
                                  : dec.Jtied.count(v.index) && rates.back().qdot[v.index].sign() < 0;
    if (!ok) return multiple();
    c.kind = CollisionKind::F;
    c.boundary = v;
    return c;
  }

  if (a > 1 && b < N) {
    size_t diff = basis_difference(seq.bases[a - 2], seq.bases[b], d.J);
    if (diff == 2) {
      c.kind = CollisionKind::B;
      return c;
    }
    if (diff != 1) return multiple();
  }

  std::vector<BVar> freeing;
  for (size_t k : dec.Ktied) {
    bool inside = true;
    for (size_t n = 1; n <= N && inside; ++n)
      if (zero[l.x(n, k)] && (n + 1 < a || n > b)) inside = false;
    if (inside) freeing.push_back({BKind::Xb, k});
  }
  for (size_t j : dec.Jtied) {
    bool inside = true;
    for (size_t n = 0; n < N && inside; ++n)
      if (zero[l.q(n, j)] && (n + 1 < a || n > b)) inside = false;
    if (inside) freeing.push_back({BKind::Qb, j});
  }
  if (freeing.size() > 1) return multiple();
  if (freeing.size() == 1) {
    c.kind = CollisionKind::D;
    c.becoming_free = freeing[0];
    return c;
  }
  c.kind = CollisionKind::C;
  return c;
}

std::optional<size_t> BoundaryDictionary::row_of(const BVar& v) const {
  auto it = std::find(rows.begin(), rows.end(), v);
  if (it == rows.end()) return std::nullopt;
  return static_cast<size_t>(it - rows.begin());
}

std::optional<size_t> BoundaryDictionary::col_of(const BVar& v) const {
  auto it = std::find(cols.begin(), cols.end(), v);
  if (it == cols.end()) return std::nullopt;
  return static_cast<size_t>(it - cols.begin());
}

Rational BoundaryDictionary::value(const BVar& v) const {
  if (auto r = row_of(v)) return row_values[*r];
  if (auto c = col_of(v)) return col_values[*c];
  return {};
}

std::vector<DictChoice> dictionary_choices(const ProblemData& d, const BaseSequence& seq, const Decomposition& dec,
                                           const std::vector<BVar>& keep, const std::vector<BVar>& prefer) {
  const long K = static_cast<long>(d.K), J = static_cast<long>(d.J);
  auto sz = [](const IndexSet& s) { return static_cast<long>(s.size()); };
  const long primal = sz(dec.Kfree) + (J - sz(seq.J0)) + sz(seq.KN1) + (J - sz(seq.JN1));
  const long dual = sz(dec.Jfree) + (K - sz(seq.KN1)) + sz(seq.J0) + (K - sz(seq.K0));
  if (primal > 2 * K || dual > 2 * J)
    throw CountingViolation("boundary counts " + std::to_string(primal) + "/" + std::to_string(dual) +
                            " exceed " + std::to_string(2 * K) + "/" + std::to_string(2 * J));
  const long excess = primal + sz(dec.Ktied) - 2 * K;
  const size_t a = excess > 0 ? static_cast<size_t>(excess) : 0;
  const size_t b = excess < 0 ? static_cast<size_t>(-excess) : 0;
  if (a > dec.Ktied.size() || b > dec.Jtied.size()) throw CountingViolation("tied sets too small for the counts");

  auto has = [](const std::vector<BVar>& vs, BKind kind, size_t i) {
    return std::find(vs.begin(), vs.end(), BVar{kind, i}) != vs.end();
  };
  std::vector<size_t> kt(dec.Ktied.begin(), dec.Ktied.end()), jt(dec.Jtied.begin(), dec.Jtied.end());
  std::vector<DictChoice> out;
  // Each extra swap moves one tied x to p0 and one tied q to uN, keeping both counts.
  for (size_t t = 0; a + t <= kt.size() && b + t <= jt.size(); ++t) {
    const size_t sa = a + t, sb = b + t;
    for_each_subset(kt.size(), sa, [&](const std::vector<size_t>& si) {
      IndexSet S;
      for (size_t i : si) S.insert(kt[i]);
      for (size_t k : kt) {
        if (S.count(k) && has(keep, BKind::Xb, k)) return false;
        if (sa > 0 && !S.count(k) && has(prefer, BKind::Xb, k)) return false;
      }
      for_each_subset(jt.size(), sb, [&](const std::vector<size_t>& ti) {
        IndexSet T;
        for (size_t i : ti) T.insert(jt[i]);
        for (size_t j : jt) {
          if (T.count(j) && has(keep, BKind::Qb, j)) return false;
          if (sb > 0 && !T.count(j) && has(prefer, BKind::Qb, j)) return false;
        }
        out.push_back({S, T});
        return false;
      });
      return false;
    });
  }
  return out;
}

BoundaryDictionary build_dictionary(const ProblemData& d, const BaseSequence& seq, const Decomposition& dec,
                                    const SolutionH& Hbar, const DictChoice& choice) {
  const size_t K = d.K, J = d.J;
  BoundaryDictionary dict;
  for (size_t k = 0; k < K; ++k)
    if (dec.Kfree.count(k) || (dec.Ktied.count(k) && !choice.p0_from_tied.count(k))) dict.rows.push_back({BKind::Xb, k});
  for (size_t k : seq.KN1) dict.rows.push_back({BKind::XN, k});
  for (size_t j = 0; j < J; ++j)
    if (!seq.J0.count(j)) dict.rows.push_back({BKind::U0, j});
  for (size_t j = 0; j < J; ++j)
    if (!seq.JN1.count(j) || choice.uN_from_tied.count(j)) dict.rows.push_back({BKind::UN, j});

  for (size_t j : seq.J0) dict.cols.push_back({BKind::Q0, j});
  for (size_t k = 0; k < K; ++k)
    if (!seq.KN1.count(k)) dict.cols.push_back({BKind::PN, k});
  for (size_t j = 0; j < J; ++j)
    if (dec.Jfree.count(j) || (dec.Jtied.count(j) && !choice.uN_from_tied.count(j))) dict.cols.push_back({BKind::Qb, j});
  for (size_t k = 0; k < K; ++k)
    if (!seq.K0.count(k) || choice.p0_from_tied.count(k)) dict.cols.push_back({BKind::P0, k});

  if (dict.rows.size() != 2 * K || dict.cols.size() != 2 * J)
    throw CountingViolation("boundary basis sizes " + std::to_string(dict.rows.size()) + "/" +
                            std::to_string(dict.cols.size()));

  std::vector<RatVector> bcols, ncols;
  for (const auto& v : dict.rows) {
    bcols.push_back(primal_column(d, v));
    dict.row_values.push_back(boundary_value(v, Hbar, dec));
  }
  for (const auto& v : dict.cols) {
    ncols.push_back(primal_column(d, partner(v)));
    dict.col_values.push_back(boundary_value(v, Hbar, dec));
  }
  try {
    dict.Ahat = solve_linear(columns(bcols, 2 * K), columns(ncols, 2 * K));
  } catch (const SingularError&) {
    std::string rs;
    for (const auto& v : dict.rows) rs += (rs.empty() ? "" : ",") + to_string(v);
    throw CountingViolation("boundary basis " + rs + " is singular");
  }
  return dict;
}

bool compatibility_holds(const ProblemData& d, const BoundaryDictionary& dict) {
  std::vector<RatVector> bcols, ncols;
  for (const auto& v : dict.cols) bcols.push_back(dual_column(d, v));
  for (const auto& v : dict.rows) ncols.push_back(dual_column(d, partner(v)));
  RatMatrix D;
  try {
    D = solve_linear(columns(bcols, 2 * d.J), columns(ncols, 2 * d.J));
  } catch (const SingularError&) {
    return false;
  }
  // Negative transpose, with one sign flip per q slack since the dual slacks enter with +I.
  auto slack = [](const BVar& v) { return v.kind == BKind::Qb || v.kind == BKind::Q0; };
  for (size_t i = 0; i < dict.rows.size(); ++i)
    for (size_t j = 0; j < dict.cols.size(); ++j) {
      const bool flip = slack(dict.cols[j]) == slack(partner(dict.rows[i]));
      if (dict.Ahat(i, j) != (flip ? -D(j, i) : D(j, i))) return false;
    }
  return true;
}

namespace {

// Exchanges row i and column j of the dictionary.
RatMatrix pivot_tableau(const RatMatrix& A, size_t i, size_t j) {
  RatMatrix P = A;
  const Rational a = A(i, j);
  for (size_t r = 0; r < A.rows(); ++r)
    for (size_t c = 0; c < A.cols(); ++c) {
      if (r == i && c == j) P(r, c) = a.inverse();
      else if (r == i) P(r, c) = A(i, c) / a;
      else if (c == j) P(r, c) = -A(r, j) / a;
      else P(r, c) = A(r, c) - A(r, j) * A(i, c) / a;
    }
  return P;
}

}  // namespace

BoundaryStep boundary_pivot(const BoundaryDictionary& dict, const BVar& v) {
  BoundaryStep st;
  st.leaving = v;
  st.before = st.after = dict;
  const RatMatrix& A = dict.Ahat;
  if (is_primal(v)) {
    auto ri = dict.row_of(v);
    if (!ri) throw std::logic_error("leaving variable " + to_string(v) + " is not basic");
    const size_t i = *ri;
    for (size_t l = 0; l < dict.cols.size(); ++l)
      if (dict.col_values[l].is_zero() && !A(i, l).is_zero()) {
        st.kind = PivotKind::TypeI;
        return st;
      }
    std::vector<size_t> best;
    Rational t;
    for (size_t l = 0; l < dict.cols.size(); ++l) {
      if (A(i, l).sign() >= 0) continue;
      Rational r = dict.col_values[l] / -A(i, l);
      if (best.empty() || r < t) {
        t = r;
        best = {l};
      } else if (r == t) {
        best.push_back(l);
      }
    }
    if (best.empty()) throw NeedsRestart(CollisionKind::MultipleAt, "no entering candidate for " + to_string(v));
    if (best.size() > 1) throw NeedsRestart(CollisionKind::MultipleAt, "tied ratio test for " + to_string(v));
    const size_t j = best[0];
    st.kind = PivotKind::TypeII;
    st.ratio = t;
    st.leaving_other = dict.cols[j];
    st.entering = partner(dict.cols[j]);
    BoundaryDictionary& nd = st.after;
    for (size_t l = 0; l < dict.cols.size(); ++l) nd.col_values[l] += A(i, l) * t;
    nd.cols[j] = partner(v);
    nd.col_values[j] = t;
    nd.rows[i] = *st.entering;
    nd.row_values[i] = 0;
    nd.Ahat = pivot_tableau(A, i, j);
  } else {
    auto cj = dict.col_of(v);
    if (!cj) throw std::logic_error("leaving variable " + to_string(v) + " is not basic");
    const size_t j = *cj;
    for (size_t r = 0; r < dict.rows.size(); ++r)
      if (dict.row_values[r].is_zero() && !A(r, j).is_zero()) {
        st.kind = PivotKind::TypeI;
        return st;
      }
    std::vector<size_t> best;
    Rational t;
    for (size_t r = 0; r < dict.rows.size(); ++r) {
      if (A(r, j).sign() <= 0) continue;
      Rational q = dict.row_values[r] / A(r, j);
      if (best.empty() || q < t) {
        t = q;
        best = {r};
      } else if (q == t) {
        best.push_back(r);
      }
    }
    if (best.empty()) throw NeedsRestart(CollisionKind::MultipleAt, "no entering candidate for " + to_string(v));
    if (best.size() > 1) throw NeedsRestart(CollisionKind::MultipleAt, "tied ratio test for " + to_string(v));
    const size_t i = best[0];
    st.kind = PivotKind::TypeII;
    st.ratio = t;
    st.leaving_other = dict.rows[i];
    st.entering = partner(dict.rows[i]);
    BoundaryDictionary& nd = st.after;
    for (size_t r = 0; r < dict.rows.size(); ++r) nd.row_values[r] -= A(r, j) * t;
    nd.rows[i] = partner(v);
    nd.row_values[i] = t;
    nd.cols[j] = *st.entering;
    nd.col_values[j] = 0;
    nd.Ahat = pivot_tableau(A, i, j);
  }
  return st;
}

BoundarySets new_boundary_sets(const BoundaryDictionary& after, const Decomposition& dec,
                               const std::optional<BVar>& vprime) {
  BoundarySets s;
  const size_t K = dec.xt.size(), J = dec.qt.size();
  auto is_v = [&](BKind kind, size_t i) { return vprime && *vprime == BVar{kind, i}; };
  for (size_t k = 0; k < K; ++k) {
    if ((after.value({BKind::Xb, k}) + dec.xt[k]).sign() > 0 || is_v(BKind::Xb, k)) s.K0.insert(k);
    if (after.value({BKind::XN, k}).sign() > 0 || is_v(BKind::XN, k)) s.KN1.insert(k);
  }
  for (size_t j = 0; j < J; ++j) {
    if (after.value({BKind::Q0, j}).sign() > 0 || is_v(BKind::Q0, j)) s.J0.insert(j);
    if ((after.value({BKind::Qb, j}) + dec.qt[j]).sign() > 0 || is_v(BKind::Qb, j)) s.JN1.insert(j);
  }
  return s;
}

bool certifies_past(const ProblemData& d, const BaseSequence& seq, const BoundaryParams& rho,
                    const BoundaryParams& drho) {
  try {
    auto rates = rates_for_sequence(d, seq);
    Assembly a = assemble(d, seq, rates, rho);
    SolutionH H = solve_structure(a);
    SolutionH dH = gradient(a, build_rhs(d, seq, drho));
    for (size_t r : a.hp) {
      int s = H.h[r].sign();
      if (s < 0 || (s == 0 && dH.h[r].sign() <= 0)) return false;
    }
    return true;
  } catch (const ImproperSequence&) {
    return false;
  } catch (const SingularError&) {
    return false;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

std::vector<BaseSequence> insertion_candidates(const ProblemData& d, const BaseSequence& seq, size_t pos,
                                               const BoundaryParams& rho, const BoundaryParams& drho,
                                               size_t max_insert) {
  const size_t N = seq.N();
  const std::vector<RatesBasis> all = admissible_bases(d);
  std::vector<Rational> obj;
  for (const auto& b : all) obj.push_back(rate_objective(d, b));
  std::optional<RatesBasis> left, right;
  if (pos > 0) left = seq.bases[pos - 1];
  if (pos < N) right = seq.bases[pos];
  std::optional<Rational> hi, lo;  // objectives strictly decrease along the sequence
  if (left) hi = rate_objective(d, *left);
  if (right) lo = rate_objective(d, *right);

  std::vector<BaseSequence> found;
  std::vector<size_t> chain;
  std::function<void(size_t)> extend = [&](size_t len) {
    if (chain.size() == len) {
      const RatesBasis& last = all[chain.back()];
      if (right ? !adjacency(last, *right, d.K, d.J) : !subset_of(seq.JN1, last.J)) return;
      BaseSequence s = seq;
      std::vector<RatesBasis> ins;
      for (size_t c : chain) ins.push_back(all[c]);
      s.bases.insert(s.bases.begin() + static_cast<long>(pos), ins.begin(), ins.end());
      if (certifies_past(d, s, rho, drho)) found.push_back(std::move(s));
      return;
    }
    for (size_t c = 0; c < all.size(); ++c) {
      if (hi && !(obj[c] < *hi)) continue;
      if (lo && !(*lo < obj[c])) continue;
      if (!chain.empty() && !(obj[c] < obj[chain.back()])) continue;
      const RatesBasis* prev = chain.empty() ? (left ? &*left : nullptr) : &all[chain.back()];
      if (prev ? !adjacency(*prev, all[c], d.K, d.J) : !subset_of(seq.K0, all[c].K)) continue;
      chain.push_back(c);
      extend(len);
      chain.pop_back();
    }
  };
  for (size_t len = 1; len <= max_insert && found.empty(); ++len) extend(len);
  return found;
}

namespace {

struct BoundarySetup {
  BaseSequence inter;         // sequence after pre-boundary removal
  std::vector<size_t> kept;   // original breakpoints that survive the removal
  std::vector<BVar> keep, prefer;
  std::optional<BVar> v;      // leaving boundary variable, when known before the dictionary
};

BoundarySetup boundary_setup(const BaseSequence& seq, const Collision& coll) {
  BoundarySetup bs;
  bs.inter = seq;
  bs.kept = {0};
  size_t ra = 0, rb = 0;
  if (coll.kind == CollisionKind::D || coll.kind == CollisionKind::F) std::tie(ra, rb) = *coll.span;
  for (size_t n = 1; n <= seq.N(); ++n)
    if (!(ra && n >= ra && n <= rb)) bs.kept.push_back(n);
  if (ra) bs.inter = remove_bases(seq, ra, rb);
  if (bs.inter.N() == 0) throw NeedsRestart(CollisionKind::MultiplePre, "all intervals collapse");
  if (coll.kind == CollisionKind::D) {
    bs.prefer.push_back(*coll.becoming_free);
  } else {
    bs.v = coll.boundary;
    if (bs.v->kind == BKind::Xb || bs.v->kind == BKind::Qb) bs.keep.push_back(*bs.v);
  }
  return bs;
}

// Choices with a regular basis. The counts or a singular basis can force the partner of v into the
// basis; v then leaves without a pivot.
std::vector<DictChoice> setup_choices(const ProblemData& d, const BoundarySetup& bs, const Decomposition& dec,
                                      const SolutionH& Hbar) {
  std::string why = "no admissible boundary dictionary";
  auto regular = [&](const std::vector<BVar>& keep) {
    std::vector<DictChoice> out;
    for (const auto& c : dictionary_choices(d, bs.inter, dec, keep, bs.prefer)) {
      try {
        build_dictionary(d, bs.inter, dec, Hbar, c);
        out.push_back(c);
      } catch (const CountingViolation& e) {
        why = e.what();
      }
    }
    return out;
  };
  std::vector<DictChoice> choices;
  try {
    choices = regular(bs.keep);
    if (choices.empty() && !bs.keep.empty()) choices = regular({});
  } catch (const CountingViolation& e) {
    throw NeedsRestart(CollisionKind::MultipleAt, e.what());
  }
  if (choices.empty()) throw NeedsRestart(CollisionKind::MultipleAt, why);
  return choices;
}

}  // namespace

std::vector<DictChoice> pivot_choices(const ProblemData& d, const BaseSequence& seq,
                                      const std::vector<RatesSolution>& rates, const Collision& coll,
                                      const SolutionH& Hbar, const std::vector<bool>& zero) {
  if (coll.kind != CollisionKind::D && coll.kind != CollisionKind::E && coll.kind != CollisionKind::F) return {};
  return setup_choices(d, boundary_setup(seq, coll), decompose(seq, rates, Hbar, zero), Hbar);
}

PivotResult mclp_pivot(const ProblemData& d, const BaseSequence& seq, const std::vector<RatesSolution>& rates,
                       const Collision& coll, const SolutionH& Hbar, const std::vector<bool>& zero,
                       const BoundaryParams& rho_bar, const BoundaryParams& drho, const PivotOptions& opts) {
  PivotResult res;
  auto finish = [&](BaseSequence s) {
    if (!certifies_past(d, s, rho_bar, drho))
      throw NeedsRestart::subproblem_required("pivot result " + to_string(s) + " does not certify; " + res.note);
    res.seq = std::move(s);
    return res;
  };
  auto insert_at = [&](const BaseSequence& s, size_t pos) {
    auto cands = insertion_candidates(d, s, pos, rho_bar, drho, opts.max_insert);
    if (cands.empty())
      throw NeedsRestart::subproblem_required("no inserted basis certifies at position " + std::to_string(pos) + "; " +
                                              res.note);
    if (cands.size() > 1) res.note += "; " + std::to_string(cands.size()) + " certified insertions";
    return cands.front();
  };
  Decomposition dec = decompose(seq, rates, Hbar, zero);

  switch (coll.kind) {
    case CollisionKind::MultiplePre:
    case CollisionKind::MultipleAt:
    case CollisionKind::MultiplePost:
      throw NeedsRestart(coll.kind, std::string("collision is ") + to_string(coll.kind));
    case CollisionKind::A: {
      const HComp& s = coll.shrinking.at(0);
      res.kind = PivotKind::Internal;
      res.wkind = CollisionKind::C;
      return finish(insert_at(seq, s.n));
    }
    case CollisionKind::B: {
      auto [a, b] = *coll.span;
      res.kind = PivotKind::Internal;
      res.wkind = CollisionKind::B;
      return finish(insert_at(remove_bases(seq, a, b), a - 1));
    }
    case CollisionKind::C: {
      auto [a, b] = *coll.span;
      res.kind = PivotKind::Internal;
      res.wkind = CollisionKind::A;
      return finish(remove_bases(seq, a, b));
    }
    default: break;
  }

  // Boundary pivots: pre-boundary removal, dictionary, pivot, new sets, post-boundary insertion.
  BoundarySetup bs = boundary_setup(seq, coll);
  const BaseSequence& inter = bs.inter;
  const std::vector<size_t>& kept = bs.kept;
  std::optional<BVar> v = bs.v;
  std::vector<DictChoice> choices = setup_choices(d, bs, dec, Hbar);
  if (opts.choice) {
    if (std::find(choices.begin(), choices.end(), *opts.choice) == choices.end())
      throw std::invalid_argument("dictionary choice is not admissible");
    choices = {*opts.choice};
  }
  const BoundaryDictionary dict = build_dictionary(d, inter, dec, Hbar, choices.front());

  // New end sets, W-side collision and post-boundary insertion for one boundary step.
  auto complete = [&](const BoundaryStep& st) {
    BoundarySets sets = new_boundary_sets(st.after, dec, st.vprime);
    BaseSequence out = inter;
    out.K0 = sets.K0;
    out.J0 = sets.J0;
    out.KN1 = sets.KN1;
    out.JN1 = sets.JN1;

    std::optional<size_t> post_pos;
    if (st.kind == PivotKind::TypeII) {
      const BVar& ws = *st.leaving_other;
      if (ws.kind == BKind::Xb || ws.kind == BKind::Qb) {
        post_pos = unique_minimizer(Hbar, kept, ws);
        if (!post_pos) throw NeedsRestart(CollisionKind::MultiplePost, "minimum of " + to_string(ws) + " is not unique");
      }
    }

    // A new positive boundary state needs a first (last) base that keeps it basic.
    const bool front = !subset_of(out.K0, inter.bases.front().K);
    const bool back = !subset_of(out.JN1, inter.bases.back().J);
    const std::optional<BVar>& vp = st.vprime;
    if (front || back) {
      res.wkind = CollisionKind::F;
    } else if (!vp) {
      res.wkind = st.kind == PivotKind::TypeI ? CollisionKind::A : CollisionKind::D;
    } else {
      res.wkind = CollisionKind::E;
    }
    res.kind = st.kind;
    res.step = st;
    res.note = describe(st);

    if (front && back) throw NeedsRestart(CollisionKind::MultiplePost, "insertions needed at both ends");
    if (res.wkind == CollisionKind::F && !(vp && vp->kind == (front ? BKind::Xb : BKind::Qb)))
      throw NeedsRestart(CollisionKind::MultiplePost, "end state turns positive outside the end base");
    if (res.wkind == CollisionKind::D) {
      if (!post_pos) throw NeedsRestart(CollisionKind::MultiplePost, "post-boundary position undetermined");
      return finish(insert_at(out, *post_pos));
    }
    if (res.wkind == CollisionKind::F) return finish(insert_at(out, front ? 0 : out.N()));
    return finish(out);
  };

  // Without a pivot v* turns positive and the dictionary stays as it is.
  auto unchanged = [&](const BVar& leaving) {
    BoundaryStep st;
    st.kind = PivotKind::TypeI;
    st.leaving = leaving;
    st.before = st.after = dict;
    st.vprime = partner(leaving);
    return st;
  };

  BoundaryStep step;
  if (coll.kind == CollisionKind::D) {
    const BVar f = *coll.becoming_free;
    bool basic = f.kind == BKind::Xb ? dict.row_of(f).has_value() : dict.col_of(f).has_value();
    if (basic) {
      step.kind = PivotKind::TypeI;
      step.leaving = f;
      step.before = step.after = dict;
    } else {
      v = partner(f);
    }
  }
  if (v && (is_primal(*v) ? !dict.row_of(*v) : !dict.col_of(*v))) {
    step.kind = PivotKind::TypeI;
    step.leaving = *v;
    step.before = step.after = dict;
  } else if (v) {
    try {
      step = boundary_pivot(dict, *v);
    } catch (const NeedsRestart&) {
      try {
        PivotResult alt = complete(unchanged(*v));
        alt.note += "; no entering variable";
        return alt;
      } catch (const NeedsRestart&) {
      }
      throw;
    }
  }

  if (step.kind == PivotKind::TypeI) {
    if (coll.kind != CollisionKind::D) step.vprime = partner(*v);
  } else {
    const BVar& ws = *step.leaving_other;
    bool drop = (ws.kind == BKind::Xb && dec.xt[ws.index].sign() > 0) ||
                (ws.kind == BKind::Qb && dec.qt[ws.index].sign() > 0);
    if (!drop) step.vprime = step.entering;
  }

  if (step.kind == PivotKind::TypeI || coll.kind == CollisionKind::D) return complete(step);
  try {
    return complete(step);
  } catch (const NeedsRestart&) {
    // Degenerate end states can make the jump wrong.
    try {
      PivotResult alt = complete(unchanged(step.leaving));
      alt.note += "; type II jump rejected";
      return alt;
    } catch (const NeedsRestart&) {
    }
    throw;
  }
}

}  // namespace mclp
