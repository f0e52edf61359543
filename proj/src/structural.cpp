#include "mclp/structural.hpp"

#include <algorithm>
#include <sstream>

namespace mclp {

namespace {

bool subset_of(const IndexSet& a, const IndexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Rational dot(const RatVector& a, const RatVector& b) {
  Rational s;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Builds the rows of M (and optionally R) in a fixed order shared by assemble and build_rhs.
class RowBuilder {
 public:
  RowBuilder(const HLayout& l, bool with_matrix) : l_(l), with_matrix_(with_matrix) {}

  void add(std::vector<std::pair<size_t, Rational>> terms, const Rational& rhs) {
    if (with_matrix_) rows_.push_back(std::move(terms));
    rhs_.push_back(rhs);
  }

  RatMatrix matrix() const {
    RatMatrix m(rows_.size(), l_.size());
    for (size_t r = 0; r < rows_.size(); ++r)
      for (const auto& [c, v] : rows_[r]) m(r, c) += v;
    return m;
  }
  const RatVector& rhs() const { return rhs_; }

 private:
  const HLayout& l_;
  bool with_matrix_;
  std::vector<std::vector<std::pair<size_t, Rational>>> rows_;
  RatVector rhs_;
};

struct Ix {
  const HLayout& l;
  size_t u0(size_t j) const { return l.index({HBlock::U0, 0, j}); }
  size_t x0(size_t k) const { return l.index({HBlock::X0, 0, k}); }
  size_t pN(size_t k) const { return l.index({HBlock::PN, 0, k}); }
  size_t qN(size_t j) const { return l.index({HBlock::QN, 0, j}); }
  size_t uN(size_t j) const { return l.index({HBlock::UN, 0, j}); }
  size_t xN(size_t k) const { return l.index({HBlock::XN, 0, k}); }
  size_t p0(size_t k) const { return l.index({HBlock::P0, 0, k}); }
  size_t q0(size_t j) const { return l.index({HBlock::Q0, 0, j}); }
};

// Time-interval variable index between B_n and B_{n+1} (n = 1..N-1).
size_t interval_var(const ProblemData& d, const BaseSequence& seq, const HLayout& l, size_t n) {
  auto ex = adjacency(seq.bases[n - 1], seq.bases[n], d.K, d.J);
  if (!ex) throw ImproperSequence("bases " + std::to_string(n) + " and " + std::to_string(n + 1) + " are not adjacent");
  if (ex->leaving.kind == RateKind::Xdot) return l.x(n, ex->leaving.index);
  return l.q(n, ex->leaving.index);
}

void build_rows(RowBuilder& rb, const ProblemData& d, const BaseSequence& seq, const std::vector<RatesSolution>* rates,
                const BoundaryParams& rho, const HLayout& l) {
  const size_t K = d.K, J = d.J, N = seq.N();
  Ix ix{l};
  using Terms = std::vector<std::pair<size_t, Rational>>;
  const Rational one(1), mone(-1);

  for (size_t k = 0; k < K; ++k) {
    Terms t;
    for (size_t j = 0; j < J; ++j)
      if (!d.A(k, j).is_zero()) t.push_back({ix.u0(j), d.A(k, j)});
    t.push_back({ix.x0(k), one});
    rb.add(std::move(t), rho.beta[k]);
  }
  for (size_t j : seq.J0) rb.add({{ix.u0(j), one}}, 0);
  for (size_t k = 0; k < K; ++k)
    if (!seq.K0.count(k)) rb.add({{ix.x0(k), one}}, 0);

  for (size_t j = 0; j < J; ++j) {
    Terms t;
    for (size_t k = 0; k < K; ++k)
      if (!d.A(k, j).is_zero()) t.push_back({ix.pN(k), d.A(k, j)});
    t.push_back({ix.qN(j), mone});
    rb.add(std::move(t), rho.gamma[j]);
  }
  for (size_t k : seq.KN1) rb.add({{ix.pN(k), one}}, 0);
  for (size_t j = 0; j < J; ++j)
    if (!seq.JN1.count(j)) rb.add({{ix.qN(j), one}}, 0);

  for (size_t n = 1; n < N; ++n) rb.add({{interval_var(d, seq, l, n), one}}, 0);

  {
    Terms t;
    for (size_t n = 1; n <= N; ++n) t.push_back({l.tau(n), one});
    rb.add(std::move(t), rho.T);
  }

  // State recurrences: x^n = x^{n-1} + xdot^n tau_n, q^n = q^{n+1} + qdot^{n+1} tau_{n+1}.
  for (size_t n = 1; n <= N; ++n)
    for (size_t k = 0; k < K; ++k) {
      Terms t{{l.x(n, k), one}, {l.x(n - 1, k), mone}};
      if (rates) {
        const Rational& r = (*rates)[n - 1].xdot[k];
        if (!r.is_zero()) t.push_back({l.tau(n), -r});
      }
      rb.add(std::move(t), 0);
    }
  for (size_t n = 0; n < N; ++n)
    for (size_t j = 0; j < J; ++j) {
      Terms t{{l.q(n, j), one}, {l.q(n + 1, j), mone}};
      if (rates) {
        const Rational& r = (*rates)[n].qdot[j];
        if (!r.is_zero()) t.push_back({l.tau(n + 1), -r});
      }
      rb.add(std::move(t), 0);
    }

  for (size_t k = 0; k < K; ++k) {
    Terms t;
    for (size_t j = 0; j < J; ++j)
      if (!d.A(k, j).is_zero()) t.push_back({ix.uN(j), d.A(k, j)});
    t.push_back({ix.xN(k), one});
    t.push_back({l.x(N, k), mone});
    rb.add(std::move(t), rho.lambda[k]);
  }
  for (size_t j : seq.JN1) rb.add({{ix.uN(j), one}}, 0);
  for (size_t k = 0; k < K; ++k)
    if (!seq.KN1.count(k)) rb.add({{ix.xN(k), one}}, 0);

  for (size_t j = 0; j < J; ++j) {
    Terms t;
    for (size_t k = 0; k < K; ++k)
      if (!d.A(k, j).is_zero()) t.push_back({ix.p0(k), d.A(k, j)});
    t.push_back({ix.q0(j), mone});
    t.push_back({l.q(0, j), one});
    rb.add(std::move(t), rho.mu[j]);
  }
  for (size_t k : seq.K0) rb.add({{ix.p0(k), one}}, 0);
  for (size_t j = 0; j < J; ++j)
    if (!seq.J0.count(j)) rb.add({{ix.q0(j), one}}, 0);
}

}  // namespace

std::string to_string(const BaseSequence& s) {
  std::ostringstream os;
  os << "(" << set_text(s.K0) << "," << set_text(s.J0) << ") [";
  for (size_t n = 0; n < s.bases.size(); ++n) os << (n ? " " : "") << to_string(s.bases[n]);
  os << "] (" << set_text(s.KN1) << "," << set_text(s.JN1) << ")";
  return os.str();
}

std::vector<RatesSolution> rates_for_sequence(const ProblemData& d, const BaseSequence& seq) {
  std::vector<RatesSolution> out;
  out.reserve(seq.N());
  for (const auto& b : seq.bases) out.push_back(rates_for_basis(d, b));
  return out;
}

void check_proper(const ProblemData& d, const BaseSequence& seq, const std::vector<RatesSolution>& rates) {
  const size_t N = seq.N();
  if (N == 0) throw ImproperSequence("sequence has no rates bases");
  for (size_t n = 0; n < N; ++n) {
    if (!basis_size_ok(d, seq.bases[n]))
      throw ImproperSequence("basis " + std::to_string(n + 1) + " has the wrong size");
    if (!is_admissible(rates[n])) throw ImproperSequence("basis " + std::to_string(n + 1) + " is not admissible");
  }
  for (size_t n = 1; n < N; ++n)
    if (!adjacency(seq.bases[n - 1], seq.bases[n], d.K, d.J))
      throw ImproperSequence("bases " + std::to_string(n) + " and " + std::to_string(n + 1) + " are not adjacent");
  if (!subset_of(seq.K0, seq.bases.front().K)) throw ImproperSequence("K0 is not contained in K1");
  if (!subset_of(seq.JN1, seq.bases.back().J)) throw ImproperSequence("J(N+1) is not contained in J(N)");
}

bool is_proper(const ProblemData& d, const BaseSequence& seq) {
  try {
    check_proper(d, seq, rates_for_sequence(d, seq));
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

size_t HLayout::index(const HComp& c) const {
  const size_t K = K_, J = J_, N = N_;
  const size_t base2 = 2 * J + 2 * K + N + N * K + N * J;
  auto need = [](bool ok) {
    if (!ok) throw std::out_of_range("H component out of range");
  };
  switch (c.block) {
    case HBlock::U0: need(c.i < J); return c.i;
    case HBlock::X0: need(c.i < K); return J + c.i;
    case HBlock::PN: need(c.i < K); return J + K + c.i;
    case HBlock::QN: need(c.i < J); return J + 2 * K + c.i;
    case HBlock::Tau: need(c.n >= 1 && c.n <= N); return 2 * J + 2 * K + c.n - 1;
    case HBlock::X: need(c.n >= 1 && c.n <= N && c.i < K); return 2 * J + 2 * K + N + (c.n - 1) * K + c.i;
    case HBlock::Q: need(c.n < N && c.i < J); return 2 * J + 2 * K + N + N * K + c.n * J + c.i;
    case HBlock::UN: need(c.i < J); return base2 + c.i;
    case HBlock::XN: need(c.i < K); return base2 + J + c.i;
    case HBlock::P0: need(c.i < K); return base2 + J + K + c.i;
    case HBlock::Q0: need(c.i < J); return base2 + J + 2 * K + c.i;
  }
  throw std::out_of_range("H component out of range");
}

HComp HLayout::comp(size_t idx) const {
  const size_t K = K_, J = J_, N = N_;
  if (idx >= size()) throw std::out_of_range("H index out of range");
  if (idx < J) return {HBlock::U0, 0, idx};
  idx -= J;
  if (idx < K) return {HBlock::X0, 0, idx};
  idx -= K;
  if (idx < K) return {HBlock::PN, 0, idx};
  idx -= K;
  if (idx < J) return {HBlock::QN, 0, idx};
  idx -= J;
  if (idx < N) return {HBlock::Tau, idx + 1, 0};
  idx -= N;
  if (idx < N * K) return {HBlock::X, idx / K + 1, idx % K};
  idx -= N * K;
  if (idx < N * J) return {HBlock::Q, idx / J, idx % J};
  idx -= N * J;
  if (idx < J) return {HBlock::UN, 0, idx};
  idx -= J;
  if (idx < K) return {HBlock::XN, 0, idx};
  idx -= K;
  if (idx < K) return {HBlock::P0, 0, idx};
  idx -= K;
  return {HBlock::Q0, 0, idx};
}

size_t HLayout::x(size_t n, size_t k) const {
  return n == 0 ? index({HBlock::X0, 0, k}) : index({HBlock::X, n, k});
}

size_t HLayout::q(size_t n, size_t j) const {
  return n == N_ ? index({HBlock::QN, 0, j}) : index({HBlock::Q, n, j});
}

std::string to_string(const HComp& c) {
  const std::string i = std::to_string(c.i + 1);
  switch (c.block) {
    case HBlock::U0: return "u0_" + i;
    case HBlock::X0: return "x^0_" + i;
    case HBlock::PN: return "pN_" + i;
    case HBlock::QN: return "q^N_" + i;
    case HBlock::Tau: return "tau_" + std::to_string(c.n);
    case HBlock::X: return "x^" + std::to_string(c.n) + "_" + i;
    case HBlock::Q: return "q^" + std::to_string(c.n) + "_" + i;
    case HBlock::UN: return "uN_" + i;
    case HBlock::XN: return "xN_" + i;
    case HBlock::P0: return "p0_" + i;
    case HBlock::Q0: return "q0_" + i;
  }
  return "?";
}

RatVector SolutionH::block(HBlock b) const {
  const bool isK = b == HBlock::X0 || b == HBlock::PN || b == HBlock::XN || b == HBlock::P0;
  const size_t len = isK ? layout.K() : layout.J();
  RatVector out(len);
  for (size_t i = 0; i < len; ++i) out[i] = h.at(layout.index({b, 0, i}));
  return out;
}

RatVector SolutionH::x_at(size_t n) const {
  RatVector out(layout.K());
  for (size_t k = 0; k < layout.K(); ++k) out[k] = x(n, k);
  return out;
}

RatVector SolutionH::q_at(size_t n) const {
  RatVector out(layout.J());
  for (size_t j = 0; j < layout.J(); ++j) out[j] = q(n, j);
  return out;
}

RatVector SolutionH::times() const {
  RatVector t(layout.N() + 1);
  for (size_t n = 1; n <= layout.N(); ++n) t[n] = t[n - 1] + tau(n);
  return t;
}

SolutionH axpy(const SolutionH& h, const Rational& a, const SolutionH& dh) {
  SolutionH out = h;
  for (size_t i = 0; i < out.h.size(); ++i) out.h[i] += a * dh.h[i];
  return out;
}

Assembly assemble(const ProblemData& d, const BaseSequence& seq, const std::vector<RatesSolution>& rates,
                  const BoundaryParams& rho) {
  check_proper(d, seq, rates);
  const size_t K = d.K, J = d.J, N = seq.N();
  Assembly a;
  a.layout = HLayout(K, J, N);
  RowBuilder rb(a.layout, true);
  build_rows(rb, d, seq, &rates, rho, a.layout);
  a.M = rb.matrix();
  a.R = rb.rhs();
  if (a.M.rows() != a.layout.size()) throw std::logic_error("structure matrix is not square");

  const HLayout& l = a.layout;
  Ix ix{l};
  a.zero.assign(l.size(), false);
  for (size_t j : seq.J0) a.zero[ix.u0(j)] = true;
  for (size_t k = 0; k < K; ++k)
    if (!seq.K0.count(k)) a.zero[ix.x0(k)] = true;
  for (size_t k : seq.KN1) a.zero[ix.pN(k)] = true;
  for (size_t j = 0; j < J; ++j)
    if (!seq.JN1.count(j)) a.zero[ix.qN(j)] = true;
  for (size_t j : seq.JN1) a.zero[ix.uN(j)] = true;
  for (size_t k = 0; k < K; ++k)
    if (!seq.KN1.count(k)) a.zero[ix.xN(k)] = true;
  for (size_t k : seq.K0) a.zero[ix.p0(k)] = true;
  for (size_t j = 0; j < J; ++j)
    if (!seq.J0.count(j)) a.zero[ix.q0(j)] = true;
  for (size_t n = 1; n < N; ++n) a.zero[interval_var(d, seq, l, n)] = true;
  for (size_t n = 1; n <= N; ++n)
    for (size_t k = 0; k < K; ++k)
      if (!seq.bases[n - 1].K.count(k)) a.zero[l.x(n, k)] = true;
  for (size_t n = 0; n < N; ++n)
    for (size_t j = 0; j < J; ++j)
      if (!seq.bases[n].J.count(j)) a.zero[l.q(n, j)] = true;
  for (size_t r = 0; r < l.size(); ++r) (a.zero[r] ? a.hz : a.hp).push_back(r);
  return a;
}

RatVector build_rhs(const ProblemData& d, const BaseSequence& seq, const BoundaryParams& rho) {
  HLayout l(d.K, d.J, seq.N());
  RowBuilder rb(l, false);
  build_rows(rb, d, seq, nullptr, rho, l);
  return rb.rhs();
}

SolutionH solve_structure(const Assembly& a) { return {a.layout, solve_linear(a.M, a.R)}; }

SolutionH gradient(const Assembly& a, const RatVector& dR) { return {a.layout, solve_linear(a.M, dR)}; }

RatioResult ratio_step(const SolutionH& H, const SolutionH& dH, const std::vector<size_t>& hp) {
  RatioResult res;
  Rational best;  // largest -dH_r/H_r seen so far
  for (size_t r : hp) {
    const Rational& h = H.h[r];
    const Rational& dh = dH.h[r];
    if (h.sign() < 0) throw std::logic_error("negative component " + to_string(H.layout.comp(r)));
    if (h.is_zero()) {
      if (dh.sign() <= 0) throw std::logic_error("component " + to_string(H.layout.comp(r)) + " is stuck at zero");
      continue;
    }
    if (dh.sign() >= 0) continue;
    Rational v = -dh / h;
    if (res.argmax.empty() || v > best) {
      best = v;
      res.argmax = {r};
    } else if (v == best) {
      res.argmax.push_back(r);
    }
  }
  if (!res.argmax.empty()) res.delta = best.inverse();
  return res;
}

Decomposition decompose(const BaseSequence& seq, const std::vector<RatesSolution>& rates, const SolutionH& H,
                        const std::vector<bool>& zero) {
  const HLayout& l = H.layout;
  const size_t K = l.K(), J = l.J(), N = l.N();
  Decomposition d;
  d.xt.resize(K);
  d.qt.resize(J);
  d.xb.resize(K);
  d.qb.resize(J);
  d.Ut.assign(J, Rational());
  d.Pt.assign(K, Rational());
  for (size_t k = 0; k < K; ++k) {
    Rational m = H.x(0, k);
    for (size_t n = 1; n <= N; ++n) m = min(m, H.x(n, k));
    d.xb[k] = m;
    d.xt[k] = H.x(0, k) - m;
  }
  for (size_t j = 0; j < J; ++j) {
    Rational m = H.q(N, j);
    for (size_t n = 0; n < N; ++n) m = min(m, H.q(n, j));
    d.qb[j] = m;
    d.qt[j] = H.q(N, j) - m;
  }
  for (size_t n = 1; n <= N; ++n) {
    for (size_t j = 0; j < J; ++j) d.Ut[j] += rates[n - 1].u[j] * H.tau(n);
    for (size_t k = 0; k < K; ++k) d.Pt[k] += rates[n - 1].p[k] * H.tau(n);
  }
  for (size_t k : seq.K0) {
    bool tied = false;
    for (size_t n = 1; n <= N && !tied; ++n) tied = zero[l.x(n, k)];
    (tied ? d.Ktied : d.Kfree).insert(k);
  }
  for (size_t j : seq.JN1) {
    bool tied = false;
    for (size_t n = 0; n < N && !tied; ++n) tied = zero[l.q(n, j)];
    (tied ? d.Jtied : d.Jfree).insert(j);
  }
  return d;
}

Evaluation evaluate(const ProblemData& d, const BaseSequence& seq, const std::vector<RatesSolution>& rates,
                    const SolutionH& H, const Rational& t) {
  (void)seq;
  const HLayout& l = H.layout;
  const size_t K = d.K, J = d.J, N = l.N();
  const RatVector times = H.times();
  const Rational T = times[N];
  if (t.sign() < 0 || t > T) throw std::out_of_range("time outside [0,T]");
  Evaluation e;

  // Primal side is right-continuous; t = T includes the final impulse.
  e.U = H.block(HBlock::U0);
  e.x.resize(K);
  if (t == T) {
    for (size_t n = 1; n <= N; ++n)
      for (size_t j = 0; j < J; ++j) e.U[j] += rates[n - 1].u[j] * H.tau(n);
    RatVector uN = H.block(HBlock::UN);
    for (size_t j = 0; j < J; ++j) e.U[j] += uN[j];
    e.x = H.block(HBlock::XN);
  } else {
    size_t n = 1;
    while (n < N && !(t < times[n])) ++n;
    for (size_t m = 1; m < n; ++m)
      for (size_t j = 0; j < J; ++j) e.U[j] += rates[m - 1].u[j] * H.tau(m);
    Rational s = t - times[n - 1];
    for (size_t j = 0; j < J; ++j) e.U[j] += rates[n - 1].u[j] * s;
    for (size_t k = 0; k < K; ++k) e.x[k] = H.x(n - 1, k) + rates[n - 1].xdot[k] * s;
  }

  // Dual side runs in reversed time s = T - t; t = 0 is dual time T and includes the impulse p0.
  e.P = H.block(HBlock::PN);
  e.q.resize(J);
  if (t.is_zero()) {
    for (size_t n = 1; n <= N; ++n)
      for (size_t k = 0; k < K; ++k) e.P[k] += rates[n - 1].p[k] * H.tau(n);
    RatVector p0 = H.block(HBlock::P0);
    for (size_t k = 0; k < K; ++k) e.P[k] += p0[k];
    e.q = H.block(HBlock::Q0);
  } else {
    // Interval n covers primal (t_{n-1}, t_n]; dual accumulates from T backwards.
    size_t n = N;
    while (n > 1 && !(times[n - 1] < t)) --n;
    for (size_t m = n + 1; m <= N; ++m)
      for (size_t k = 0; k < K; ++k) e.P[k] += rates[m - 1].p[k] * H.tau(m);
    Rational s = times[n] - t;
    for (size_t k = 0; k < K; ++k) e.P[k] += rates[n - 1].p[k] * s;
    for (size_t j = 0; j < J; ++j) e.q[j] = H.q(n, j) + rates[n - 1].qdot[j] * s;
  }
  return e;
}

Objectives objectives(const ProblemData& d, const std::vector<RatesSolution>& rates, const SolutionH& H,
                      const BoundaryParams& rho) {
  const size_t K = d.K, J = d.J, N = H.layout.N();
  const RatVector t = H.times();
  const Rational& T = rho.T;
  Objectives o;
  RatVector u0 = H.block(HBlock::U0), uN = H.block(HBlock::UN);
  RatVector pN = H.block(HBlock::PN), p0 = H.block(HBlock::P0);
  for (size_t j = 0; j < J; ++j) {
    o.primal += (rho.mu[j] + rho.gamma[j] + d.c[j] * T) * u0[j] + rho.gamma[j] * uN[j];
    for (size_t n = 1; n <= N; ++n) {
      Rational a = T - t[n - 1], b = T - t[n];
      o.primal += (rho.gamma[j] * H.tau(n) + d.c[j] * (a * a - b * b) / 2) * rates[n - 1].u[j];
    }
  }
  for (size_t k = 0; k < K; ++k) {
    o.dual += (rho.lambda[k] + rho.beta[k] + d.b[k] * T) * pN[k] + rho.beta[k] * p0[k];
    for (size_t n = 1; n <= N; ++n)
      o.dual += (rho.beta[k] * H.tau(n) + d.b[k] * (t[n] * t[n] - t[n - 1] * t[n - 1]) / 2) * rates[n - 1].p[k];
  }
  return o;
}

Certificate certify_optimal(const ProblemData& d, const BaseSequence& seq, const std::vector<RatesSolution>& rates,
                            const SolutionH& H, const BoundaryParams& rho) {
  const HLayout& l = H.layout;
  const size_t K = d.K, J = d.J, N = l.N();
  Certificate c;
  auto fail = [&](const std::string& what) {
    c.ok = false;
    c.violation = what;
    return c;
  };
  if (N != seq.N() || rates.size() != N || H.h.size() != l.size()) return fail("dimension mismatch");

  for (size_t r = 0; r < l.size(); ++r)
    if (H.h[r].sign() < 0) return fail("negative " + to_string(l.comp(r)));
  for (size_t n = 0; n < N; ++n)
    if (!is_admissible(rates[n])) return fail("inadmissible rates in interval " + std::to_string(n + 1));

  const RatVector t = H.times();
  if (t[N] != rho.T) return fail("interval lengths do not sum to T");

  // Primal feasibility at every breakpoint and at T.
  RatVector U = H.block(HBlock::U0);
  for (size_t n = 0; n <= N; ++n) {
    if (n > 0)
      for (size_t j = 0; j < J; ++j) U[j] += rates[n - 1].u[j] * H.tau(n);
    for (size_t k = 0; k < K; ++k) {
      Rational lhs = H.x(n, k);
      for (size_t j = 0; j < J; ++j) lhs += d.A(k, j) * U[j];
      if (lhs != rho.beta[k] + d.b[k] * t[n])
        return fail("primal residual at breakpoint " + std::to_string(n) + " row " + std::to_string(k + 1));
    }
  }
  {
    RatVector uN = H.block(HBlock::UN), xN = H.block(HBlock::XN);
    for (size_t k = 0; k < K; ++k) {
      Rational lhs = xN[k];
      for (size_t j = 0; j < J; ++j) lhs += d.A(k, j) * (U[j] + uN[j]);
      if (lhs != rho.beta[k] + d.b[k] * rho.T + rho.lambda[k])
        return fail("primal residual at T row " + std::to_string(k + 1));
    }
  }

  // Dual feasibility in dual time s = T - t_n.
  RatVector P = H.block(HBlock::PN);
  for (size_t n = N + 1; n-- > 0;) {
    if (n < N)
      for (size_t k = 0; k < K; ++k) P[k] += rates[n].p[k] * H.tau(n + 1);
    for (size_t j = 0; j < J; ++j) {
      Rational lhs = -H.q(n, j);
      for (size_t k = 0; k < K; ++k) lhs += d.A(k, j) * P[k];
      if (lhs != rho.gamma[j] + d.c[j] * (rho.T - t[n]))
        return fail("dual residual at breakpoint " + std::to_string(n) + " column " + std::to_string(j + 1));
    }
  }
  {
    RatVector p0 = H.block(HBlock::P0), q0 = H.block(HBlock::Q0);
    for (size_t j = 0; j < J; ++j) {
      Rational lhs = -q0[j];
      for (size_t k = 0; k < K; ++k) lhs += d.A(k, j) * (P[k] + p0[k]);
      if (lhs != rho.gamma[j] + d.c[j] * rho.T + rho.mu[j])
        return fail("dual residual at dual time T column " + std::to_string(j + 1));
    }
  }

  // Complementary slackness.
  if (!dot(H.block(HBlock::XN), H.block(HBlock::PN)).is_zero()) return fail("complementary slackness xN.pN");
  if (!dot(H.x_at(0), H.block(HBlock::P0)).is_zero()) return fail("complementary slackness x0.p0");
  if (!dot(H.block(HBlock::Q0), H.block(HBlock::U0)).is_zero()) return fail("complementary slackness q0.u0");
  if (!dot(H.q_at(N), H.block(HBlock::UN)).is_zero()) return fail("complementary slackness qN.uN");
  for (size_t n = 1; n <= N; ++n) {
    if (H.tau(n).is_zero()) continue;
    RatVector xs = H.x_at(n - 1), qs = H.q_at(n - 1);
    RatVector xe = H.x_at(n), qe = H.q_at(n);
    for (size_t k = 0; k < K; ++k) xs[k] += xe[k];
    for (size_t j = 0; j < J; ++j) qs[j] += qe[j];
    if (!dot(xs, rates[n - 1].p).is_zero())
      return fail("complementary slackness x.p in interval " + std::to_string(n));
    if (!dot(qs, rates[n - 1].u).is_zero())
      return fail("complementary slackness q.u in interval " + std::to_string(n));
  }

  c.value = objectives(d, rates, H, rho);
  if (c.value.primal != c.value.dual) return fail("duality gap");
  c.ok = true;
  return c;
}

size_t zero_boundary_count(const SolutionH& H) {
  size_t n = 0;
  for (HBlock b : {HBlock::U0, HBlock::X0, HBlock::PN, HBlock::QN, HBlock::UN, HBlock::XN, HBlock::P0, HBlock::Q0})
    for (const auto& v : H.block(b))
      if (v.is_zero()) ++n;
  return n;
}

}  // namespace mclp
