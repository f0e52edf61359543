#include "mclp/rates.hpp"

#include <sstream>

namespace mclp {

std::string set_text(const IndexSet& s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (size_t i : s) {
    os << (first ? "" : ",") << i + 1;
    first = false;
  }
  os << '}';
  return os.str();
}

std::string to_string(const RatesBasis& b) { return "(" + set_text(b.K) + "," + set_text(b.J) + ")"; }

std::string to_string(const RateVar& v) {
  static const char* names[] = {"u", "xdot", "p", "qdot"};
  return std::string(names[static_cast<int>(v.kind)]) + "_" + std::to_string(v.index + 1);
}

bool basis_size_ok(const ProblemData& d, const RatesBasis& b) {
  for (size_t k : b.K)
    if (k >= d.K) return false;
  for (size_t j : b.J)
    if (j >= d.J) return false;
  return b.K.size() + (d.J - b.J.size()) == d.K;
}

RatesSolution rates_for_basis(const ProblemData& d, const RatesBasis& b) {
  if (!basis_size_ok(d, b)) throw std::invalid_argument("rates basis " + to_string(b) + " has the wrong size");
  const size_t K = d.K, J = d.J;
  RatesSolution s{RatVector(J), RatVector(K), RatVector(K), RatVector(J)};

  // A u + xdot = b over u_j (j not in Jset) and xdot_k (k in Kset).
  RatMatrix mp(K, K);
  std::vector<RateVar> pv;
  for (size_t j = 0; j < J; ++j)
    if (!b.J.count(j)) pv.push_back({RateKind::U, j});
  for (size_t k : b.K) pv.push_back({RateKind::Xdot, k});
  for (size_t c = 0; c < K; ++c)
    for (size_t r = 0; r < K; ++r)
      mp(r, c) = pv[c].kind == RateKind::U ? d.A(r, pv[c].index) : Rational(r == pv[c].index ? 1 : 0);
  RatVector xp = solve_linear(mp, d.b);
  for (size_t c = 0; c < K; ++c) (pv[c].kind == RateKind::U ? s.u : s.xdot)[pv[c].index] = xp[c];

  // A^T p - qdot = c over p_k (k not in Kset) and qdot_j (j in Jset).
  RatMatrix md(J, J);
  std::vector<RateVar> dv;
  for (size_t k = 0; k < K; ++k)
    if (!b.K.count(k)) dv.push_back({RateKind::P, k});
  for (size_t j : b.J) dv.push_back({RateKind::Qdot, j});
  for (size_t c = 0; c < J; ++c)
    for (size_t r = 0; r < J; ++r)
      md(r, c) = dv[c].kind == RateKind::P ? d.A(dv[c].index, r) : Rational(r == dv[c].index ? -1 : 0);
  RatVector xd = solve_linear(md, d.c);
  for (size_t c = 0; c < J; ++c) (dv[c].kind == RateKind::P ? s.p : s.qdot)[dv[c].index] = xd[c];
  return s;
}

bool is_admissible(const RatesSolution& s) {
  for (const auto& v : s.u)
    if (v.sign() < 0) return false;
  for (const auto& v : s.p)
    if (v.sign() < 0) return false;
  return true;
}

std::optional<Exchange> adjacency(const RatesBasis& b1, const RatesBasis& b2, size_t K, size_t J) {
  auto primal_basic = [&](const RatesBasis& b) {
    std::set<RateVar> s;
    for (size_t k : b.K) s.insert({RateKind::Xdot, k});
    for (size_t j = 0; j < J; ++j)
      if (!b.J.count(j)) s.insert({RateKind::U, j});
    return s;
  };
  (void)K;
  auto s1 = primal_basic(b1), s2 = primal_basic(b2);
  std::vector<RateVar> out, in;
  for (const auto& v : s1)
    if (!s2.count(v)) out.push_back(v);
  for (const auto& v : s2)
    if (!s1.count(v)) in.push_back(v);
  if (out.size() != 1 || in.size() != 1) return std::nullopt;
  return Exchange{out[0], in[0]};
}

}  // namespace mclp
