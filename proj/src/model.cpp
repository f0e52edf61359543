#include "mclp/model.hpp"

#include <optional>
#include <sstream>

#include "mclp/lp.hpp"
#include "mclp/subsets.hpp"

namespace mclp {

namespace {

RatVector combine(const RatVector& a, const RatVector& b, const Rational& sa, const Rational& sb) {
  RatVector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = sa * a[i] + sb * b[i];
  return out;
}

std::string subset_text(const std::vector<size_t>& s) {
  std::ostringstream os;
  os << '{';
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << '}';
  return os.str();
}

// Returns a subset of fewer than rows(M) columns of [M I] whose span contains v, if any.
std::optional<std::vector<size_t>> spanning_subset(const RatMatrix& m, const RatVector& v) {
  const size_t rows = m.rows(), total = m.cols() + rows;
  auto column = [&](size_t j, size_t i) -> Rational {
    if (j < m.cols()) return m(i, j);
    return (j - m.cols()) == i ? Rational(1) : Rational(0);
  };
  if (rows == 0) return std::nullopt;
  std::optional<std::vector<size_t>> found;
  for_each_subset(total, rows - 1, [&](const std::vector<size_t>& s) {
    RatMatrix sub(rows, s.size()), aug(rows, s.size() + 1);
    for (size_t i = 0; i < rows; ++i) {
      for (size_t k = 0; k < s.size(); ++k) {
        sub(i, k) = column(s[k], i);
        aug(i, k) = sub(i, k);
      }
      aug(i, s.size()) = v[i];
    }
    if (rank(sub) == rank(aug)) {
      found = s;
      return true;
    }
    return false;
  });
  return found;
}

}  // namespace

BoundaryParams operator+(const BoundaryParams& a, const BoundaryParams& b) {
  return {combine(a.beta, b.beta, 1, 1), combine(a.gamma, b.gamma, 1, 1), a.T + b.T,
          combine(a.lambda, b.lambda, 1, 1), combine(a.mu, b.mu, 1, 1)};
}

BoundaryParams operator-(const BoundaryParams& a, const BoundaryParams& b) {
  return {combine(a.beta, b.beta, 1, -1), combine(a.gamma, b.gamma, 1, -1), a.T - b.T,
          combine(a.lambda, b.lambda, 1, -1), combine(a.mu, b.mu, 1, -1)};
}

BoundaryParams operator*(const Rational& s, const BoundaryParams& a) {
  return {combine(a.beta, a.beta, s, 0), combine(a.gamma, a.gamma, s, 0), s * a.T,
          combine(a.lambda, a.lambda, s, 0), combine(a.mu, a.mu, s, 0)};
}

BoundaryParams ParamLine::at(const Rational& theta) const {
  if (theta.is_zero()) return start;
  if (theta == 1) return goal;
  return (Rational(1) - theta) * start + theta * goal;
}

DegeneracyError::DegeneracyError(const std::string& which, std::vector<size_t> subset)
    : std::runtime_error(which + " lies in the span of columns " + subset_text(subset)), subset_(std::move(subset)) {}

void check_dimensions(const ProblemData& d, const BoundaryParams& rho) {
  if (d.K == 0 || d.J == 0) throw std::invalid_argument("K and J must be positive");
  if (d.A.rows() != d.K || d.A.cols() != d.J || d.b.size() != d.K || d.c.size() != d.J)
    throw std::invalid_argument("problem data dimensions are inconsistent");
  if (rho.beta.size() != d.K || rho.lambda.size() != d.K || rho.gamma.size() != d.J || rho.mu.size() != d.J)
    throw std::invalid_argument("boundary parameter dimensions are inconsistent");
}

void check_nondegenerate(const ProblemData& d) {
  if (auto s = spanning_subset(d.A, d.b)) throw DegeneracyError("b", *s);
  if (auto s = spanning_subset(d.A.transpose(), d.c)) throw DegeneracyError("c", *s);
}

void check_signs(const BoundaryParams& rho) {
  if (rho.T.sign() <= 0) throw SignError("T must be positive");
  for (size_t k = 0; k < rho.lambda.size(); ++k)
    if (rho.lambda[k].sign() > 0) throw SignError("lambda_" + std::to_string(k + 1) + " must be <= 0");
  for (size_t j = 0; j < rho.mu.size(); ++j)
    if (rho.mu[j].sign() < 0) throw SignError("mu_" + std::to_string(j + 1) + " must be >= 0");
}

void validate(const ProblemData& d, const BoundaryParams& rho) {
  check_dimensions(d, rho);
  check_signs(rho);
  check_nondegenerate(d);
}

ProblemData perturb(const ProblemData& d, const Rational& eps) {
  if (eps.sign() <= 0) throw std::invalid_argument("perturbation size must be positive");
  Rational e = eps < Rational(1, 2) ? eps : Rational(1, 2);
  for (int attempt = 0; attempt < 64; ++attempt, e /= 2) {
    ProblemData p = d;
    Rational power = e;
    for (size_t k = 0; k < d.K; ++k, power *= e) p.b[k] += power;
    for (size_t j = 0; j < d.J; ++j, power *= e) p.c[j] += power;
    try {
      check_nondegenerate(p);
      return p;
    } catch (const DegeneracyError&) {
    }
  }
  throw std::runtime_error("perturbation failed to reach general position");
}

const char* to_string(Feasibility f) {
  switch (f) {
    case Feasibility::BothFeasible: return "both feasible";
    case Feasibility::PrimalInfeasible: return "primal infeasible";
    case Feasibility::DualInfeasible: return "dual infeasible";
    case Feasibility::BothInfeasible: return "both infeasible";
  }
  return "?";
}

bool primal_feasible(const ProblemData& d, const BoundaryParams& rho) {
  const size_t K = d.K, J = d.J;
  LpInstance lp;
  lp.matrix = RatMatrix(2 * K, 2 * J);
  lp.rhs.resize(2 * K);
  lp.relations.assign(2 * K, Relation::LE);
  lp.classes.assign(2 * J, SignClass::P);
  lp.objective.resize(2 * J);
  for (size_t k = 0; k < K; ++k) {
    for (size_t j = 0; j < J; ++j) {
      lp.matrix(k, j) = d.A(k, j);
      lp.matrix(K + k, j) = d.A(k, j);
      lp.matrix(K + k, J + j) = d.A(k, j);
    }
    lp.rhs[k] = rho.beta[k];
    lp.rhs[K + k] = rho.beta[k] + d.b[k] * rho.T + rho.lambda[k];
  }
  for (size_t j = 0; j < J; ++j) {
    lp.objective[j] = rho.gamma[j] + d.c[j] * rho.T + rho.mu[j];
    lp.objective[J + j] = rho.gamma[j] + d.c[j] * rho.T;
  }
  return solve_lp(lp).status != LpStatus::Infeasible;
}

bool dual_feasible(const ProblemData& d, const BoundaryParams& rho) {
  const size_t K = d.K, J = d.J;
  LpInstance lp;
  lp.sense = Sense::Min;
  lp.matrix = RatMatrix(2 * J, 2 * K);
  lp.rhs.resize(2 * J);
  lp.relations.assign(2 * J, Relation::GE);
  lp.classes.assign(2 * K, SignClass::P);
  lp.objective.resize(2 * K);
  for (size_t j = 0; j < J; ++j) {
    for (size_t k = 0; k < K; ++k) {
      lp.matrix(j, k) = d.A(k, j);
      lp.matrix(J + j, k) = d.A(k, j);
      lp.matrix(J + j, K + k) = d.A(k, j);
    }
    lp.rhs[j] = rho.gamma[j];
    lp.rhs[J + j] = rho.gamma[j] + d.c[j] * rho.T + rho.mu[j];
  }
  for (size_t k = 0; k < K; ++k) {
    lp.objective[k] = rho.beta[k] + d.b[k] * rho.T + rho.lambda[k];
    lp.objective[K + k] = rho.beta[k] + d.b[k] * rho.T;
  }
  return solve_lp(lp).status != LpStatus::Infeasible;
}

Feasibility feasibility_check(const ProblemData& d, const BoundaryParams& rho) {
  bool p = primal_feasible(d, rho), q = dual_feasible(d, rho);
  if (p && q) return Feasibility::BothFeasible;
  if (!p && !q) return Feasibility::BothInfeasible;
  return p ? Feasibility::DualInfeasible : Feasibility::PrimalInfeasible;
}

}  // namespace mclp
