#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mclp/rates.hpp"

namespace mclp {

struct BaseSequence {
  IndexSet K0, J0;    // (K_0, J_0)
  IndexSet KN1, JN1;  // (K_{N+1}, J_{N+1})
  std::vector<RatesBasis> bases;

  size_t N() const { return bases.size(); }
  friend bool operator==(const BaseSequence&, const BaseSequence&) = default;
};

// Paper-style rendering: (K0,J0),[(K1,J1),...],(KN+1,JN+1)
std::string to_string(const BaseSequence& s);

class ImproperSequence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<RatesSolution> rates_for_sequence(const ProblemData& data, const BaseSequence& seq);
// Throws ImproperSequence describing the first failed condition.
void check_proper(const ProblemData& data, const BaseSequence& seq, const std::vector<RatesSolution>& rates);
bool is_proper(const ProblemData& data, const BaseSequence& seq);

// Blocks of H in the order used by the unknown vector.
enum class HBlock { U0, X0, PN, QN, Tau, X, Q, UN, XN, P0, Q0 };

struct HComp {
  HBlock block;
  size_t n = 0;  // breakpoint index for X (1..N), Q (0..N-1); interval index for Tau (1..N)
  size_t i = 0;  // component index (0-based); unused for Tau
  friend bool operator==(const HComp&, const HComp&) = default;
  friend auto operator<=>(const HComp&, const HComp&) = default;
};

class HLayout {
 public:
  HLayout() = default;
  HLayout(size_t K, size_t J, size_t N) : K_(K), J_(J), N_(N) {}
  size_t K() const { return K_; }
  size_t J() const { return J_; }
  size_t N() const { return N_; }
  size_t size() const { return (J_ + K_) * (N_ + 4) + N_; }

  size_t index(const HComp& c) const;
  HComp comp(size_t idx) const;
  // x^n for n = 0..N (n = 0 is x^0) and q^n for n = 0..N (n = N is q^N).
  size_t x(size_t n, size_t k) const;
  size_t q(size_t n, size_t j) const;
  size_t tau(size_t n) const { return index({HBlock::Tau, n, 0}); }

 private:
  size_t K_ = 0, J_ = 0, N_ = 0;
};

std::string to_string(const HComp& c);

struct SolutionH {
  HLayout layout;
  RatVector h;

  const Rational& operator[](const HComp& c) const { return h.at(layout.index(c)); }
  RatVector block(HBlock b) const;
  const Rational& tau(size_t n) const { return h.at(layout.tau(n)); }
  const Rational& x(size_t n, size_t k) const { return h.at(layout.x(n, k)); }
  const Rational& q(size_t n, size_t j) const { return h.at(layout.q(n, j)); }
  RatVector x_at(size_t n) const;
  RatVector q_at(size_t n) const;
  // Breakpoint times t_0..t_N.
  RatVector times() const;
};

SolutionH axpy(const SolutionH& h, const Rational& a, const SolutionH& dh);

struct Assembly {
  HLayout layout;
  RatMatrix M;
  RatVector R;
  std::vector<size_t> hz, hp;
  std::vector<bool> zero;  // zero[r] iff r in hz
};

Assembly assemble(const ProblemData& data, const BaseSequence& seq, const std::vector<RatesSolution>& rates,
                  const BoundaryParams& rho);
// Right-hand side for arbitrary parameters (linear in rho); used for gradients.
RatVector build_rhs(const ProblemData& data, const BaseSequence& seq, const BoundaryParams& rho);

SolutionH solve_structure(const Assembly& a);
SolutionH gradient(const Assembly& a, const RatVector& dR);

struct RatioResult {
  std::optional<Rational> delta;  // nullopt means unbounded (+infinity)
  std::vector<size_t> argmax;
};

// 1/delta = max over hp of (0, -dH_r/H_r); components at zero with dH_r > 0 are ignored.
RatioResult ratio_step(const SolutionH& H, const SolutionH& dH, const std::vector<size_t>& hp);

struct Decomposition {
  RatVector xt, qt;    // x-tilde, q-tilde
  RatVector Ut, Pt;    // U-tilde, P-tilde
  RatVector xb, qb;    // x-bullet, q-bullet
  IndexSet Ktied, Kfree, Jtied, Jfree;
};

Decomposition decompose(const BaseSequence& seq, const std::vector<RatesSolution>& rates, const SolutionH& H,
                        const std::vector<bool>& zero);

struct Evaluation {
  RatVector x, q, U, P;
};

Evaluation evaluate(const ProblemData& data, const BaseSequence& seq, const std::vector<RatesSolution>& rates,
                    const SolutionH& H, const Rational& t);

struct Objectives {
  Rational primal, dual;
};

Objectives objectives(const ProblemData& data, const std::vector<RatesSolution>& rates, const SolutionH& H,
                      const BoundaryParams& rho);

struct Certificate {
  bool ok = false;
  std::string violation;  // names the failing component when !ok
  Objectives value;
};

Certificate certify_optimal(const ProblemData& data, const BaseSequence& seq, const std::vector<RatesSolution>& rates,
                            const SolutionH& H, const BoundaryParams& rho);

// Number of zero values among the 4(K+J) boundary values.
size_t zero_boundary_count(const SolutionH& H);

}  // namespace mclp
