#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mclp/structural.hpp"

namespace mclp {

enum class CollisionKind { A, B, C, D, E, F, MultiplePre, MultipleAt, MultiplePost };
const char* to_string(CollisionKind k);
std::optional<CollisionKind> collision_kind_from_string(const std::string& s);

// Boundary-LP variables: primal x*, u0, xN, uN and dual q*, pN, q0, p0 (x* and q* are the bullet levels).
enum class BKind { Xb, XN, U0, UN, Q0, PN, Qb, P0 };

struct BVar {
  BKind kind;
  size_t index;
  friend bool operator==(const BVar&, const BVar&) = default;
  friend auto operator<=>(const BVar&, const BVar&) = default;
};

bool is_primal(const BVar& v);
BVar partner(const BVar& v);
std::string to_string(const BVar& v);

struct Collision {
  CollisionKind kind = CollisionKind::MultiplePre;
  std::vector<HComp> shrinking;
  std::optional<std::pair<size_t, size_t>> span;  // (n*, n**), 1-based interval indices
  std::optional<BVar> becoming_free;             // kind D: Xb_k or Qb_j
  std::optional<BVar> boundary;                  // kinds E and F: the shrinking boundary variable
};

Collision classify_collision(const ProblemData& data, const BaseSequence& seq, const std::vector<RatesSolution>& rates,
                             const SolutionH& Hbar, const std::vector<bool>& zero, const Decomposition& dec);

struct BoundaryDictionary {
  std::vector<BVar> rows;  // primal basic, ordered x*, xN, u0, uN
  std::vector<BVar> cols;  // dual basic, ordered q0, pN, q*, p0
  RatVector row_values, col_values;
  RatMatrix Ahat;  // B^-1 N

  std::optional<size_t> row_of(const BVar& v) const;
  std::optional<size_t> col_of(const BVar& v) const;
  Rational value(const BVar& v) const;  // zero when non-basic
};

// Which tied indices take the alternative role under the arbitrary-subset rule.
struct DictChoice {
  IndexSet p0_from_tied;  // k in K= whose p0_k is dual basic
  IndexSet uN_from_tied;  // j in J= whose uN_j is primal basic
  friend bool operator==(const DictChoice&, const DictChoice&) = default;
};

class CountingViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Candidate choices, fewest tied swaps first and lexicographic within; `keep` variables must stay basic (x*/q* side),
// `prefer` variables must take the alternative role whenever the counts allow it.
std::vector<DictChoice> dictionary_choices(const ProblemData& data, const BaseSequence& seq, const Decomposition& dec,
                                           const std::vector<BVar>& keep = {}, const std::vector<BVar>& prefer = {});

BoundaryDictionary build_dictionary(const ProblemData& data, const BaseSequence& seq, const Decomposition& dec,
                                    const SolutionH& Hbar, const DictChoice& choice);
// Checks B^-1 N = (B*^-1 N*)^T against the dual coefficient matrix.
bool compatibility_holds(const ProblemData& data, const BoundaryDictionary& dict);

enum class PivotKind { None, Internal, TypeI, TypeII };
const char* to_string(PivotKind k);

struct BoundaryStep {
  PivotKind kind = PivotKind::TypeI;
  BVar leaving{BKind::Xb, 0};
  std::optional<BVar> entering;       // w (type II)
  std::optional<BVar> leaving_other;  // w* (type II)
  std::optional<Rational> ratio;
  std::optional<BVar> vprime;
  BoundaryDictionary before, after;
};
std::string describe(const BoundaryStep& st);

// Breakpoint position (index into kept) of the unique minimum of x_k or q_j over the kept breakpoints;
// nullopt when the minimum is attained more than once.
std::optional<size_t> unique_minimizer(const SolutionH& H, const std::vector<size_t>& kept, const BVar& w);

class NeedsRestart : public std::runtime_error {
 public:
  NeedsRestart(CollisionKind reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}
  CollisionKind reason() const { return reason_; }
  bool subproblem() const { return sub_; }
  static NeedsRestart subproblem_required(const std::string& what) {
    NeedsRestart e(CollisionKind::MultiplePre, what);
    e.sub_ = true;
    return e;
  }

 private:
  CollisionKind reason_;
  bool sub_ = false;
};

// Boundary pivot on the dictionary. Throws NeedsRestart(MultipleAt) on ties in the ratio test.
BoundaryStep boundary_pivot(const BoundaryDictionary& dict, const BVar& v);

struct BoundarySets {
  IndexSet K0, J0, KN1, JN1;
};

BoundarySets new_boundary_sets(const BoundaryDictionary& after, const Decomposition& dec, const std::optional<BVar>& vprime);

struct PivotOptions {
  size_t max_insert = 1;              // longest inserted chain tried
  std::optional<DictChoice> choice;   // overrides the lexicographic dictionary choice
};

struct PivotResult {
  BaseSequence seq;
  PivotKind kind = PivotKind::None;
  CollisionKind wkind = CollisionKind::A;
  std::optional<BoundaryStep> step;
  std::string note;
};

// True iff seq is proper and its solution at rho is lexicographically nonnegative on H_P in direction drho.
bool certifies_past(const ProblemData& data, const BaseSequence& seq, const BoundaryParams& rho,
                    const BoundaryParams& drho);

// Inserts a chain of up to max_insert bases at position pos (between B_pos and B_pos+1) and returns the
// certified candidates, shortest first.
std::vector<BaseSequence> insertion_candidates(const ProblemData& data, const BaseSequence& seq, size_t pos,
                                               const BoundaryParams& rho, const BoundaryParams& drho,
                                               size_t max_insert);

// Dictionary choices of a boundary pivot with a regular basis (empty for internal pivots).
std::vector<DictChoice> pivot_choices(const ProblemData& data, const BaseSequence& seq,
                                      const std::vector<RatesSolution>& rates, const Collision& coll,
                                      const SolutionH& Hbar, const std::vector<bool>& zero);

PivotResult mclp_pivot(const ProblemData& data, const BaseSequence& seq, const std::vector<RatesSolution>& rates,
                       const Collision& coll, const SolutionH& Hbar, const std::vector<bool>& zero,
                       const BoundaryParams& rho_bar, const BoundaryParams& drho, const PivotOptions& opts = {});

}  // namespace mclp
