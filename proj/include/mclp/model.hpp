#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mclp/linalg.hpp"

namespace mclp {

struct ProblemData {
  size_t K = 0, J = 0;
  RatMatrix A;  // K x J
  RatVector b;  // K
  RatVector c;  // J
};

struct BoundaryParams {
  RatVector beta;    // K
  RatVector gamma;   // J
  Rational T;        // > 0
  RatVector lambda;  // K, <= 0
  RatVector mu;      // J, >= 0

  friend bool operator==(const BoundaryParams&, const BoundaryParams&) = default;
};

BoundaryParams operator+(const BoundaryParams& a, const BoundaryParams& b);
BoundaryParams operator-(const BoundaryParams& a, const BoundaryParams& b);
BoundaryParams operator*(const Rational& s, const BoundaryParams& a);

struct ParamLine {
  BoundaryParams start;
  BoundaryParams goal;

  BoundaryParams at(const Rational& theta) const;
  BoundaryParams direction() const { return goal - start; }
};

class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& which, std::vector<size_t> subset);
  const std::vector<size_t>& subset() const { return subset_; }

 private:
  std::vector<size_t> subset_;
};

class SignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check_dimensions(const ProblemData& data, const BoundaryParams& rho);
// Throws DegeneracyError naming 0-based columns of [A I] (or [A^T I]) that span b (or c).
void check_nondegenerate(const ProblemData& data);
void check_signs(const BoundaryParams& rho);
// Full validation; throws on failure.
void validate(const ProblemData& data, const BoundaryParams& rho);

ProblemData perturb(const ProblemData& data, const Rational& eps);

enum class Feasibility { BothFeasible, PrimalInfeasible, DualInfeasible, BothInfeasible };
const char* to_string(Feasibility f);

bool primal_feasible(const ProblemData& data, const BoundaryParams& rho);
bool dual_feasible(const ProblemData& data, const BoundaryParams& rho);
Feasibility feasibility_check(const ProblemData& data, const BoundaryParams& rho);

}  // namespace mclp
