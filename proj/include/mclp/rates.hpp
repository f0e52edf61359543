#pragma once

#include <optional>
#include <set>
#include <string>

#include "mclp/model.hpp"

namespace mclp {

using IndexSet = std::set<size_t>;  // 0-based indices

// Renders {1,2} style (1-based) set notation.
std::string set_text(const IndexSet& s);

struct RatesBasis {
  IndexSet K;  // basic xdot_k
  IndexSet J;  // basic qdot_j

  friend bool operator==(const RatesBasis&, const RatesBasis&) = default;
  friend auto operator<=>(const RatesBasis&, const RatesBasis&) = default;
};

std::string to_string(const RatesBasis& b);

struct RatesSolution {
  RatVector u, xdot, p, qdot;
};

enum class RateKind { U, Xdot, P, Qdot };

struct RateVar {
  RateKind kind;
  size_t index;
  friend bool operator==(const RateVar&, const RateVar&) = default;
  friend auto operator<=>(const RateVar&, const RateVar&) = default;
};

std::string to_string(const RateVar& v);

struct Exchange {
  RateVar leaving;
  RateVar entering;
};

bool basis_size_ok(const ProblemData& data, const RatesBasis& b);
RatesSolution rates_for_basis(const ProblemData& data, const RatesBasis& b);
bool is_admissible(const RatesSolution& sol);
// Primal-side exchange from b1 to b2; nullopt when not adjacent.
std::optional<Exchange> adjacency(const RatesBasis& b1, const RatesBasis& b2, size_t K, size_t J);

}  // namespace mclp
