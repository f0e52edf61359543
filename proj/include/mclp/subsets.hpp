#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mclp {

// Calls f on every size-r subset of {0..n-1} in lexicographic order until f returns true.
inline bool for_each_subset(size_t n, size_t r, const std::function<bool(const std::vector<size_t>&)>& f) {
  if (r > n) return false;
  std::vector<size_t> idx(r);
  for (size_t i = 0; i < r; ++i) idx[i] = i;
  for (;;) {
    if (f(idx)) return true;
    size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (size_t k = i; k < r; ++k) idx[k] = idx[k - 1] + 1;
  }
}

}  // namespace mclp
