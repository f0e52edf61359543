#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mclp/rational.hpp"

namespace mclp {

using RatVector = std::vector<Rational>;

class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  RatMatrix(std::initializer_list<std::initializer_list<Rational>> init);

  static RatMatrix identity(size_t n);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  Rational& at(size_t i, size_t j) {
    check(i, j);
    return data_[i * cols_ + j];
  }
  const Rational& at(size_t i, size_t j) const {
    check(i, j);
    return data_[i * cols_ + j];
  }
  Rational& operator()(size_t i, size_t j) { return at(i, j); }
  const Rational& operator()(size_t i, size_t j) const { return at(i, j); }

  RatVector row(size_t i) const;
  RatVector col(size_t j) const;
  RatMatrix transpose() const;

  friend bool operator==(const RatMatrix&, const RatMatrix&) = default;

 private:
  void check(size_t i, size_t j) const {
    if (i >= rows_ || j >= cols_)
      throw std::out_of_range("matrix index (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
  }
  size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

class SingularError : public std::runtime_error {
 public:
  SingularError(size_t rank, size_t n)
      : std::runtime_error("singular matrix: rank " + std::to_string(rank) + " < " + std::to_string(n)),
        rank_(rank) {}
  size_t rank() const { return rank_; }

 private:
  size_t rank_;
};

RatVector operator*(const RatMatrix& m, const RatVector& v);
RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);

// Bareiss fraction-free elimination; throws SingularError carrying the rank.
RatVector solve_linear(const RatMatrix& m, const RatVector& r);
// Solves M X = R column by column with a single elimination.
RatMatrix solve_linear(const RatMatrix& m, const RatMatrix& r);
bool is_nonsingular(const RatMatrix& m);
size_t rank(const RatMatrix& m);
Rational determinant(const RatMatrix& m);

std::string to_string(const RatVector& v);

}  // namespace mclp
