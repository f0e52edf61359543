#include "mclp/linalg.hpp"

#include <sstream>

namespace mclp {

RatMatrix::RatMatrix(std::initializer_list<std::initializer_list<Rational>> init) {
  rows_ = init.size();
  cols_ = rows_ ? init.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : init) {
    if (r.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

RatMatrix RatMatrix::identity(size_t n) {
  RatMatrix m(n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RatVector RatMatrix::row(size_t i) const {
  RatVector out(cols_);
  for (size_t j = 0; j < cols_; ++j) out[j] = at(i, j);
  return out;
}

RatVector RatMatrix::col(size_t j) const {
  RatVector out(rows_);
  for (size_t i = 0; i < rows_; ++i) out[i] = at(i, j);
  return out;
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix t(cols_, rows_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j) t(j, i) = at(i, j);
  return t;
}

RatVector operator*(const RatMatrix& m, const RatVector& v) {
  if (v.size() != m.cols()) throw std::invalid_argument("dimension mismatch in matrix-vector product");
  RatVector out(m.rows());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero() && !v[j].is_zero()) out[i] += m(i, j) * v[j];
  return out;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("dimension mismatch in matrix product");
  RatMatrix out(a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k).is_zero()) continue;
      for (size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

namespace {

struct Echelon {
  std::vector<std::vector<mpz_class>> a;  // n rows, n + extra columns
  std::vector<mpz_class> scale;           // row multipliers applied before elimination
  size_t rank = 0;
  int swaps = 0;
};

// Fraction-free forward elimination over the first n columns.
Echelon eliminate(const RatMatrix& m, const RatMatrix* rhs) {
  const size_t n = m.rows();
  const size_t extra = rhs ? rhs->cols() : 0;
  const size_t width = m.cols() + extra;
  Echelon e;
  e.a.assign(n, std::vector<mpz_class>(width));
  e.scale.assign(n, 1);
  for (size_t i = 0; i < n; ++i) {
    mpz_class l = 1;
    for (size_t j = 0; j < m.cols(); ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).raw().get_den_mpz_t());
    for (size_t j = 0; j < extra; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), (*rhs)(i, j).raw().get_den_mpz_t());
    e.scale[i] = l;
    for (size_t j = 0; j < m.cols(); ++j) e.a[i][j] = m(i, j).num() * (l / m(i, j).den());
    for (size_t j = 0; j < extra; ++j) e.a[i][m.cols() + j] = (*rhs)(i, j).num() * (l / (*rhs)(i, j).den());
  }
  mpz_class prev = 1, t;
  size_t r = 0;
  for (size_t c = 0; c < m.cols() && r < n; ++c) {
    size_t p = r;
    while (p < n && e.a[p][c] == 0) ++p;
    if (p == n) continue;
    if (p != r) {
      std::swap(e.a[p], e.a[r]);
      std::swap(e.scale[p], e.scale[r]);
      ++e.swaps;
    }
    const mpz_class& piv = e.a[r][c];
    for (size_t i = r + 1; i < n; ++i) {
      auto& row = e.a[i];
      const mpz_class lead = row[c];
      for (size_t j = c + 1; j < width; ++j) {
        row[j] *= piv;
        if (lead != 0 && e.a[r][j] != 0) {
          t = lead * e.a[r][j];
          row[j] -= t;
        }
        if (prev != 1) mpz_divexact(row[j].get_mpz_t(), row[j].get_mpz_t(), prev.get_mpz_t());
      }
      row[c] = 0;
    }
    prev = piv;
    ++r;
  }
  e.rank = r;
  return e;
}

RatMatrix back_substitute(const Echelon& e, size_t n, size_t extra) {
  RatMatrix x(n, extra);
  for (size_t k = 0; k < extra; ++k) {
    for (size_t ii = n; ii-- > 0;) {
      mpq_class acc(e.a[ii][n + k]);
      for (size_t j = ii + 1; j < n; ++j)
        if (e.a[ii][j] != 0) acc -= mpq_class(e.a[ii][j]) * x(j, k).raw();
      acc /= mpq_class(e.a[ii][ii]);
      x(ii, k) = Rational(acc);
    }
  }
  return x;
}

void require_square(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
}

}  // namespace

RatMatrix solve_linear(const RatMatrix& m, const RatMatrix& r) {
  require_square(m);
  if (r.rows() != m.rows()) throw std::invalid_argument("right-hand side length mismatch");
  Echelon e = eliminate(m, &r);
  if (e.rank < m.rows()) throw SingularError(e.rank, m.rows());
  return back_substitute(e, m.rows(), r.cols());
}

RatVector solve_linear(const RatMatrix& m, const RatVector& r) {
  RatMatrix rhs(r.size(), 1);
  for (size_t i = 0; i < r.size(); ++i) rhs(i, 0) = r[i];
  return solve_linear(m, rhs).col(0);
}

bool is_nonsingular(const RatMatrix& m) {
  require_square(m);
  return eliminate(m, nullptr).rank == m.rows();
}

size_t rank(const RatMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  return eliminate(m, nullptr).rank;
}

Rational determinant(const RatMatrix& m) {
  require_square(m);
  const size_t n = m.rows();
  if (n == 0) return 1;
  Echelon e = eliminate(m, nullptr);
  if (e.rank < n) return 0;
  mpz_class s = 1;
  for (const auto& f : e.scale) s *= f;
  Rational d(e.a[n - 1][n - 1], s);
  return e.swaps % 2 ? -d : d;
}

std::string to_string(const RatVector& v) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

}  // namespace mclp
