#include "torasc/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "torasc/errors.hpp"

namespace torasc {

Int checked_add(Int a, Int b) {
  Int out;
  if (__builtin_add_overflow(a, b, &out)) throw ConsistencyError("integer overflow in lattice arithmetic");
  return out;
}

Int checked_mul(Int a, Int b) {
  Int out;
  if (__builtin_mul_overflow(a, b, &out)) throw ConsistencyError("integer overflow in lattice arithmetic");
  return out;
}

Int gcd(Int a, Int b) { return std::gcd(a, b); }

LatticeVector LatticeVector::unit(std::size_t n, std::size_t k) {
  LatticeVector e(n);
  e[k] = 1;
  return e;
}

Int LatticeVector::dot(const LatticeVector& other) const {
  if (other.size() != size()) throw DomainError("dimension mismatch in dot product");
  Int acc = 0;
  for (std::size_t i = 0; i < size(); ++i) acc = checked_add(acc, checked_mul(coords_[i], other.coords_[i]));
  return acc;
}

Int LatticeVector::sum() const {
  Int acc = 0;
  for (Int c : coords_) acc = checked_add(acc, c);
  return acc;
}

bool LatticeVector::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](Int c) { return c == 0; });
}

bool LatticeVector::is_nonnegative() const {
  return std::all_of(coords_.begin(), coords_.end(), [](Int c) { return c >= 0; });
}

Int LatticeVector::content() const {
  Int g = 0;
  for (Int c : coords_) g = std::gcd(g, c);
  return g;
}

LatticeVector LatticeVector::primitive() const {
  Int g = content();
  if (g == 0) throw DomainError("the zero vector has no primitive representative");
  LatticeVector out(*this);
  for (auto& c : out.coords_) c /= g;
  return out;
}

LatticeVector LatticeVector::operator+(const LatticeVector& other) const {
  LatticeVector out(*this);
  for (std::size_t i = 0; i < size(); ++i) out[i] = checked_add(out[i], other[i]);
  return out;
}

LatticeVector LatticeVector::operator-(const LatticeVector& other) const {
  LatticeVector out(*this);
  for (std::size_t i = 0; i < size(); ++i) out[i] = checked_add(out[i], -other[i]);
  return out;
}

LatticeVector LatticeVector::operator*(Int s) const {
  LatticeVector out(*this);
  for (auto& c : out.coords_) c = checked_mul(c, s);
  return out;
}

std::string LatticeVector::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < size(); ++i) {
    if (i) os << ',';
    os << coords_[i];
  }
  os << ')';
  return os.str();
}

RationalVector to_rational(const LatticeVector& v) {
  RationalVector out;
  out.reserve(v.size());
  for (Int c : v) out.emplace_back(c);
  return out;
}

Rational dot(const LatticeVector& a, const RationalVector& x) {
  Rational acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += Rational(a[i]) * x[i];
  return acc;
}

std::string to_string(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace {

// Row echelon form in place; returns the pivot columns.
std::vector<std::size_t> echelon(std::vector<RationalVector>& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t sel = row;
    while (sel < m.size() && m[sel][col] == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[row], m[sel]);
    Rational inv = 1 / m[row][col];
    for (std::size_t c = col; c < cols; ++c) m[row][c] *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      Rational factor = m[r][col];
      for (std::size_t c = col; c < cols; ++c) m[r][c] -= factor * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

std::size_t rank(const std::vector<RationalVector>& rows) {
  if (rows.empty()) return 0;
  auto m = rows;
  return echelon(m, rows.front().size()).size();
}

std::size_t rank(const std::vector<LatticeVector>& rows) {
  std::vector<RationalVector> m;
  m.reserve(rows.size());
  for (const auto& r : rows) m.push_back(to_rational(r));
  return rank(m);
}

BigInt determinant(const std::vector<LatticeVector>& columns) {
  const std::size_t n = columns.size();
  // Bareiss fraction-free elimination on the transposed matrix (same det).
  std::vector<std::vector<BigInt>> a(n, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (columns[i].size() != n) throw DomainError("determinant needs a square matrix");
    for (std::size_t j = 0; j < n; ++j) a[i][j] = columns[i][j];
  }
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t sel = k + 1;
      while (sel < n && a[sel][k] == 0) ++sel;
      if (sel == n) return 0;
      std::swap(a[k], a[sel]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    }
    prev = a[k][k];
  }
  return n == 0 ? BigInt(1) : sign * a[n - 1][n - 1];
}

std::optional<RationalVector> solve_in_basis(const std::vector<LatticeVector>& columns,
                                             const LatticeVector& target) {
  const std::size_t n = target.size();
  const std::size_t k = columns.size();
  std::vector<RationalVector> m(n, RationalVector(k + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) m[i][j] = columns[j][i];
    m[i][k] = target[i];
  }
  auto pivots = echelon(m, k + 1);
  if (!pivots.empty() && pivots.back() == k) return std::nullopt;  // inconsistent
  if (pivots.size() != k) return std::nullopt;                       // not a basis
  RationalVector lambda(k);
  for (std::size_t r = 0; r < pivots.size(); ++r) lambda[pivots[r]] = m[r][k];
  return lambda;
}

std::vector<LatticeVector> integer_kernel(const std::vector<LatticeVector>& rows, std::size_t n) {
  std::vector<RationalVector> m;
  for (const auto& r : rows) m.push_back(to_rational(r));
  auto pivots = m.empty() ? std::vector<std::size_t>{} : echelon(m, n);
  std::vector<bool> is_pivot(n, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<LatticeVector> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    RationalVector x(n);
    x[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m[r][free];
    BigInt lcm = 1;
    for (const auto& v : x) lcm = boost::multiprecision::lcm(lcm, BigInt(boost::multiprecision::denominator(v)));
    LatticeVector out(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rational scaled = x[i] * Rational(lcm);
      out[i] = static_cast<Int>(boost::multiprecision::numerator(scaled));
    }
    basis.push_back(out.primitive());
  }
  return basis;
}

}  // namespace torasc
