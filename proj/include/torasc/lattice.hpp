#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace torasc {

using Int = std::int64_t;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Sorted list of 0-based coordinate or facet indices.
using IndexSet = std::vector<std::size_t>;

Int checked_add(Int a, Int b);
Int checked_mul(Int a, Int b);
Int gcd(Int a, Int b);

// Exact integer vector: exponents, fan normals, cone rays.
class LatticeVector {
 public:
  LatticeVector() = default;
  explicit LatticeVector(std::size_t n) : coords_(n, 0) {}
  explicit LatticeVector(std::vector<Int> coords) : coords_(std::move(coords)) {}
  LatticeVector(std::initializer_list<Int> coords) : coords_(coords) {}

  static LatticeVector unit(std::size_t n, std::size_t k);

  std::size_t size() const { return coords_.size(); }
  Int operator[](std::size_t i) const { return coords_[i]; }
  Int& operator[](std::size_t i) { return coords_[i]; }
  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }
  const std::vector<Int>& coords() const { return coords_; }

  Int dot(const LatticeVector& other) const;
  // ⟨a⟩ = a_1 + ... + a_n
  Int sum() const;
  bool is_zero() const;
  bool is_nonnegative() const;
  Int content() const;  // gcd of entries, 0 for the zero vector
  bool is_primitive() const { return !is_zero() && content() == 1; }
  LatticeVector primitive() const;

  LatticeVector operator+(const LatticeVector& other) const;
  LatticeVector operator-(const LatticeVector& other) const;
  LatticeVector operator*(Int s) const;

  std::string str() const;

  auto operator<=>(const LatticeVector&) const = default;
  bool operator==(const LatticeVector&) const = default;

 private:
  std::vector<Int> coords_;
};

using RationalVector = std::vector<Rational>;

RationalVector to_rational(const LatticeVector& v);
Rational dot(const LatticeVector& a, const RationalVector& x);
std::string to_string(const Rational& r);

// Exact linear algebra on small integer matrices. Vectors are passed as a
// list; `rank` treats them as rows.
std::size_t rank(const std::vector<LatticeVector>& rows);
std::size_t rank(const std::vector<RationalVector>& rows);
BigInt determinant(const std::vector<LatticeVector>& columns);
// Coefficients λ with Σ λ_j columns[j] = target, when the columns are a basis.
std::optional<RationalVector> solve_in_basis(const std::vector<LatticeVector>& columns,
                                             const LatticeVector& target);
// Basis of the integer kernel {x : ⟨row, x⟩ = 0 for all rows}, each primitive.
std::vector<LatticeVector> integer_kernel(const std::vector<LatticeVector>& rows,
                                          std::size_t n);

}  // namespace torasc
