#pragma once

#include <optional>
#include <vector>

#include "torasc/lattice.hpp"

namespace torasc {

// Dense univariate polynomial over Q, c[i] the coefficient of z^i, trimmed
// so the leading coefficient is nonzero (the zero polynomial is empty).
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rational> coeffs);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  const Rational& lead() const { return c_.back(); }

  Rational operator()(const Rational& z) const;
  double operator()(double z) const;
  UPoly derivative() const;
  UPoly monic() const;

  friend UPoly operator-(const UPoly& a, const UPoly& b);
  friend UPoly operator*(const UPoly& a, const UPoly& b);
  // Euclidean division: a = q·b + r.
  static std::pair<UPoly, UPoly> divide(const UPoly& a, const UPoly& b);
  static UPoly gcd(UPoly a, UPoly b);

 private:
  std::vector<Rational> c_;
  void trim();
};

// Sturm chain p, p', −rem(...), ...; counts distinct real roots.
class SturmChain {
 public:
  explicit SturmChain(const UPoly& p);
  // Distinct real roots in the half-open interval (a, b].
  int count(const Rational& a, const Rational& b) const;
  int count_negative() const;  // in (−∞, 0)
  int count_positive() const;  // in (0, ∞)

 private:
  std::vector<UPoly> chain_;
  int variations(const Rational& z) const;
  int variations_at_infinity(bool positive) const;
};

// Bound B with every real root in (−B, B).
Rational cauchy_bound(const UPoly& p);

// One real root of p in (lo, hi) isolated by Sturm bisection, then refined
// to double precision. Exact when the root is found at a dyadic midpoint.
std::optional<Rational> isolate_root(const UPoly& p, Rational lo, Rational hi);

}  // namespace torasc
