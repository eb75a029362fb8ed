#include "torasc/upoly.hpp"

#include <algorithm>
#include <cmath>

#include "torasc/errors.hpp"

namespace torasc {

UPoly::UPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

void UPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational UPoly::operator()(const Rational& z) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double UPoly::operator()(double z) const {
  double acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + static_cast<double>(*it);
  return acc;
}

UPoly UPoly::derivative() const {
  std::vector<Rational> d;
  for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<int>(i));
  return UPoly(std::move(d));
}

UPoly UPoly::monic() const {
  if (is_zero()) return *this;
  std::vector<Rational> out = c_;
  Rational l = lead();
  for (auto& c : out) c /= l;
  return UPoly(std::move(out));
}

UPoly operator-(const UPoly& a, const UPoly& b) {
  std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] -= b.c_[i];
  return UPoly(std::move(out));
}

UPoly operator*(const UPoly& a, const UPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return UPoly(std::move(out));
}

std::pair<UPoly, UPoly> UPoly::divide(const UPoly& a, const UPoly& b) {
  if (b.is_zero()) throw DomainError("polynomial division by zero");
  std::vector<Rational> r = a.c_;
  std::vector<Rational> q(a.c_.size() >= b.c_.size() ? a.c_.size() - b.c_.size() + 1 : 0);
  for (int i = static_cast<int>(r.size()) - 1; i >= b.degree(); --i) {
    if (r[i] == 0) continue;
    Rational f = r[i] / b.lead();
    std::size_t shift = static_cast<std::size_t>(i - b.degree());
    q[shift] = f;
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[shift + j] -= f * b.c_[j];
  }
  return {UPoly(std::move(q)), UPoly(std::move(r))};
}

UPoly UPoly::gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    auto r = divide(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

SturmChain::SturmChain(const UPoly& p) {
  if (p.is_zero()) return;
  chain_.push_back(p);
  chain_.push_back(p.derivative());
  while (!chain_.back().is_zero()) {
    auto r = UPoly::divide(chain_[chain_.size() - 2], chain_.back()).second;
    chain_.push_back(UPoly() - r);
  }
  chain_.pop_back();
}

namespace {

int sign(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

int count_variations(const std::vector<int>& signs) {
  int v = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

}  // namespace

int SturmChain::variations(const Rational& z) const {
  std::vector<int> s;
  for (const auto& p : chain_) s.push_back(sign(p(z)));
  return count_variations(s);
}

int SturmChain::variations_at_infinity(bool positive) const {
  std::vector<int> s;
  for (const auto& p : chain_) {
    int lead = sign(p.lead());
    if (!positive && p.degree() % 2 == 1) lead = -lead;
    s.push_back(lead);
  }
  return count_variations(s);
}

int SturmChain::count(const Rational& a, const Rational& b) const {
  if (chain_.empty()) return 0;
  return variations(a) - variations(b);
}

int SturmChain::count_negative() const {
  if (chain_.empty()) return 0;
  // (−∞, 0): subtract a root at 0 if there is one.
  int total = variations_at_infinity(false) - variations(Rational(0));
  if (chain_.front()(Rational(0)) == 0) --total;
  return total;
}

int SturmChain::count_positive() const {
  if (chain_.empty()) return 0;
  return variations(Rational(0)) - variations_at_infinity(true);
}

Rational cauchy_bound(const UPoly& p) {
  Rational m = 0;
  for (int i = 0; i < p.degree(); ++i) {
    Rational r = abs(p.coeffs()[static_cast<std::size_t>(i)] / p.lead());
    m = std::max(m, r);
  }
  return m + 1;
}

std::optional<Rational> isolate_root(const UPoly& p, Rational lo, Rational hi) {
  UPoly sq = UPoly::divide(p, UPoly::gcd(p, p.derivative())).first;
  SturmChain chain(sq);
  if (chain.count(lo, hi) == 0) return std::nullopt;
  // Shrink to a single root.
  for (int it = 0; it < 200 && chain.count(lo, hi) > 1; ++it) {
    Rational mid = (lo + hi) / 2;
    if (chain.count(lo, mid) > 0) hi = mid;
    else lo = mid;
  }
  if (sq(hi) == 0) return hi;
  // Squarefree part changes sign across a simple root in (lo, hi].
  for (int it = 0; it < 80; ++it) {
    Rational mid = (lo + hi) / 2;
    Rational v = sq(mid);
    if (v == 0) return mid;
    if (sign(v) == sign(sq(hi))) hi = mid;
    else lo = mid;
    // Stop at double resolution.
    if (static_cast<double>(hi - lo) < 1e-17 * std::max(1.0, std::abs(static_cast<double>(hi)))) break;
  }
  return (lo + hi) / 2;
}

}  // namespace torasc
