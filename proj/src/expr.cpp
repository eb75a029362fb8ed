#include "torasc/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "torasc/errors.hpp"

namespace torasc {

struct Expr::Node {
  Kind kind = Kind::Constant;
  Rational value;
  std::size_t index = 0;
  std::vector<Expr> args;
  unsigned exponent = 0;
  LatticeVector mono;
  unsigned k = 0;
  unsigned m = 0;
};

Expr::Expr() : node_(std::make_shared<const Node>()) {}

Expr Expr::constant(const Rational& value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::flat(LatticeVector mono, unsigned k, unsigned m) {
  if (k == 0) throw DomainError("flat atoms need k >= 1");
  if (!mono.is_nonnegative()) throw DomainError("flat atom monomial must have nonnegative exponents");
  // u ≡ 1 gives the constant e^{-1}.
  if (mono.is_zero()) return Expr::exp(Expr::constant(-1));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Flat;
  n->mono = std::move(mono);
  n->k = k;
  n->m = m;
  return Expr(std::move(n));
}

Expr Expr::exp(const Expr& arg) {
  if (arg.is_zero()) return constant(1);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exp;
  n->args = {arg};
  return Expr(std::move(n));
}

Expr Expr::pow(const Expr& base, unsigned exponent) {
  if (exponent == 0) return constant(1);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    Rational r = 1;
    for (unsigned i = 0; i < exponent; ++i) r *= base.value();
    return constant(r);
  }
  if (base.kind() == Kind::Power) return pow(base.args()[0], base.exponent() * exponent);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Power;
  n->args = {base};
  n->exponent = exponent;
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  std::vector<Expr> flat_terms;
  Rational c = 0;
  // The folded constant keeps the position of the first constant summand.
  std::optional<std::size_t> c_pos;
  auto take = [&](const Expr& s) {
    if (s.is_constant()) {
      if (!c_pos) c_pos = flat_terms.size();
      c += s.value();
    } else {
      flat_terms.push_back(s);
    }
  };
  for (auto& t : terms) {
    if (t.kind() == Kind::Sum) {
      for (const auto& s : t.args()) take(s);
    } else {
      take(t);
    }
  }
  if (c != 0) flat_terms.insert(flat_terms.begin() + static_cast<std::ptrdiff_t>(*c_pos), constant(c));
  if (flat_terms.empty()) return constant(0);
  if (flat_terms.size() == 1) return flat_terms.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->args = std::move(flat_terms);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> flat_factors;
  Rational c = 1;
  for (auto& f : factors) {
    if (f.kind() == Kind::Product) {
      for (const auto& s : f.args()) {
        if (s.is_constant()) c *= s.value();
        else flat_factors.push_back(s);
      }
    } else if (f.is_constant()) {
      c *= f.value();
    } else {
      flat_factors.push_back(f);
    }
  }
  if (c == 0) return constant(0);
  if (c != 1) flat_factors.insert(flat_factors.begin(), constant(c));
  if (flat_factors.empty()) return constant(1);
  if (flat_factors.size() == 1) return flat_factors.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->args = std::move(flat_factors);
  return Expr(std::move(n));
}

Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }

Expr Expr::operator-() const { return product({constant(-1), *this}); }

Expr::Kind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
std::size_t Expr::index() const { return node_->index; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
unsigned Expr::exponent() const { return node_->exponent; }
const LatticeVector& Expr::mono() const { return node_->mono; }
unsigned Expr::flat_k() const { return node_->k; }
unsigned Expr::flat_m() const { return node_->m; }

bool Expr::is_zero() const { return is_constant() && value() == 0; }

bool Expr::contains_flat() const {
  if (kind() == Kind::Flat) return true;
  return std::any_of(args().begin(), args().end(), [](const Expr& a) { return a.contains_flat(); });
}

std::size_t Expr::arity() const {
  switch (kind()) {
    case Kind::Constant:
      return 0;
    case Kind::Variable:
      return index() + 1;
    case Kind::Flat: {
      std::size_t r = 0;
      for (std::size_t i = 0; i < mono().size(); ++i)
        if (mono()[i] != 0) r = i + 1;
      return r;
    }
    default: {
      std::size_t r = 0;
      for (const auto& a : args()) r = std::max(r, a.arity());
      return r;
    }
  }
}

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Sum:
      return 1;
    case Expr::Kind::Product:
      return 2;
    case Expr::Kind::Constant:
      // Negative and fractional constants bind like products.
      return (e.value() < 0 || boost::multiprecision::denominator(e.value()) != 1) ? 2 : 4;
    case Expr::Kind::Power:
      return 3;
    default:
      return 4;
  }
}

std::string monomial_str(const LatticeVector& q, const std::string& var) {
  std::string out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += var + std::to_string(i + 1);
    if (q[i] != 1) out += "^" + std::to_string(q[i]);
  }
  return out.empty() ? "1" : out;
}

std::string wrap(const Expr& e, int min_prec, const std::string& var) {
  std::string s = e.str(var);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string Expr::str(const std::string& var) const {
  switch (kind()) {
    case Kind::Constant:
      return to_string(value());
    case Kind::Variable:
      return var + std::to_string(index() + 1);
    case Kind::Flat: {
      const auto& v = mono();
      std::string arg;
      if (v.sum() == 1 && v.is_nonnegative()) {
        for (std::size_t i = 0; i < v.size(); ++i)
          if (v[i] == 1) arg = std::to_string(i + 1);
      } else {
        arg = monomial_str(v, var);
      }
      if (flat_m() == 0) return "flat(" + arg + "," + std::to_string(flat_k()) + ")";
      return "flatm(" + arg + "," + std::to_string(flat_k()) + "," + std::to_string(flat_m()) + ")";
    }
    case Kind::Exp:
      return "exp(" + args()[0].str(var) + ")";
    case Kind::Power:
      return wrap(args()[0], 4, var) + "^" + std::to_string(exponent());
    case Kind::Product: {
      std::string out;
      std::size_t start = 0;
      if (args()[0].is_constant()) {
        const Rational& c = args()[0].value();
        if (c == -1) out = "-";
        else out = to_string(c) + "*";
        start = 1;
      }
      for (std::size_t i = start; i < args().size(); ++i) {
        if (i > start) out += "*";
        out += wrap(args()[i], 3, var);
      }
      return out;
    }
    case Kind::Sum: {
      std::string out;
      for (std::size_t i = 0; i < args().size(); ++i) {
        std::string s = args()[i].str(var);
        if (i == 0) {
          out = s;
        } else if (!s.empty() && s[0] == '-') {
          out += " - " + s.substr(1);
        } else {
          out += " + " + s;
        }
      }
      return out;
    }
  }
  return "";
}

double flat_value(double u, double two_k, double m, bool odd_m) {
  if (u == 0.0 || !std::isfinite(u)) return 0.0;
  double au = std::fabs(u);
  double lu = std::log(au);
  double a = -std::exp(-two_k * lu) - m * lu;
  if (!(a > -745.0)) return 0.0;
  double v = std::exp(a);
  return (u < 0 && odd_m) ? -v : v;
}

namespace {

double mono_value(const LatticeVector& v, std::span<const double> x) {
  double u = 1.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (Int p = 0; p < v[i]; ++p) u *= x[i];
  return u;
}

}  // namespace

double Expr::evaluate(std::span<const double> x) const {
  switch (kind()) {
    case Kind::Constant:
      return static_cast<double>(value());
    case Kind::Variable:
      if (index() >= x.size()) throw DomainError("evaluation point has too few coordinates");
      return x[index()];
    case Kind::Flat: {
      if (mono().size() > x.size()) throw DomainError("evaluation point has too few coordinates");
      return flat_value(mono_value(mono(), x), 2.0 * flat_k(), flat_m(), flat_m() % 2 == 1);
    }
    case Kind::Exp:
      return std::exp(args()[0].evaluate(x));
    case Kind::Power: {
      double b = args()[0].evaluate(x);
      double r = 1.0;
      for (unsigned i = 0; i < exponent(); ++i) r *= b;
      return r;
    }
    case Kind::Product: {
      double r = 1.0;
      for (const auto& a : args()) r *= a.evaluate(x);
      return r;
    }
    case Kind::Sum: {
      double r = 0.0;
      for (const auto& a : args()) r += a.evaluate(x);
      return r;
    }
  }
  return 0.0;
}

Expr Expr::derivative(std::size_t i) const {
  switch (kind()) {
    case Kind::Constant:
      return constant(0);
    case Kind::Variable:
      return constant(index() == i ? 1 : 0);
    case Kind::Flat: {
      const auto& v = mono();
      if (i >= v.size() || v[i] == 0) return constant(0);
      // dF/du = -m F(m+1) + 2k F(m+2k+1), du/dx_i = v_i x^{v-e_i}.
      LatticeVector rest = v;
      rest[i] -= 1;
      std::vector<Expr> mono_factors{constant(v[i])};
      for (std::size_t j = 0; j < rest.size(); ++j)
        if (rest[j] > 0) mono_factors.push_back(pow(variable(j), static_cast<unsigned>(rest[j])));
      Expr du = product(std::move(mono_factors));
      Expr dF = sum({product({constant(-static_cast<Int>(flat_m())), flat(v, flat_k(), flat_m() + 1)}),
                     product({constant(2 * static_cast<Int>(flat_k())),
                              flat(v, flat_k(), flat_m() + 2 * flat_k() + 1)})});
      return du * dF;
    }
    case Kind::Exp:
      return *this * args()[0].derivative(i);
    case Kind::Power: {
      const Expr& b = args()[0];
      return product({constant(exponent()), pow(b, exponent() - 1), b.derivative(i)});
    }
    case Kind::Product: {
      std::vector<Expr> terms;
      for (std::size_t j = 0; j < args().size(); ++j) {
        Expr dj = args()[j].derivative(i);
        if (dj.is_zero()) continue;
        std::vector<Expr> fs;
        for (std::size_t l = 0; l < args().size(); ++l) fs.push_back(l == j ? dj : args()[l]);
        terms.push_back(product(std::move(fs)));
      }
      return sum(std::move(terms));
    }
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& a : args()) terms.push_back(a.derivative(i));
      return sum(std::move(terms));
    }
  }
  return constant(0);
}

namespace {

template <class F>
Expr rebuild(const Expr& e, F&& self) {
  switch (e.kind()) {
    case Expr::Kind::Exp:
      return Expr::exp(self(e.args()[0]));
    case Expr::Kind::Power:
      return Expr::pow(self(e.args()[0]), e.exponent());
    case Expr::Kind::Product: {
      std::vector<Expr> fs;
      for (const auto& a : e.args()) fs.push_back(self(a));
      return Expr::product(std::move(fs));
    }
    case Expr::Kind::Sum: {
      std::vector<Expr> ts;
      for (const auto& a : e.args()) ts.push_back(self(a));
      return Expr::sum(std::move(ts));
    }
    default:
      return e;
  }
}

}  // namespace

Expr Expr::restrict_to_zero(const IndexSet& coords) const {
  auto in = [&](std::size_t j) { return std::binary_search(coords.begin(), coords.end(), j); };
  switch (kind()) {
    case Kind::Variable:
      return in(index()) ? constant(0) : *this;
    case Kind::Flat:
      for (std::size_t j = 0; j < mono().size(); ++j)
        if (mono()[j] > 0 && in(j)) return constant(0);
      return *this;
    default:
      return rebuild(*this, [&](const Expr& a) { return a.restrict_to_zero(coords); });
  }
}

Expr Expr::pull_back(const std::vector<LatticeVector>& rows, const std::vector<int>& signs) const {
  if (rows.empty()) throw DomainError("pull_back needs at least one row");
  const std::size_t dim = rows.front().size();
  switch (kind()) {
    case Kind::Variable: {
      if (index() >= rows.size()) throw DomainError("pull_back: variable beyond the map");
      std::vector<Expr> fs{constant(signs.at(index()))};
      for (std::size_t j = 0; j < dim; ++j)
        if (rows[index()][j] > 0) fs.push_back(pow(variable(j), static_cast<unsigned>(rows[index()][j])));
      return product(std::move(fs));
    }
    case Kind::Flat: {
      LatticeVector w(dim);
      int sign = 1;
      for (std::size_t k = 0; k < mono().size(); ++k) {
        if (mono()[k] == 0) continue;
        if (k >= rows.size()) throw DomainError("pull_back: variable beyond the map");
        w = w + rows[k] * mono()[k];
        if (signs.at(k) < 0 && mono()[k] % 2 != 0) sign = -sign;
      }
      // exp(-u^{-2k}) is even in u, so only u^{-m} sees the sign.
      Expr f = flat(w, flat_k(), flat_m());
      return (sign < 0 && flat_m() % 2 == 1) ? -f : f;
    }
    default:
      return rebuild(*this, [&](const Expr& a) { return a.pull_back(rows, signs); });
  }
}

namespace {

void add_into(ExpSum& acc, const Rational& r, const Rational& c) {
  auto& slot = acc[r];
  slot += c;
  if (slot == 0) acc.erase(r);
}

ExpSum multiply(const ExpSum& a, const ExpSum& b) {
  ExpSum out;
  for (const auto& [ra, ca] : a)
    for (const auto& [rb, cb] : b) add_into(out, ra + rb, ca * cb);
  return out;
}

}  // namespace

std::optional<ExpSum> value_at_origin(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant: {
      ExpSum s;
      if (e.value() != 0) s[0] = e.value();
      return s;
    }
    case Expr::Kind::Variable:
    case Expr::Kind::Flat:
      return ExpSum{};
    case Expr::Kind::Exp: {
      auto g = value_at_origin(e.args()[0]);
      if (!g) return std::nullopt;
      if (g->empty()) return ExpSum{{Rational(0), Rational(1)}};
      if (g->size() == 1 && g->begin()->first == 0) return ExpSum{{g->begin()->second, Rational(1)}};
      return std::nullopt;
    }
    case Expr::Kind::Power: {
      auto b = value_at_origin(e.args()[0]);
      if (!b) return std::nullopt;
      ExpSum r{{Rational(0), Rational(1)}};
      for (unsigned i = 0; i < e.exponent(); ++i) r = multiply(r, *b);
      return r;
    }
    case Expr::Kind::Product: {
      ExpSum r{{Rational(0), Rational(1)}};
      for (const auto& a : e.args()) {
        auto v = value_at_origin(a);
        if (!v) return std::nullopt;
        r = multiply(r, *v);
      }
      return r;
    }
    case Expr::Kind::Sum: {
      ExpSum r;
      for (const auto& a : e.args()) {
        auto v = value_at_origin(a);
        if (!v) return std::nullopt;
        for (const auto& [x, c] : *v) add_into(r, x, c);
      }
      return r;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Canonical form

void CanonicalSum::add(const CanonicalTerm& t) {
  if (t.coeff == 0) return;
  std::vector<std::string> keys;
  for (const auto& a : t.atoms) keys.push_back(a.str());
  auto key = std::make_pair(t.exponent, keys);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, t);
    return;
  }
  it->second.coeff += t.coeff;
  if (it->second.coeff == 0) terms_.erase(it);
}

CanonicalSum CanonicalSum::operator+(const CanonicalSum& o) const {
  CanonicalSum out = *this;
  for (const auto& [k, t] : o.terms_) out.add(t);
  return out;
}

CanonicalSum CanonicalSum::operator*(const CanonicalSum& o) const {
  CanonicalSum out(n_);
  for (const auto& [ka, a] : terms_) {
    for (const auto& [kb, b] : o.terms_) {
      CanonicalTerm t{a.coeff * b.coeff, a.exponent + b.exponent, a.atoms};
      t.atoms.insert(t.atoms.end(), b.atoms.begin(), b.atoms.end());
      std::stable_sort(t.atoms.begin(), t.atoms.end(),
                       [](const Expr& x, const Expr& y) { return x.str() < y.str(); });
      out.add(t);
    }
  }
  return out;
}

CanonicalSum CanonicalSum::of(const Expr& e, std::size_t n) {
  CanonicalSum out(n);
  auto one = [&](Rational c) {
    CanonicalSum s(n);
    s.add({std::move(c), LatticeVector(n), {}});
    return s;
  };
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return one(e.value());
    case Expr::Kind::Variable: {
      if (e.index() >= n) throw DomainError("variable x" + std::to_string(e.index() + 1) + " exceeds n");
      out.add({1, LatticeVector::unit(n, e.index()), {}});
      return out;
    }
    case Expr::Kind::Flat:
      if (e.mono().size() > n) throw DomainError("flat atom exceeds n");
      out.add({1, LatticeVector(n), {e}});
      return out;
    case Expr::Kind::Exp: {
      Expr arg = of(e.args()[0], n).to_expr();
      Expr atom = Expr::exp(arg);
      if (atom.is_constant()) return one(atom.value());
      out.add({1, LatticeVector(n), {atom}});
      return out;
    }
    case Expr::Kind::Power: {
      CanonicalSum base = of(e.args()[0], n);
      CanonicalSum r = one(1);
      for (unsigned i = 0; i < e.exponent(); ++i) r = r * base;
      return r;
    }
    case Expr::Kind::Product: {
      CanonicalSum r = one(1);
      for (const auto& a : e.args()) r = r * of(a, n);
      return r;
    }
    case Expr::Kind::Sum: {
      for (const auto& a : e.args()) out = out + of(a, n);
      return out;
    }
  }
  return out;
}

Expr CanonicalSum::to_expr() const {
  // Highest exponents first reads like the usual polynomial order; within an
  // exponent the atom-free part comes first.
  std::vector<const CanonicalTerm*> order;
  for (const auto& [key, t] : terms_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const CanonicalTerm* a, const CanonicalTerm* b) {
    return b->exponent < a->exponent;
  });
  std::vector<Expr> terms;
  for (const CanonicalTerm* tp : order) {
    const auto& t = *tp;
    std::vector<Expr> fs{Expr::constant(t.coeff)};
    for (std::size_t i = 0; i < t.exponent.size(); ++i)
      if (t.exponent[i] > 0) fs.push_back(Expr::pow(Expr::variable(i), static_cast<unsigned>(t.exponent[i])));
    fs.insert(fs.end(), t.atoms.begin(), t.atoms.end());
    terms.push_back(Expr::product(std::move(fs)));
  }
  return Expr::sum(std::move(terms));
}

std::string CanonicalSum::str(const std::string& var) const { return to_expr().str(var); }

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(const std::string& text, std::size_t n) : text_(text), n_(n) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  const std::string& text_;
  std::size_t n_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }

  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(what, line, col);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  bool at_digit() {
    skip_ws();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  BigInt nat() {
    if (!at_digit()) fail("expected a natural number");
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return BigInt(text_.substr(start, pos_ - start));
  }

  unsigned small_nat(const char* what) {
    std::size_t at = (skip_ws(), pos_);
    BigInt v = nat();
    if (v > 1000000) fail_at(std::string(what) + " is too large", at);
    return static_cast<unsigned>(v);
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::size_t var_index(std::size_t at) {
    if (!at_digit()) fail("expected a variable index after 'x'");
    BigInt v = nat();
    if (v == 0 || v > n_) fail_at("variable index out of range 1.." + std::to_string(n_), at);
    return static_cast<std::size_t>(v) - 1;
  }

  Expr expr() {
    std::vector<Expr> terms;
    bool negate = false;
    if (accept('-')) negate = true;
    else accept('+');
    Expr t = term();
    terms.push_back(negate ? -t : t);
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        break;
      }
    }
    return Expr::sum(std::move(terms));
  }

  Expr term() {
    std::vector<Expr> fs{factor()};
    while (accept('*')) fs.push_back(factor());
    return Expr::product(std::move(fs));
  }

  Expr factor() {
    Expr b = base();
    if (accept('^')) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '-') fail("negative powers are not allowed");
      b = Expr::pow(b, small_nat("power"));
    }
    return b;
  }

  Expr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    std::size_t at = pos_;
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      BigInt num = nat();
      if (accept('/')) {
        std::size_t den_at = (skip_ws(), pos_);
        BigInt den = nat();
        if (den == 0) fail_at("division by zero", den_at);
        return Expr::constant(Rational(num, den));
      }
      return Expr::constant(Rational(num));
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string id = ident();
      if (id == "x") return Expr::variable(var_index(at));
      if (id == "exp") {
        expect('(');
        Expr e = expr();
        expect(')');
        return Expr::exp(e);
      }
      if (id == "flat" || id == "flatm") {
        expect('(');
        LatticeVector mono = flat_argument();
        expect(',');
        std::size_t k_at = (skip_ws(), pos_);
        unsigned k = small_nat("k");
        if (k == 0) fail_at("flat atoms need k >= 1", k_at);
        unsigned m = 0;
        if (id == "flatm") {
          expect(',');
          m = small_nat("m");
        }
        expect(')');
        return Expr::flat(mono, k, m);
      }
      fail_at("unknown identifier '" + id + "'", at);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  // Either a coordinate index or a monomial x_i^a * x_j^b.
  LatticeVector flat_argument() {
    skip_ws();
    std::size_t at = pos_;
    LatticeVector mono(n_);
    if (at_digit()) {
      BigInt v = nat();
      if (v == 0 || v > n_) fail_at("flat index out of range 1.." + std::to_string(n_), at);
      mono[static_cast<std::size_t>(v) - 1] = 1;
      return mono;
    }
    do {
      std::size_t vat = (skip_ws(), pos_);
      if (ident() != "x") fail_at("expected a coordinate index or monomial", vat);
      std::size_t i = var_index(vat);
      Int p = 1;
      if (accept('^')) p = small_nat("power");
      mono[i] += p;
    } while (accept('*'));
    return mono;
  }
};

}  // namespace

Expr parse_expr(const std::string& text, std::size_t n) { return Parser(text, n).parse(); }

// ---------------------------------------------------------------------------
// Compiled evaluation

CompiledExpr::CompiledExpr(const Expr& e) { emit(e, 1); }

void CompiledExpr::emit(const Expr& e, std::size_t depth) {
  max_depth_ = std::max(max_depth_, depth);
  switch (e.kind()) {
    case Expr::Kind::Constant:
      code_.push_back({Op::Const, 0, static_cast<double>(e.value())});
      return;
    case Expr::Kind::Variable:
      code_.push_back({Op::Var, 0, static_cast<double>(e.index())});
      return;
    case Expr::Kind::Flat: {
      FlatAtom atom;
      for (std::size_t i = 0; i < e.mono().size(); ++i)
        if (e.mono()[i] != 0) atom.mono.emplace_back(i, e.mono()[i]);
      atom.two_k = 2.0 * e.flat_k();
      atom.m = e.flat_m();
      atom.odd_m = e.flat_m() % 2 == 1;
      flats_.push_back(std::move(atom));
      code_.push_back({Op::Flat, static_cast<unsigned>(flats_.size() - 1), 0});
      return;
    }
    case Expr::Kind::Exp:
      emit(e.args()[0], depth);
      code_.push_back({Op::Exp, 0, 0});
      return;
    case Expr::Kind::Power:
      emit(e.args()[0], depth);
      code_.push_back({Op::Pow, e.exponent(), 0});
      return;
    case Expr::Kind::Product:
    case Expr::Kind::Sum:
      for (std::size_t i = 0; i < e.args().size(); ++i) emit(e.args()[i], depth + i);
      code_.push_back({e.kind() == Expr::Kind::Sum ? Op::Add : Op::Mul,
                       static_cast<unsigned>(e.args().size()), 0});
      return;
  }
}

double CompiledExpr::operator()(std::span<const double> x) const {
  if (code_.empty()) return 0.0;
  constexpr std::size_t kInline = 64;
  double inline_stack[kInline];
  std::vector<double> heap;
  double* stack = inline_stack;
  if (max_depth_ + 1 > kInline) {
    heap.resize(max_depth_ + 1);
    stack = heap.data();
  }
  std::size_t sp = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Const:
        stack[sp++] = ins.value;
        break;
      case Op::Var:
        stack[sp++] = x[static_cast<std::size_t>(ins.value)];
        break;
      case Op::Flat: {
        const auto& f = flats_[ins.count];
        double u = 1.0;
        for (const auto& [i, p] : f.mono)
          for (Int r = 0; r < p; ++r) u *= x[i];
        stack[sp++] = flat_value(u, f.two_k, f.m, f.odd_m);
        break;
      }
      case Op::Exp:
        stack[sp - 1] = std::exp(stack[sp - 1]);
        break;
      case Op::Pow: {
        double b = stack[sp - 1];
        double r = 1.0;
        for (unsigned i = 0; i < ins.count; ++i) r *= b;
        stack[sp - 1] = r;
        break;
      }
      case Op::Add: {
        double acc = 0.0;
        for (unsigned i = 0; i < ins.count; ++i) acc += stack[--sp];
        stack[sp++] = acc;
        break;
      }
      case Op::Mul: {
        double acc = 1.0;
        for (unsigned i = 0; i < ins.count; ++i) acc *= stack[--sp];
        stack[sp++] = acc;
        break;
      }
    }
  }
  return stack[0];
}

}  // namespace torasc
