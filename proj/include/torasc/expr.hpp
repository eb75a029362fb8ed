#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "torasc/lattice.hpp"

namespace torasc {

// Immutable expression over x_1..x_n for the smooth factors ψ_p.
//
// Besides polynomials and exp(·) the algebra has one family of flat atoms:
//   F(v, k, m)(x) = u^{-m} exp(-u^{-2k}),  u = x^v,  and F = 0 where u = 0.
// flat(i,k) is F(e_i, k, 0) and flatm(i,k,m) is F(e_i, k, m). Allowing a
// monomial argument makes the algebra closed under differentiation and under
// pulling back along monomial maps x = y^A.
class Expr {
 public:
  enum class Kind { Constant, Variable, Sum, Product, Power, Exp, Flat };

  Expr();  // the constant 0
  static Expr constant(const Rational& value);
  static Expr variable(std::size_t index);  // 0-based
  static Expr flat(LatticeVector mono, unsigned k, unsigned m);
  static Expr exp(const Expr& arg);
  static Expr pow(const Expr& base, unsigned exponent);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);

  friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
  Expr operator-() const;

  Kind kind() const;
  const Rational& value() const;        // Constant
  std::size_t index() const;            // Variable
  const std::vector<Expr>& args() const;  // Sum, Product, Power (base), Exp
  unsigned exponent() const;            // Power
  const LatticeVector& mono() const;    // Flat
  unsigned flat_k() const;
  unsigned flat_m() const;

  bool is_zero() const;
  bool is_constant() const { return kind() == Kind::Constant; }
  bool contains_flat() const;
  // Largest variable index used, plus one (0 when constant).
  std::size_t arity() const;

  // `var` is the variable prefix used when printing ("x" or "y").
  std::string str(const std::string& var = "x") const;

  double evaluate(std::span<const double> x) const;
  Expr derivative(std::size_t i) const;
  // Substitute x_j = 0 for every j in `coords` (T_W in the γ-part formula).
  Expr restrict_to_zero(const IndexSet& coords) const;
  // Substitute x_k = sign_k · y^{rows[k]}; signs are ±1.
  Expr pull_back(const std::vector<LatticeVector>& rows, const std::vector<int>& signs) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Exact value of a factor at x = 0 as Σ c_r e^{r} with rational r and c_r.
// Distinct rational exponents are linearly independent over Q
// (Lindemann–Weierstrass), so the value vanishes iff every c_r is zero.
// nullopt when an exp(·) argument is not itself rational at the origin.
using ExpSum = std::map<Rational, Rational>;
std::optional<ExpSum> value_at_origin(const Expr& e);

// Sum-of-products normal form: Σ c · x^q · (atom product), where atoms are
// the exp(·) and flat factors. Used for Taylor supports, term splitting and
// structural equality.
struct CanonicalTerm {
  Rational coeff;
  LatticeVector exponent;
  std::vector<Expr> atoms;  // sorted by printed form
};

class CanonicalSum {
 public:
  explicit CanonicalSum(std::size_t n) : n_(n) {}
  static CanonicalSum of(const Expr& e, std::size_t n);

  std::size_t n() const { return n_; }
  const std::map<std::pair<LatticeVector, std::vector<std::string>>, CanonicalTerm>& terms() const {
    return terms_;
  }
  bool empty() const { return terms_.empty(); }

  void add(const CanonicalTerm& t);
  CanonicalSum operator+(const CanonicalSum& o) const;
  CanonicalSum operator*(const CanonicalSum& o) const;

  Expr to_expr() const;
  std::string str(const std::string& var = "x") const;

 private:
  std::size_t n_;
  std::map<std::pair<LatticeVector, std::vector<std::string>>, CanonicalTerm> terms_;
};

// Parses the factor grammar; variables beyond n are rejected.
Expr parse_expr(const std::string& text, std::size_t n);

// Stack-machine form of an expression for hot numeric loops.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const Expr& e);
  double operator()(std::span<const double> x) const;

 private:
  enum class Op : unsigned char { Const, Var, Add, Mul, Pow, Exp, Flat };
  struct Instr {
    Op op;
    unsigned count = 0;  // operand count, power, or flat table slot
    double value = 0;    // constant or variable index
  };
  struct FlatAtom {
    std::vector<std::pair<std::size_t, Int>> mono;
    double two_k;
    double m;
    bool odd_m;
  };
  std::vector<Instr> code_;
  std::vector<FlatAtom> flats_;
  std::size_t max_depth_ = 0;
  void emit(const Expr& e, std::size_t depth);
};

// u^{-m} exp(-u^{-2k}) with the underflow clamp; 0 at u = 0.
double flat_value(double u, double two_k, double m, bool odd_m);

}  // namespace torasc
