#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "torasc/expr.hpp"
#include "torasc/geometry.hpp"

namespace torasc {

struct Term {
  LatticeVector exponent;
  Expr factor;
};

// f(x) = Σ_p x^p ψ_p(x). Terms are sorted by exponent, one per exponent,
// and identically-zero factors are dropped.
class FunctionSpec {
 public:
  FunctionSpec() = default;
  FunctionSpec(std::size_t n, std::vector<Term> terms);

  std::size_t n() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::vector<LatticeVector> exponents() const;

  // Parseable text form; `var` switches the variable prefix for display.
  std::string str(const std::string& var = "x") const;
  Expr to_expr() const;

  // Structural equality of the normalized representation.
  bool operator==(const FunctionSpec& other) const;

 private:
  std::size_t n_ = 0;
  std::vector<Term> terms_;
};

// Text input splits every summand by its full monomial: x^q·c·atoms goes to
// the term with exponent q.
FunctionSpec parse_function(const std::string& text, std::size_t n);

// { "n": int, "terms": [ { "exponent": [...], "factor": "<expr>" } ] }.
// Also accepts { "n": int, "expression": "<expr>" }.
FunctionSpec function_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FunctionSpec& f);

std::vector<LatticeVector> taylor_support(const FunctionSpec& f);

enum class Verdict { EHat, EHatP, Rejected };
std::string to_string(Verdict v);

struct MembershipReport {
  LatticePolyhedron hull;              // Γ₊ of the term exponents
  LatticePolyhedron taylor_polyhedron; // Γ₊ of the Taylor support
  Verdict verdict = Verdict::Rejected;
  // The polyhedron the verdict is relative to: Γ₊(f) for EHat, P for EHatP.
  LatticePolyhedron certified;
  std::string witness;
};

// Certificate, not a decision: Rejected means this representation certifies
// nothing useful. `declared` is an optional user-supplied P.
MembershipReport check_membership(const FunctionSpec& f,
                                  const std::optional<LatticePolyhedron>& declared = std::nullopt);

// Σ_{p ∈ γ} x^p ψ_p(T_{W(γ)} x) for a face γ of a polyhedron P containing
// every term exponent.
FunctionSpec gamma_part(const FunctionSpec& f, const Face& gamma, const LatticePolyhedron& P);

double evaluate(const FunctionSpec& f, std::span<const double> x);
FunctionSpec differentiate(const FunctionSpec& f, std::size_t i);

// Fast evaluator for Σ x^p ψ_p.
class CompiledFunction {
 public:
  CompiledFunction() = default;
  explicit CompiledFunction(const FunctionSpec& f);
  double operator()(std::span<const double> x) const;
  std::size_t n() const { return n_; }

 private:
  struct Piece {
    std::vector<std::pair<std::size_t, Int>> mono;
    bool constant_factor;
    double value;
    CompiledExpr factor;
  };
  std::size_t n_ = 0;
  std::vector<Piece> pieces_;
};

}  // namespace torasc
