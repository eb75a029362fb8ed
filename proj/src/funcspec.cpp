#include "torasc/funcspec.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "torasc/errors.hpp"

namespace torasc {

namespace {

Expr monomial(const LatticeVector& q) {
  std::vector<Expr> fs;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0) fs.push_back(Expr::pow(Expr::variable(i), static_cast<unsigned>(q[i])));
  return Expr::product(std::move(fs));
}

bool identically_zero(const Expr& e, std::size_t n) { return e.is_zero() || CanonicalSum::of(e, n).empty(); }

}  // namespace

FunctionSpec::FunctionSpec(std::size_t n, std::vector<Term> terms) : n_(n) {
  if (n == 0) throw DomainError("dimension must be at least 1");
  std::map<LatticeVector, std::vector<Expr>> grouped;
  for (auto& t : terms) {
    if (t.exponent.size() != n) throw DomainError("term exponent has the wrong dimension");
    if (!t.exponent.is_nonnegative()) throw DomainError("term exponent " + t.exponent.str() + " is negative");
    if (t.factor.arity() > n) throw DomainError("factor uses a variable beyond n");
    grouped[t.exponent].push_back(t.factor);
  }
  for (auto& [p, fs] : grouped) {
    Expr sum = Expr::sum(std::move(fs));
    if (identically_zero(sum, n)) continue;
    terms_.push_back({p, sum});
  }
}

std::vector<LatticeVector> FunctionSpec::exponents() const {
  std::vector<LatticeVector> out;
  for (const auto& t : terms_) out.push_back(t.exponent);
  return out;
}

std::string FunctionSpec::str(const std::string& var) const {
  if (terms_.empty()) return "0";
  std::vector<Expr> parts;
  // Descending exponents reads naturally: x1^8 + x1^7*x2 + ...
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) parts.push_back(monomial(it->exponent) * it->factor);
  return Expr::sum(std::move(parts)).str(var);
}

Expr FunctionSpec::to_expr() const {
  std::vector<Expr> parts;
  for (const auto& t : terms_) parts.push_back(monomial(t.exponent) * t.factor);
  return Expr::sum(std::move(parts));
}

bool FunctionSpec::operator==(const FunctionSpec& other) const {
  if (n_ != other.n_ || terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].exponent != other.terms_[i].exponent) return false;
    if (CanonicalSum::of(terms_[i].factor, n_).str() != CanonicalSum::of(other.terms_[i].factor, n_).str())
      return false;
  }
  return true;
}

FunctionSpec parse_function(const std::string& text, std::size_t n) {
  if (n == 0) throw InputError("dimension must be at least 1");
  Expr e = parse_expr(text, n);
  CanonicalSum c = CanonicalSum::of(e, n);
  std::vector<Term> terms;
  for (const auto& [key, t] : c.terms()) {
    std::vector<Expr> fs{Expr::constant(t.coeff)};
    fs.insert(fs.end(), t.atoms.begin(), t.atoms.end());
    terms.push_back({t.exponent, Expr::product(std::move(fs))});
  }
  return FunctionSpec(n, std::move(terms));
}

FunctionSpec function_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("n")) throw InputError("function JSON needs an object with \"n\"");
    auto n = j.at("n").get<std::int64_t>();
    if (n < 1 || n > 16) throw InputError("\"n\" must be between 1 and 16");
    auto dim = static_cast<std::size_t>(n);
    if (j.contains("expression")) return parse_function(j.at("expression").get<std::string>(), dim);
    std::vector<Term> terms;
    for (const auto& t : j.at("terms")) {
      auto coords = t.at("exponent").get<std::vector<Int>>();
      if (coords.size() != dim) throw InputError("term exponent length differs from n");
      LatticeVector p(coords);
      if (!p.is_nonnegative()) throw InputError("term exponent " + p.str() + " has a negative entry");
      terms.push_back({p, parse_expr(t.at("factor").get<std::string>(), dim)});
    }
    return FunctionSpec(dim, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed function JSON: ") + e.what());
  }
}

nlohmann::json to_json(const FunctionSpec& f) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : f.terms()) terms.push_back({{"exponent", t.exponent.coords()}, {"factor", t.factor.str()}});
  return {{"n", f.n()}, {"terms", terms}};
}

namespace {

// Taylor constant of one canonical product: c·Π exp(g_i(0)). nullopt when
// some exp argument is not rational at the origin.
std::optional<ExpSum> product_constant(const CanonicalTerm& t) {
  ExpSum acc{{Rational(0), t.coeff}};
  for (const auto& atom : t.atoms) {
    auto v = value_at_origin(atom);
    if (!v) return std::nullopt;
    ExpSum next;
    for (const auto& [ra, ca] : acc)
      for (const auto& [rb, cb] : *v) next[ra + rb] += ca * cb;
    acc.clear();
    for (auto& [r, c] : next)
      if (c != 0) acc[r] = c;
  }
  return acc;
}

bool has_flat_atom(const CanonicalTerm& t) {
  return std::any_of(t.atoms.begin(), t.atoms.end(),
                     [](const Expr& a) { return a.kind() == Expr::Kind::Flat; });
}

}  // namespace

std::vector<LatticeVector> taylor_support(const FunctionSpec& f) {
  std::map<LatticeVector, ExpSum> exact;
  std::map<LatticeVector, bool> inexact;
  for (const auto& term : f.terms()) {
    CanonicalSum c = CanonicalSum::of(term.factor, f.n());
    for (const auto& [key, t] : c.terms()) {
      if (has_flat_atom(t)) continue;
      LatticeVector q = term.exponent + t.exponent;
      auto v = product_constant(t);
      if (!v) {
        inexact[q] = true;
        continue;
      }
      auto& slot = exact[q];
      for (const auto& [r, coeff] : *v) {
        slot[r] += coeff;
        if (slot[r] == 0) slot.erase(r);
      }
    }
  }
  std::vector<LatticeVector> out;
  for (const auto& [q, v] : exact)
    if (!v.empty()) out.push_back(q);
  for (const auto& [q, flag] : inexact)
    if (!exact.count(q) || exact[q].empty()) out.push_back(q);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::EHat:
      return "EHat";
    case Verdict::EHatP:
      return "EHatP";
    case Verdict::Rejected:
      return "Rejected";
  }
  return "";
}

namespace {

// 1 nonzero, 0 zero, decided exactly when possible.
bool factor_nonzero_at_origin(const Expr& e, std::size_t n) {
  if (auto v = value_at_origin(e)) return !v->empty();
  std::vector<double> zero(n, 0.0);
  return CompiledExpr(e)(zero) != 0.0;
}

}  // namespace

MembershipReport check_membership(const FunctionSpec& f, const std::optional<LatticePolyhedron>& declared) {
  const std::size_t n = f.n();
  MembershipReport r;
  r.hull = LatticePolyhedron::build(n, f.exponents());
  r.taylor_polyhedron = LatticePolyhedron::build(n, taylor_support(f));
  if (f.is_zero()) {
    r.verdict = Verdict::EHat;
    r.certified = r.hull;
    r.witness = "f is identically zero; its Newton polyhedron is empty";
    return r;
  }

  std::string vanishing;
  for (const auto& v : r.hull.vertices()) {
    auto it = std::find_if(f.terms().begin(), f.terms().end(), [&](const Term& t) { return t.exponent == v; });
    if (it == f.terms().end()) throw ConsistencyError("hull vertex without a term");
    if (!factor_nonzero_at_origin(it->factor, n)) {
      vanishing = "factor at vertex " + v.str() + " vanishes at the origin";
      break;
    }
  }
  const bool same_hull = r.hull == r.taylor_polyhedron;
  if (same_hull && vanishing.empty()) {
    r.verdict = Verdict::EHat;
    r.certified = r.hull;
    r.witness = "term hull equals the Taylor polyhedron and every vertex factor is nonzero at 0";
    return r;
  }
  std::string mismatch = vanishing.empty() ? "term hull differs from the Taylor polyhedron" : vanishing;

  if (declared) {
    bool all_in = std::all_of(f.terms().begin(), f.terms().end(),
                              [&](const Term& t) { return declared->contains(t.exponent); });
    if (all_in && !declared->is_empty()) {
      r.verdict = Verdict::EHatP;
      r.certified = *declared;
      r.witness = mismatch + "; every term exponent lies in the declared polyhedron";
      return r;
    }
  }
  // Every smooth function lies in the class for P = R₊ⁿ, so a hull through
  // the origin certifies nothing.
  if (!r.hull.contains_origin()) {
    r.verdict = Verdict::EHatP;
    r.certified = r.hull;
    r.witness = mismatch + "; certified only relative to the term hull";
    return r;
  }
  r.verdict = Verdict::Rejected;
  r.certified = LatticePolyhedron::empty(n);
  r.witness = mismatch + "; term hull contains the origin";
  return r;
}

FunctionSpec gamma_part(const FunctionSpec& f, const Face& gamma, const LatticePolyhedron& P) {
  if (P.is_empty()) throw DomainError("gamma part of an empty polyhedron");
  for (const auto& t : f.terms())
    if (!P.contains(t.exponent)) throw DomainError("term exponent " + t.exponent.str() + " lies outside P");
  if (!(P.make_face(gamma.vertex_ids(), gamma.V()) == gamma)) throw DomainError("gamma is not a face of P");
  std::vector<Term> terms;
  for (const auto& t : f.terms())
    if (gamma.contains(t.exponent, P)) terms.push_back({t.exponent, t.factor.restrict_to_zero(gamma.W())});
  return FunctionSpec(f.n(), std::move(terms));
}

double evaluate(const FunctionSpec& f, std::span<const double> x) {
  if (x.size() != f.n()) throw DomainError("evaluation point has the wrong dimension");
  for (double v : x)
    if (!std::isfinite(v)) throw DomainError("evaluation point is not finite");
  return CompiledFunction(f)(x);
}

FunctionSpec differentiate(const FunctionSpec& f, std::size_t i) {
  if (i >= f.n()) throw DomainError("derivative index out of range");
  std::vector<Term> terms;
  for (const auto& t : f.terms()) {
    if (t.exponent[i] > 0) {
      LatticeVector lower = t.exponent;
      lower[i] -= 1;
      terms.push_back({lower, Expr::constant(t.exponent[i]) * t.factor});
    }
    Expr d = t.factor.derivative(i);
    if (!d.is_zero()) terms.push_back({t.exponent, d});
  }
  return FunctionSpec(f.n(), std::move(terms));
}

CompiledFunction::CompiledFunction(const FunctionSpec& f) : n_(f.n()) {
  for (const auto& t : f.terms()) {
    Piece p;
    for (std::size_t i = 0; i < t.exponent.size(); ++i)
      if (t.exponent[i] > 0) p.mono.emplace_back(i, t.exponent[i]);
    p.constant_factor = t.factor.is_constant();
    p.value = p.constant_factor ? static_cast<double>(t.factor.value()) : 0.0;
    if (!p.constant_factor) p.factor = CompiledExpr(t.factor);
    pieces_.push_back(std::move(p));
  }
}

double CompiledFunction::operator()(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& p : pieces_) {
    double m = 1.0;
    for (const auto& [i, e] : p.mono)
      for (Int r = 0; r < e; ++r) m *= x[i];
    acc += m * (p.constant_factor ? p.value : p.factor(x));
  }
  return acc;
}

}  // namespace torasc
