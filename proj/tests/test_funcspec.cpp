#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "torasc/errors.hpp"
#include "torasc/funcspec.hpp"

using namespace torasc;

namespace {

const char* kEx111 = "x1^8 + x1^7*x2 + x1^6*x2^2*(1+flat(2,1))";

std::vector<LatticeVector> exps(const FunctionSpec& f) { return f.exponents(); }

FunctionSpec json_spec(std::size_t n, std::vector<std::pair<LatticeVector, std::string>> terms) {
  nlohmann::json j;
  j["n"] = n;
  j["terms"] = nlohmann::json::array();
  for (const auto& [p, s] : terms) j["terms"].push_back({{"exponent", p.coords()}, {"factor", s}});
  return function_from_json(j);
}

}  // namespace

TEST_CASE("parsing the planar phase") {
  auto f = parse_function(kEx111, 2);
  CHECK(exps(f) == std::vector<LatticeVector>{{6, 2}, {7, 1}, {8, 0}});
  CHECK(f.terms()[0].factor.str() == "1 + flat(2,1)");
  CHECK(parse_function("0", 2).is_zero());
  CHECK(parse_function("x1 - x1", 2).is_zero());
  CHECK_THROWS_AS(parse_function("x3", 2), InputError);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_function("x1 +\n  x2 * )", 2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 8);
  }
  CHECK_THROWS_AS(parse_function("x1^-2", 2), ParseError);
  CHECK_THROWS_AS(parse_function("1/0", 2), ParseError);
  CHECK_THROWS_AS(parse_function("flat(3,1)", 2), ParseError);
  CHECK_THROWS_AS(parse_function("flat(1,0)", 2), ParseError);
  CHECK_THROWS_AS(parse_function("sin(x1)", 2), ParseError);
  CHECK_THROWS_AS(parse_function("x0", 2), ParseError);
  CHECK_THROWS_AS(parse_function("(x1", 2), ParseError);
}

TEST_CASE("grammar fuzz throws only typed errors") {
  const std::string alphabet = "x12+-*^/()flatmexp,0 3";
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 20);
  int parsed = 0;
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    int L = len(rng);
    for (int k = 0; k < L; ++k) s += alphabet[pick(rng)];
    try {
      parse_function(s, 2);
      ++parsed;
    } catch (const InputError&) {
    } catch (const DomainError&) {
    }
  }
  CHECK(parsed > 0);
}

TEST_CASE("pretty printing round-trips") {
  for (const char* text : {kEx111, "x1^2*x2^2*(1 + flatm(2,1,2))", "-3/2*x1 + x2^3*exp(x1 - 1)",
                           "x1^6 + x1^4*x2^2*flat(3,1) + x1^2*x2^4*flat(3,2) + x2^6", "(x1 - x2)^2"}) {
    std::size_t n = std::string(text).find("x3") != std::string::npos || std::string(text).find("(3,") != std::string::npos ? 3 : 2;
    auto f = parse_function(text, n);
    auto g = parse_function(f.str(), n);
    CHECK(f == g);
    CHECK(g.str() == f.str());
    auto h = function_from_json(to_json(f));
    CHECK(h == f);
  }
}

TEST_CASE("Taylor support ignores flat summands") {
  for (const char* text : {"x1^2*x2^2 + flat(2,1)", "x1^2*x2^2 + x1*flat(2,1)", "x1^2*x2^2 + x1^2*flat(2,1)"})
    CHECK(taylor_support(parse_function(text, 2)) == std::vector<LatticeVector>{{2, 2}});
  CHECK(taylor_support(parse_function(kEx111, 2)) == std::vector<LatticeVector>{{6, 2}, {7, 1}, {8, 0}});
  CHECK(taylor_support(parse_function("0", 2)).empty());
  // exp(g) contributes its value at the origin; equal values cancel exactly.
  auto f = json_spec(2, {{{1, 1}, "exp(1) - exp(1 + x1)"}});
  CHECK(taylor_support(f).empty());
  auto g = json_spec(2, {{{1, 1}, "exp(1) - exp(2)"}});
  CHECK(taylor_support(g) == std::vector<LatticeVector>{{1, 1}});
}

TEST_CASE("membership ladder for x1^2 x2^2 + x1^k flat") {
  auto k0 = json_spec(2, {{{2, 2}, "1"}, {{0, 0}, "flat(2,1)"}});
  auto k1 = json_spec(2, {{{2, 2}, "1"}, {{1, 1}, "flatm(2,1,1)"}});
  auto k2 = json_spec(2, {{{2, 2}, "1 + flatm(2,1,2)"}});
  auto k3 = json_spec(2, {{{2, 2}, "1 + x1*flatm(2,1,2)"}});
  CHECK(check_membership(k0).verdict == Verdict::Rejected);
  auto r1 = check_membership(k1);
  CHECK(r1.verdict == Verdict::EHatP);
  CHECK(r1.certified == LatticePolyhedron::build(2, {{1, 1}}));
  CHECK(check_membership(k2).verdict == Verdict::EHat);
  CHECK(check_membership(k3).verdict == Verdict::EHat);

  auto ex4 = json_spec(2, {{{2, 0}, "1"}, {{0, 0}, "flat(2,1)"}});
  auto r4 = check_membership(ex4);
  CHECK(r4.verdict == Verdict::Rejected);
  CHECK(r4.witness.find("(0,0)") != std::string::npos);

  auto planar = check_membership(parse_function(kEx111, 2));
  CHECK(planar.verdict == Verdict::EHat);

  // A declared P overrides the term hull.
  auto declared = check_membership(k1, LatticePolyhedron::build(2, {{1, 0}, {0, 1}}));
  CHECK(declared.verdict == Verdict::EHatP);
  CHECK(declared.certified == LatticePolyhedron::build(2, {{1, 0}, {0, 1}}));
}

TEST_CASE("gamma parts") {
  auto f = parse_function(kEx111, 2);
  auto P = LatticePolyhedron::build(2, taylor_support(f));
  auto tau = principal_face(P).face;
  auto ft = gamma_part(f, tau, P);
  CHECK(ft == parse_function("x1^6*x2^2*(1 + flat(2,1))", 2));
  CHECK(gamma_part(f, P.whole(), P) == f);

  auto k2 = json_spec(2, {{{2, 2}, "1 + flatm(2,1,2)"}});
  auto Q = LatticePolyhedron::build(2, {{1, 1}});
  for (const auto& face : Q.faces())
    if (face.dim() == 0) CHECK(gamma_part(k2, face, Q).is_zero());

  // Compact edge: x1^6 (x1^2 + x1 x2 + x2^2) with the flat summand dropped.
  for (const auto& face : P.faces())
    if (face.compact() && face.dim() == 1)
      CHECK(gamma_part(f, face, P) == parse_function("x1^8 + x1^7*x2 + x1^6*x2^2", 2));

  auto R = LatticePolyhedron::build(2, {{3, 3}});
  CHECK_THROWS_AS(gamma_part(f, R.whole(), R), DomainError);
}

TEST_CASE("evaluation and differentiation") {
  auto f = parse_function(kEx111, 2);
  std::vector<double> one{1.0, 1.0};
  CHECK(evaluate(f, one) == doctest::Approx(3.0 + std::exp(-1.0)).epsilon(1e-15));
  auto flat = parse_function("flat(2,1)", 2);
  CHECK(evaluate(flat, std::vector<double>{0.3, 0.0}) == 0.0);
  CHECK(evaluate(flat, std::vector<double>{0.3, 0.01}) == 0.0);  // underflow clamp
  CHECK_THROWS_AS(evaluate(flat, std::vector<double>{NAN, 1.0}), DomainError);

  CHECK(differentiate(flat, 1) == parse_function("2*flatm(2,1,3)", 2));
  CHECK(differentiate(parse_function("flatm(1,2,1)", 1), 0) == parse_function("-flatm(1,2,2) + 4*flatm(1,2,6)", 1));
}

TEST_CASE("symbolic derivatives match central differences") {
  std::vector<FunctionSpec> fs{parse_function(kEx111, 2),
                               parse_function("x1^2*x2*exp(x1*x2 - 1) + flatm(1,1,3)*x2 + (x1 - x2)^3", 2),
                               parse_function("x1*x2*x3*(2 + flat(3,2)) + exp(x1)^2 - flatm(2,1,1)", 3)};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mag(0.1, 2.0);
  std::bernoulli_distribution neg(0.5);
  for (const auto& f : fs) {
    std::vector<FunctionSpec> grads;
    for (std::size_t i = 0; i < f.n(); ++i) grads.push_back(differentiate(f, i));
    for (int s = 0; s < 100; ++s) {
      std::vector<double> x(f.n());
      for (auto& v : x) v = mag(rng) * (neg(rng) ? -1.0 : 1.0);
      for (std::size_t i = 0; i < f.n(); ++i) {
        const double h = 1e-5;
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        double fd = (evaluate(f, xp) - evaluate(f, xm)) / (2 * h);
        double sym = evaluate(grads[i], x);
        CHECK(std::abs(sym - fd) <= 1e-6 * (1 + std::abs(sym)));
      }
    }
  }
}

TEST_CASE("gamma parts are quasihomogeneous") {
  std::vector<FunctionSpec> fs{
      parse_function(kEx111, 2),
      parse_function("x1^6 + x1^2*x2^2*(1 + flat(3,1)) + x2^6", 3),
      parse_function("x1^3*x2 + x1*x2^4 + x1^2*x2^2*(3 + exp(x1)) + x2^7", 2),
  };
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  std::uniform_real_distribution<double> tdist(0.05, 1.0);
  for (const auto& f : fs) {
    auto P = check_membership(f).certified;
    REQUIRE_FALSE(P.is_empty());
    for (const auto& face : P.faces()) {
      auto fg = gamma_part(f, face, P);
      // Every valid pair through the face: the tight facets and their sum.
      std::vector<ValidPair> vps{face.defining_pair()};
      for (auto id : face.facet_ids()) vps.push_back(P.facets()[id]);
      for (const auto& vp : vps) {
        for (int s = 0; s < 200; ++s) {
          std::vector<double> x(f.n());
          for (auto& v : x) v = coord(rng);
          double t = tdist(rng);
          auto y = x;
          for (std::size_t k = 0; k < f.n(); ++k) y[k] *= std::pow(t, static_cast<double>(vp.a[k]));
          double lhs = evaluate(fg, y);
          double rhs = std::pow(t, static_cast<double>(vp.l)) * evaluate(fg, x);
          CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(rhs), 1e-300) + 1e-300);
        }
      }
    }
  }
}

TEST_CASE("gamma part is the limit of rescaled f") {
  auto f = parse_function("x1^3*x2 + x1*x2^4 + x1^2*x2^2*(3 + exp(x1)) + x2^7 + x1^5*x2^5", 2);
  auto P = check_membership(f).certified;
  std::vector<double> x{0.7, -1.1};
  for (const auto& face : P.faces()) {
    if (face.dim() != 1) continue;
    auto fg = gamma_part(f, face, P);
    const auto& vp = P.facets()[face.facet_ids().front()];
    double target = evaluate(fg, x);
    double prev = INFINITY;
    for (double t : {1e-1, 1e-2, 1e-3}) {
      auto y = x;
      for (std::size_t k = 0; k < 2; ++k) y[k] *= std::pow(t, static_cast<double>(vp.a[k]));
      double err = std::abs(evaluate(f, y) / std::pow(t, static_cast<double>(vp.l)) - target);
      CHECK(err < prev);
      prev = err;
    }
  }
}
