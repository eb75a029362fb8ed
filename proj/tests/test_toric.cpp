#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "torasc/errors.hpp"
#include "torasc/toric.hpp"
#include "torasc/upoly.hpp"

using namespace torasc;

namespace {

UPoly poly(std::vector<int> c) {
  std::vector<Rational> r;
  for (int v : c) r.emplace_back(v);
  return UPoly(r);
}

IndexSet all_indices(std::size_t n) {
  IndexSet s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = j;
  return s;
}

std::vector<IndexSet> subsets(std::size_t n) {
  std::vector<IndexSet> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    IndexSet s;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) s.push_back(j);
    out.push_back(s);
  }
  return out;
}

// Every chart of the unimodular refinement passes the pull-back identities.
void check_all_charts(const FunctionSpec& f) {
  auto report = check_membership(f, std::nullopt);
  const auto& P = report.hull;
  auto sigma = unimodular_subdivision(normal_fan(P).fan);
  std::uint64_t seed = 1;
  for (const auto& c : sigma.maximal()) {
    auto chart = build_chart(f, c, P);
    CHECK(chart_identity_residual(f, chart, 200, seed++) <= 1e-10);
    CHECK(jacobian_residual(chart.map, 20, seed++) <= 1e-6);
    for (const auto& I : subsets(f.n())) CHECK(gamma_pullback_residual(f, P, chart, I, 50, seed++) <= 1e-10);
    // The vertex p(σ) is where f_σ(0) picks up its coefficient.
    CHECK(P.contains(chart.vertex));
  }
}

}  // namespace

TEST_CASE("univariate polynomials and Sturm counts") {
  auto p = poly({-2, 0, 1});  // z² − 2
  SturmChain s(p);
  CHECK(s.count_positive() == 1);
  CHECK(s.count_negative() == 1);
  CHECK(s.count(Rational(0), Rational(1)) == 0);
  CHECK(s.count(Rational(1), Rational(2)) == 1);
  auto r = isolate_root(p, Rational(0), cauchy_bound(p));
  REQUIRE(r);
  CHECK(std::abs(static_cast<double>(*r) - std::sqrt(2.0)) < 1e-14);

  auto q = poly({1, 1, 1});  // no real roots
  CHECK(SturmChain(q).count_positive() + SturmChain(q).count_negative() == 0);

  auto sq = poly({1, -2, 1}) * poly({3, 1});  // (z−1)²(z+3)
  auto g = UPoly::gcd(sq, sq.derivative());
  CHECK(g.degree() == 1);
  CHECK(g(Rational(1)) == 0);
  auto [quot, rem] = UPoly::divide(sq, poly({-1, 1}));
  CHECK(rem.is_zero());
  CHECK(quot.degree() == 2);

  // Root at the origin is excluded from both half-lines.
  auto z = poly({0, -1, 0, 1});  // z³ − z
  SturmChain sz(z);
  CHECK(sz.count_positive() == 1);
  CHECK(sz.count_negative() == 1);
}

TEST_CASE("monomial map of the planar chart") {
  MonomialMap m(Cone{{{1, 0}, {1, 1}}});
  CHECK(m.str() == "(y1*y2, y2)");
  CHECK(m.jacobian_exponents() == std::vector<Int>{0, 1});
  std::vector<double> y{0.7, 1.3}, x(2);
  m.apply(y, x);
  CHECK(x[0] == doctest::Approx(0.91));
  CHECK(x[1] == doctest::Approx(1.3));
  auto back = m.inverse(x);
  CHECK(back[0] == doctest::Approx(0.7));
  CHECK(back[1] == doctest::Approx(1.3));
  CHECK_THROWS_AS(MonomialMap(Cone{{{1, 0}, {1, 2}}}), DomainError);
  CHECK_THROWS_AS(MonomialMap(Cone{{{1, 0}}}), DomainError);
}

TEST_CASE("planar chart matches the worked example") {
  auto f = parse_function("x1^8 + x1^7*x2 + x1^6*x2^2*(1+flat(2,1))", 2);
  auto P = check_membership(f, std::nullopt).hull;
  auto chart = build_chart(f, Cone{{{1, 0}, {1, 1}}}, P);
  CHECK(chart.l == std::vector<Int>{6, 8});
  CHECK(chart.display() == "y1^2 + y1 + 1 + flat(2,1)");
  CHECK(chart.f_sigma_at_0 == doctest::Approx(1.0));
  CHECK(chart.vertex == LatticeVector{6, 2});
  CHECK(chart_identity_residual(f, chart, 200, 7) <= 1e-10);
  check_all_charts(f);
}

TEST_CASE("three-variable chart in the stated order") {
  auto f = parse_function("x1^6 + x1^2*x2^2*(1+flat(3,1)) + x2^6", 3);
  auto P = LatticePolyhedron::build(3, {{6, 0, 0}, {2, 2, 0}, {0, 6, 0}});
  auto chart = build_chart(f, Cone{{{2, 1, 0}, {1, 1, 0}, {0, 0, 1}}}, P);
  CHECK(chart.map.str() == "(y1^2*y2, y1*y2, y3)");
  CHECK(chart.l == std::vector<Int>{6, 4, 0});
  CHECK(chart.display() == "y1^6*y2^2 + y2^2 + 1 + flat(3,1)");
  CHECK(chart.jacobian == std::vector<Int>{2, 1, 0});
  CHECK(chart_identity_residual(f, chart, 200, 11) <= 1e-10);
  check_all_charts(f);
}

TEST_CASE("monomial phase has a unit chart") {
  auto f = parse_function("x1^2*x2^3", 2);
  auto P = check_membership(f, std::nullopt).hull;
  auto sigma = unimodular_subdivision(normal_fan(P).fan);
  for (const auto& c : sigma.maximal()) {
    auto chart = build_chart(f, c, P);
    CHECK(chart.display() == "1");
  }
}

TEST_CASE("charts reject terms outside the polyhedron") {
  auto f = parse_function("x1^2 + x2^2 + x1", 2);
  auto P = LatticePolyhedron::build(2, {{2, 0}, {0, 2}});
  CHECK_THROWS_AS(build_chart(f, Cone{{{1, 0}, {1, 1}}}, P), ConsistencyError);
}

TEST_CASE("chart evaluator with reflection and scaling") {
  auto f = parse_function("x1^8 + x1^7*x2 + x1^6*x2^2*(1+flat(2,1))", 2);
  auto P = check_membership(f, std::nullopt).hull;
  auto chart = build_chart(f, Cone{{{1, 0}, {1, 1}}}, P);
  ChartEvaluator ev(f, chart, {-1, 1}, {0.5, 2.0});
  CompiledFunction F(f);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int s = 0; s < 100; ++s) {
    std::vector<double> y{u(rng), u(rng)}, x(2);
    ev.point(y, x);
    double lhs = F(x);
    double rhs = std::pow(y[0], 6) * std::pow(y[1], 8) * ev(y);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(lhs)));
  }
}

TEST_CASE("quasihomogeneous parts satisfy the Euler identity") {
  const std::vector<std::pair<const char*, std::size_t>> cases{
      {"x1^8 + x1^7*x2 + x1^6*x2^2*(1+flat(2,1))", 2},
      {"x1^6 + x1^2*x2^2*(1+flat(3,1)) + x2^6", 3},
      {"x1^3 + x1*x2^3*exp(x1) + x2^4 + x1^2*x2^2*x3 + x3^5", 3}};
  for (const auto& [text, n] : cases) {
    auto f = parse_function(text, n);
    auto P = check_membership(f, std::nullopt).hull;
    std::uint64_t seed = 100;
    for (const auto& face : P.faces()) {
      auto fg = gamma_part(f, face, P);
      for (auto id : face.facet_ids()) CHECK(euler_identity_residual(fg, P.facets()[id], 50, seed++) <= 1e-8);
    }
  }
  // Weighted homogeneous polynomial with weight (2,3) and degree 12.
  auto g = parse_function("x1^6 + 3*x1^3*x2^2 - x2^4", 2);
  CHECK(euler_identity_residual(g, ValidPair{{2, 3}, 12}, 200, 9) <= 1e-12);
}

TEST_CASE("nondegeneracy verdicts") {
  auto sq = parse_function("x1^2 + x2^2", 2);
  auto r1 = nondegeneracy_check(sq, check_membership(sq, std::nullopt).hull);
  CHECK(r1.overall == FaceStatus::Verified);

  auto deg = parse_function("x1^2 - 2*x1*x2 + x2^2", 2);
  auto r2 = nondegeneracy_check(deg, check_membership(deg, std::nullopt).hull);
  CHECK(r2.overall == FaceStatus::Refuted);
  bool saw = false;
  for (const auto& e : r2.faces)
    if (e.status == FaceStatus::Refuted) {
      saw = true;
      CHECK(e.dim == 1);
      REQUIRE(e.witness.size() == 2);
      CHECK(e.witness[0] == doctest::Approx(1.0));
      CHECK(e.witness[1] == doctest::Approx(1.0));
      CHECK(e.residual <= 1e-10);
    }
  CHECK(saw);

  auto ex = parse_function("x1^8 + x1^7*x2 + x1^6*x2^2*(1+flat(2,1))", 2);
  auto r3 = nondegeneracy_check(ex, check_membership(ex, std::nullopt).hull);
  CHECK(r3.overall == FaceStatus::Verified);

  // Irrational repeated root: (z² − 2)² on the edge of x1^4 ... x2^4.
  auto irr = parse_function("x1^4 - 4*x1^2*x2^2 + 4*x2^4", 2);
  auto r4 = nondegeneracy_check(irr, check_membership(irr, std::nullopt).hull);
  CHECK(r4.overall == FaceStatus::Refuted);
  for (const auto& e : r4.faces)
    if (e.status == FaceStatus::Refuted) {
      CHECK(e.residual <= 1e-10);
      CompiledFunction F(irr);
      CHECK(std::abs(F(e.witness)) <= 1e-10);
    }

  // Edge whose direction is not a unit step, in three variables.
  auto e3 = parse_function("x1^2*x3^2 - 2*x1*x2*x3 + x2^2 + x3^7 + x1^9", 3);
  auto r5 = nondegeneracy_check(e3, check_membership(e3, std::nullopt).hull);
  CHECK(r5.overall == FaceStatus::Refuted);
}

TEST_CASE("two-dimensional faces by interval search") {
  // Nondegenerate: x1^2 + x2^2 + x3^2 (the triangle face has no critical
  // point on the torus).
  auto f = parse_function("x1^2 + x2^2 + x3^2", 3);
  auto r = nondegeneracy_check(f, check_membership(f, std::nullopt).hull);
  CHECK(r.overall == FaceStatus::Verified);

  // Degenerate: (x1 + x2 − 2 x3)² has a critical line through (1,1,1).
  auto g = parse_function("x1^2 + x2^2 + 4*x3^2 + 2*x1*x2 - 4*x1*x3 - 4*x2*x3", 3);
  auto rg = nondegeneracy_check(g, check_membership(g, std::nullopt).hull);
  CHECK(rg.overall == FaceStatus::Refuted);
  for (const auto& e : rg.faces)
    if (e.status == FaceStatus::Refuted) {
      CHECK(e.residual <= 1e-10);
      for (double v : e.witness) CHECK(v != 0.0);
    }
}

TEST_CASE("nondegeneracy witnesses on random binomial squares") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> c(1, 4);
  for (int trial = 0; trial < 10; ++trial) {
    int a = c(rng), b = c(rng);
    // (a x1 − b x2)² is degenerate at x1/x2 = b/a.
    auto f = parse_function(std::to_string(a * a) + "*x1^2 - " + std::to_string(2 * a * b) + "*x1*x2 + " +
                                std::to_string(b * b) + "*x2^2",
                            2);
    auto r = nondegeneracy_check(f, check_membership(f, std::nullopt).hull);
    CHECK(r.overall == FaceStatus::Refuted);
    for (const auto& e : r.faces)
      if (e.status == FaceStatus::Refuted) {
        CHECK(e.residual <= 1e-10);
        CHECK(e.witness[0] * a == doctest::Approx(e.witness[1] * b));
      }
  }
}

TEST_CASE("json output") {
  auto f = parse_function("x1^8 + x1^7*x2 + x1^6*x2^2*(1+flat(2,1))", 2);
  auto P = check_membership(f, std::nullopt).hull;
  auto j = to_json(build_chart(f, Cone{{{1, 0}, {1, 1}}}, P));
  CHECK(j["map"] == "(y1*y2, y2)");
  CHECK(j["f_sigma"] == "y1^2 + y1 + 1 + flat(2,1)");
  auto nj = to_json(nondegeneracy_check(f, P));
  CHECK(nj["overall"] == "verified");
  (void)all_indices;
}
