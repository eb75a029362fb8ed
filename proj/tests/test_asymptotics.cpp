#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "torasc/asymptotics.hpp"
#include "torasc/errors.hpp"

using namespace torasc;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

namespace {

const char* kEx1 = "x1^8 + x1^7*x2 + x1^6*x2^2*(1+flat(2,1))";
const char* kEx2 = "x1^6 + x1^4*x2^2*flat(3,1) + x1^2*x2^4*flat(3,2) + x2^6";
const char* kEx3 = "x1^6 + x1^2*x2^2*(1+flat(3,1)) + x2^6";

double beta(double u) { return std::abs(u) < 1 ? std::exp(-1 / (1 - u * u)) : 0.0; }

// ∫_{-1}^{1} g, split at 0 for integrands with a kink or endpoint singularity there.
template <class G>
double line(G g) {
  tanh_sinh<double> ts;
  return ts.integrate(g, -1.0, 0.0) + ts.integrate(g, 0.0, 1.0);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Lower bound on d from valid pairs with small normals; exact once the
// facet normals fall inside the search box.
Rational brute_force_d(const std::vector<LatticeVector>& pts, std::size_t n, Int bound) {
  Rational best = 0;
  LatticeVector a(n);
  while (true) {
    if (!a.is_zero()) {
      Int l = std::numeric_limits<Int>::max();
      for (const auto& p : pts) l = std::min(l, a.dot(p));
      best = std::max(best, Rational(l, a.sum()));
    }
    std::size_t k = 0;
    while (k < n && a[k] == bound) a[k++] = 0;
    if (k == n) break;
    ++a[k];
  }
  return best;
}

}  // namespace

TEST_CASE("amplitude") {
  auto phi = Amplitude::unit(2);
  CHECK(phi.at_origin() == doctest::Approx(std::exp(-2.0)));
  double one = gauss_kronrod<double, 61>::integrate(beta, -1.0, 1.0, 15, 1e-14);
  CHECK(phi.integral() == doctest::Approx(one * one).epsilon(1e-12));
  Amplitude shifted({0.5, 2.0}, {0.1, -0.3}, 3.0);
  std::vector<double> x{0.2, 0.4};
  CHECK(shifted(x) == doctest::Approx(3.0 * beta(0.1 / 0.5) * beta(0.7 / 2.0)));
  CHECK(shifted.reach() == std::vector<double>{0.6, 2.3});
  CHECK(shifted.integral() == doctest::Approx(3.0 * 0.5 * 2.0 * one * one));
  CHECK_THROWS_AS(Amplitude({-1.0}, {}, 1.0), InputError);
  CHECK_THROWS_AS(Amplitude::from_json("wide", 2), InputError);
  auto j = Amplitude::from_json(nlohmann::json{{"radius", 0.5}}, 2);
  CHECK(j.radius() == std::vector<double>{0.5, 0.5});
}

TEST_CASE("candidate poles of the planar example") {
  auto a = analyze(parse_function(kEx1, 2));
  auto poles = candidate_poles(*a.annotation, 2, 0, 1);
  REQUIRE(poles.entries.size() == 3);
  CHECK(poles.entries[0].value == Rational(-1, 6));
  CHECK(poles.entries[0].sources == std::vector<std::string>{"(1,0)"});
  CHECK(poles.entries[0].order_bound == 1);
  CHECK(poles.entries[1].value == Rational(-1, 4));
  CHECK(poles.entries[1].sources == std::vector<std::string>{"(1,1)"});
  CHECK(poles.entries[2].value == Rational(-1));
  CHECK(poles.entries[2].sources == std::vector<std::string>{"negative integer"});
  CHECK(poles.beta_tilde == Rational(-1, 6));
  CHECK_THROWS_AS(candidate_poles(*a.annotation, 2, -1, 0), InputError);
}

TEST_CASE("order bound at the first pole") {
  auto a = analyze(parse_function(kEx3, 3));
  auto poles = candidate_poles(*a.annotation, 3, 2, 3);
  CHECK(poles.entries[0].value == Rational(-1, 2));
  CHECK(poles.entries[0].order_bound == 2);
  // Integral 1/d: the bound rises to min(m+1, n).
  auto b = analyze(parse_function("x1*x2", 2));
  auto pb = candidate_poles(*b.annotation, 2, 0, 2);
  CHECK(pb.entries[0].value == Rational(-1));
  CHECK(pb.entries[0].order_bound == 2);
  for (std::size_t i = 1; i < poles.entries.size(); ++i) CHECK(poles.entries[i].value < poles.entries[i - 1].value);
}

TEST_CASE("first candidate pole is -1/d on fixtures and random phases") {
  std::vector<std::pair<std::string, std::size_t>> cases{
      {kEx1, 2}, {kEx2, 3}, {kEx3, 3}, {"x1^2*x2^2", 2}, {"x1^4 + x2^4", 2}};
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> coord(0, 6);
  std::uniform_int_distribution<int> coeff(1, 5);
  int made = 0;
  while (made < 20) {
    std::size_t n = 2 + made % 2;
    std::string text;
    for (int t = 0; t < 4; ++t) {
      std::string mono = std::to_string(coeff(rng));
      for (std::size_t k = 0; k < n; ++k) mono += "*x" + std::to_string(k + 1) + "^" + std::to_string(coord(rng));
      text += (t ? " + " : "") + mono;
    }
    auto f = parse_function(text, n);
    if (check_membership(f).hull.contains_origin()) continue;
    cases.push_back({text, n});
    ++made;
  }
  for (const auto& [text, n] : cases) {
    CAPTURE(text);
    auto f = parse_function(text, n);
    auto a = analyze(f);
    auto poles = candidate_poles(*a.annotation, n, 3, 2);
    Rational max_ray = poles.entries.front().value;
    for (const auto& e : poles.entries)
      if (e.sources.front() != "negative integer") max_ray = std::max(max_ray, e.value);
    CHECK(max_ray == Rational(-1) / a.d());
    CHECK(a.d() == brute_force_d(f.exponents(), n, n == 2 ? 40 : 45));
  }
}

TEST_CASE("closed-form coefficients when m = n") {
  auto a = analyze(parse_function("x1^2*x2^2", 2));
  auto phi = Amplitude::unit(2);
  auto c = leading_zeta_coefficients(a, phi, {});
  CHECK(c.closed_form);
  CHECK(c.L == Rational(1, 4));
  REQUIRE(c.octants.size() == 4);
  CHECK(c.octants[0].theta == std::vector<int>{1, 1});
  CHECK(c.octants[0].plus == doctest::Approx(phi.at_origin() / 4).epsilon(1e-14));
  CHECK(c.octants[0].minus == 0.0);
  CHECK(c.C_minus == 0.0);
  CHECK(c.C == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

  CoefficientOptions pull;
  pull.form = CoefficientForm::Pullback;
  CHECK(leading_zeta_coefficients(a, phi, pull).C == doctest::Approx(c.C).epsilon(1e-14));

  Amplitude zero({1.0, 1.0}, {}, 0.0);
  CHECK(leading_zeta_coefficients(a, zero, {}).C == 0.0);
}

TEST_CASE("planar example coefficient against the one-dimensional integral") {
  auto a = analyze(parse_function(kEx1, 2));
  auto phi = Amplitude::unit(2);
  auto c = leading_zeta_coefficients(a, phi, {});
  CHECK_FALSE(c.closed_form);
  CHECK(c.M[1] == Rational(-1, 3));
  CHECK(c.L == Rational(1, 6));
  // (1/6) ∫_0^∞ φ(0,y) y^{-1/3} (1+e^{-1/y²})^{-1/6} dy
  auto g = [&](double y) {
    std::vector<double> x{0.0, y};
    return phi(x) * std::pow(std::abs(y), -1.0 / 3) * std::pow(1 + std::exp(-1 / (y * y)), -1.0 / 6);
  };
  tanh_sinh<double> ts;
  double half = ts.integrate(g, 0.0, 1.0);
  CHECK(c.octants[0].plus == doctest::Approx(half / 6).epsilon(1e-7));
  for (const auto& o : c.octants) CHECK(o.minus == 0.0);
  CHECK(c.C_plus == doctest::Approx(line(g) / 3).epsilon(1e-7));

  CoefficientOptions pull;
  pull.form = CoefficientForm::Pullback;
  CHECK(leading_zeta_coefficients(a, phi, pull).C_plus == doctest::Approx(c.C_plus).epsilon(1e-6));

  // e^{iπ/12}/3 ∫ ... times Γ(1/6).
  auto lead = osc_leading_term(c);
  CHECK(lead.exponent == Rational(-1, 6));
  CHECK(lead.log_power == 0);
  std::complex<double> expect = boost::math::tgamma(1.0 / 6) * std::polar(1.0, std::numbers::pi / 12) * line(g) / 3.0;
  CHECK(std::abs(lead.coefficient - expect) <= 1e-6 * std::abs(expect));
}

TEST_CASE("three-variable examples against the displayed integrals") {
  auto phi = Amplitude::unit(3);
  tanh_sinh<double> ts;

  auto a3 = analyze(parse_function(kEx3, 3));
  CHECK(a3.m() == 2);
  auto c3 = leading_zeta_coefficients(a3, phi, {});
  auto g3 = [&](double y) {
    std::vector<double> x{0.0, 0.0, y};
    return phi(x) / std::sqrt(1 + std::exp(-1 / (y * y)));
  };
  CHECK(c3.octants[0].plus == doctest::Approx(ts.integrate(g3, 0.0, 1.0) / 24).epsilon(1e-7));
  auto lead3 = osc_leading_term(c3);
  CHECK(lead3.log_power == 1);
  std::complex<double> expect3 = std::sqrt(std::numbers::pi) * std::polar(1.0, std::numbers::pi / 4) * line(g3) / 6.0;
  CHECK(std::abs(lead3.coefficient - expect3) <= 1e-6 * std::abs(expect3));

  auto a2 = analyze(parse_function(kEx2, 3));
  CHECK(a2.d() == 3);
  CHECK(a2.m() == 1);
  auto c2 = leading_zeta_coefficients(a2, phi, {});
  // The chart sends x1 = y1 y2 to 0 on T_A, so the amplitude factor is φ(0,0,y3).
  auto inner = [&](double y3) {
    auto h = [&](double y1) {
      double e1 = y3 == 0 ? 0 : std::exp(-1 / (y3 * y3));
      double e2 = y3 == 0 ? 0 : std::exp(-1 / std::pow(y3, 4));
      if (y1 <= 1) return std::pow(std::pow(y1, 6) + std::pow(y1, 4) * e1 + y1 * y1 * e2 + 1, -1.0 / 3);
      double u = 1 / (y1 * y1);
      return u * std::pow(1 + e1 * u + e2 * u * u + u * u * u, -1.0 / 3);
    };
    boost::math::quadrature::exp_sinh<double> es;
    std::vector<double> x{0.0, 0.0, y3};
    return phi(x) * 2 * es.integrate(h, 0.0, std::numeric_limits<double>::infinity());
  };
  double plane = line(inner);
  auto lead2 = osc_leading_term(c2);
  std::complex<double> expect2 = boost::math::tgamma(4.0 / 3) * std::polar(1.0, std::numbers::pi / 6) * plane;
  CHECK(std::abs(lead2.coefficient - expect2) <= 1e-5 * std::abs(expect2));
}

TEST_CASE("coefficients do not depend on the chosen cone") {
  // x1^4 + x2^4: two Σ* cones, each giving (1/4)φ(0)∫_0^∞ (1+y^4)^{-1/2} dy
  // per octant, and that integral is Γ(1/4)²/(4√π).
  auto a = analyze(parse_function("x1^4 + x2^4", 2));
  REQUIRE(a.sigma_star().size() == 2);
  auto phi = Amplitude::unit(2);
  CoefficientOptions o0, o1;
  o1.cone_index = 1;
  auto c0 = leading_zeta_coefficients(a, phi, o0);
  auto c1 = leading_zeta_coefficients(a, phi, o1);
  double k = std::pow(boost::math::tgamma(0.25), 2) / (4 * std::sqrt(std::numbers::pi));
  CHECK(c0.octants[0].plus == doctest::Approx(phi.at_origin() * k / 4).epsilon(1e-6));
  CHECK(std::abs(c0.C - c1.C) <= 10 * (c0.quad_error + c1.quad_error) + 1e-9);
  CHECK(c0.C == doctest::Approx(phi.at_origin() * k).epsilon(1e-6));
  o0.cone_index = 2;
  CHECK_THROWS_AS(leading_zeta_coefficients(a, phi, o0), InputError);
}

TEST_CASE("sign law") {
  for (const auto& [text, n] : std::vector<std::pair<std::string, std::size_t>>{
           {kEx1, 2}, {kEx2, 3}, {kEx3, 3}, {"x1^2*x2^2", 2}, {"x1^4 + x2^4", 2}, {"x1^3*x2^2 + x2^6", 2}}) {
    CAPTURE(text);
    auto a = analyze(parse_function(text, n));
    Amplitude phi(std::vector<double>(n, 0.7), std::vector<double>(n, 0.05), 2.0);
    auto c = leading_zeta_coefficients(a, phi, {});
    for (const auto& o : c.octants) {
      CHECK(o.plus >= 0);
      CHECK(o.minus >= 0);
    }
    CHECK(c.C > 0);
  }
}

TEST_CASE("hypothesis and membership refusals") {
  auto phi = Amplitude::unit(2);
  // d = 1, indefinite, and f_τ* = f vanishes on the diagonal.
  auto saddle = analyze(parse_function("x1^2 - x2^2", 2));
  CHECK(saddle.nondegeneracy->overall == FaceStatus::Verified);
  CHECK_THROWS_AS(leading_zeta_coefficients(saddle, phi, {}), RefusalError);
  // Degenerate on the edge.
  auto deg = analyze(parse_function("x1^2 - 2*x1*x2 + x2^2", 2));
  CHECK_THROWS_AS(leading_zeta_coefficients(deg, phi, {}), RefusalError);
  // Only certified against a declared polyhedron.
  auto k1 = parse_function("x1^2*x2^2 + x1*x2*flatm(2,1,1)", 2);
  auto P = LatticePolyhedron::build(2, {{1, 1}});
  auto ak1 = analyze(k1, P);
  CHECK(ak1.membership.verdict == Verdict::EHatP);
  CHECK_THROWS_AS(leading_zeta_coefficients(ak1, phi, {}), RefusalError);
  // Outside the class entirely.
  auto a4 = analyze(parse_function("x1^2 + flat(2,1)", 2));
  CHECK(a4.membership.verdict == Verdict::Rejected);
  CHECK(a4.d() == 2);
  CHECK(a4.m() == 1);
  CHECK_THROWS_AS(leading_zeta_coefficients(a4, phi, {}), RefusalError);
  // d = 1 but f ≥ 0: allowed.
  auto a5 = analyze(parse_function("x1^2 + x2^2", 2));
  CHECK_NOTHROW(leading_zeta_coefficients(a5, phi, {}));
}

TEST_CASE("numeric zeta") {
  auto phi = Amplitude::unit(2);
  QuadratureConfig q;
  q.rel_tol = 1e-8;
  auto a = analyze(parse_function(kEx1, 2));
  CHECK(numeric_zeta(a, phi, 0.0, q).value == doctest::Approx(phi.integral()).epsilon(1e-8));
  CHECK_THROWS_AS(numeric_zeta(a, phi, -0.2, q), DomainError);

  // Direct oracle in x: nested tanh-sinh, split along x1 = 0 where f vanishes.
  auto direct = [&](const FunctionSpec& f, double s) {
    CompiledFunction F(f);
    auto outer = [&](double x2) {
      auto in = [&](double x1) {
        std::vector<double> x{x1, x2};
        double v = std::abs(F(x));
        return v == 0 ? 0.0 : std::pow(v, s) * phi(x);
      };
      return line(in);
    };
    return gauss_kronrod<double, 61>::integrate(outer, -1.0, 1.0, 10, 1e-12);
  };
  for (double s : {-0.1, 0.5}) {
    CAPTURE(s);
    CHECK(rel(numeric_zeta(a, phi, s, q).value, direct(a.f, s)) < 1e-6);
  }
  auto sq = analyze(parse_function("x1^2*x2^2", 2));
  CHECK(rel(numeric_zeta(sq, phi, -0.3, q).value, std::pow(line([&](double u) {
                                                         return std::pow(std::abs(u), -0.6) * beta(u);
                                                       }),
                                                       2)) < 1e-6);

  // |f| < 1 on a small support, so Z decreases in s.
  Amplitude small({0.5, 0.5}, {}, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double s : {-0.15, -0.1, -0.05, 0.0}) {
    double z = numeric_zeta(a, small, s, q).value;
    CHECK(z < prev);
    prev = z;
  }
}

TEST_CASE("extrapolation to the pole") {
  auto phi = Amplitude::unit(2);
  QuadratureConfig q;
  q.rel_tol = 1e-7;
  q.abs_tol = 1e-13;
  auto sq = analyze(parse_function("x1^2*x2^2", 2));
  auto e = extrapolate_at_pole(sq, phi, {0.05, 0.02, 0.01}, q);
  CHECK(rel(e.limit, std::exp(-2.0)) < 0.05);

  auto a = analyze(parse_function(kEx1, 2));
  auto g = [&](double y) {
    std::vector<double> x{0.0, y};
    return phi(x) * std::pow(std::abs(y), -1.0 / 3) * std::pow(1 + std::exp(-1 / (y * y)), -1.0 / 6);
  };
  auto e1 = extrapolate_at_pole(a, phi, {0.05, 0.02, 0.01}, q);
  CHECK(rel(e1.limit, line(g) / 3) < 0.05);
  CHECK_THROWS_AS(extrapolate_at_pole(a, phi, {0.1, 0.05}, q), InputError);
}

TEST_CASE("oscillatory integral against a dense grid") {
  auto phi = Amplitude::unit(2);
  OscConfig cfg;
  for (const char* text : {kEx1, "x1^2*x2^2", "x1^2 + flat(2,1)"}) {
    CAPTURE(text);
    auto f = parse_function(text, 2);
    CompiledFunction F(f);
    auto zero = numeric_osc(f, phi, 0.0, cfg);
    CHECK(std::abs(zero.value - phi.integral()) < 1e-8);

    const double t = 40;
    auto r = numeric_osc(f, phi, t, cfg);
    auto rm = numeric_osc(f, phi, -t, cfg);
    CHECK(std::abs(rm.value - std::conj(r.value)) < 1e-8);

    // Composite 8-point Gauss–Legendre on a 300 × 300 grid.
    const auto& xs = boost::math::quadrature::gauss<double, 8>::abscissa();
    const auto& ws = boost::math::quadrature::gauss<double, 8>::weights();
    std::vector<double> nodes, weights;
    const int panels = 300;
    for (int p = 0; p < panels; ++p) {
      double a = -1 + 2.0 * p / panels, h = 1.0 / panels;
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (int s : {-1, 1}) {
          nodes.push_back(a + h + s * h * xs[i]);
          weights.push_back(h * ws[i]);
        }
    }
    std::complex<double> acc = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        std::vector<double> x{nodes[i], nodes[j]};
        acc += weights[i] * weights[j] * phi(x) * std::polar(1.0, t * F(x));
      }
    CHECK(std::abs(r.value - acc) < 1e-7);
  }
}

TEST_CASE("decay fit") {
  std::vector<std::pair<double, std::complex<double>>> s;
  for (int i = 0; i < 12; ++i) {
    double t = 50 * std::pow(100.0, i / 11.0);
    s.push_back({t, std::polar(0.7 * std::pow(t, -1.0 / 3) * std::pow(std::log(t), 2), 0.3 * i)});
  }
  auto fit = fit_decay(s, 3);
  CHECK(fit.eta == 2);
  CHECK(fit.beta == doctest::Approx(-1.0 / 3).epsilon(1e-10));
  CHECK(fit.ssr.size() == 4);
  CHECK_THROWS_AS(fit_decay({s.begin(), s.begin() + 7}, 2), DomainError);
  std::vector<std::pair<double, std::complex<double>>> narrow;
  for (int i = 0; i < 10; ++i) narrow.push_back({100.0 + i, 1.0});
  CHECK_THROWS_AS(fit_decay(narrow, 2), DomainError);
}

TEST_CASE("analysis report fields") {
  auto a = analyze(parse_function(kEx1, 2));
  auto j = to_json(a);
  CHECK(j["d"] == "6");
  CHECK(j["m"] == 1);
  CHECK(j["beta"] == "-1/6");
  CHECK(j["membership"] == to_string(Verdict::EHat));
  CHECK(j["nondegeneracy"]["overall"] == "verified");
}
