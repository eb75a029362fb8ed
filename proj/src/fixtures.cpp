#include "torasc/fixtures.hpp"

#include "torasc/errors.hpp"

namespace torasc {

namespace {

FunctionSpec spec(std::size_t n, const std::vector<std::pair<std::vector<Int>, std::string>>& terms) {
  nlohmann::json j{{"n", n}, {"terms", nlohmann::json::array()}};
  for (const auto& [p, factor] : terms) j["terms"].push_back({{"exponent", p}, {"factor", factor}});
  return function_from_json(j);
}

std::vector<Fixture> make() {
  const std::string f_k = "x1^2*x2^2 + x1^k*exp(-1/x2^2) with k = ";
  return {
      {"ex2_5_k0", f_k + "0", spec(2, {{{2, 2}, "1"}, {{0, 0}, "flat(2,1)"}})},
      {"ex2_5_k1", f_k + "1", spec(2, {{{2, 2}, "1"}, {{1, 1}, "flatm(2,1,1)"}})},
      {"ex2_5_k2", f_k + "2", spec(2, {{{2, 2}, "1 + flatm(2,1,2)"}})},
      {"ex2_5_k3", f_k + "3", spec(2, {{{2, 2}, "1 + x1*flatm(2,1,2)"}})},
      {"ex11_1", "x1^8 + x1^7*x2 + x1^6*x2^2*(1 + exp(-1/x2^2))",
       spec(2, {{{8, 0}, "1"}, {{7, 1}, "1"}, {{6, 2}, "1 + flat(2,1)"}})},
      {"ex11_2", "x1^6 + x1^4*x2^2*exp(-1/x3^2) + x1^2*x2^4*exp(-1/x3^4) + x2^6",
       spec(3, {{{6, 0, 0}, "1"}, {{4, 2, 0}, "flat(3,1)"}, {{2, 4, 0}, "flat(3,2)"}, {{0, 6, 0}, "1"}})},
      {"ex11_3", "x1^6 + x1^2*x2^2*(1 + exp(-1/x3^2)) + x2^6",
       spec(3, {{{6, 0, 0}, "1"}, {{2, 2, 0}, "1 + flat(3,1)"}, {{0, 6, 0}, "1"}})},
      {"ex11_4", "x1^2 + exp(-1/x2^2)", spec(2, {{{2, 0}, "1"}, {{0, 0}, "flat(2,1)"}})},
      {"monomial_square", "x1^2*x2^2", spec(2, {{{2, 2}, "1"}})},
  };
}

}  // namespace

const std::vector<Fixture>& builtin_fixtures() {
  static const std::vector<Fixture> all = make();
  return all;
}

const Fixture& builtin_fixture(const std::string& name) {
  for (const auto& fx : builtin_fixtures())
    if (fx.name == name) return fx;
  throw InputError("unknown fixture '" + name + "'");
}

nlohmann::json fixture_json(const Fixture& fx) {
  // ordered_json would keep insertion order; plain json sorts keys, which is
  // just as stable.
  auto j = to_json(fx.f);
  j["name"] = fx.name;
  j["description"] = fx.description;
  return j;
}

FunctionSpec random_polynomial_phase(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coord(0, 6);
  std::uniform_int_distribution<int> coeff(1, 5);
  while (true) {
    std::vector<Term> terms;
    for (int t = 0; t < 4; ++t) {
      std::vector<Int> p(n);
      for (auto& v : p) v = coord(rng);
      terms.push_back({LatticeVector(p), Expr::constant(Rational(coeff(rng)))});
    }
    FunctionSpec f(n, std::move(terms));
    if (f.is_zero()) continue;
    if (!LatticePolyhedron::build(n, f.exponents()).contains_origin()) return f;
  }
}

}  // namespace torasc
