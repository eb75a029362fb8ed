#include "torasc/verify.hpp"

#include <algorithm>
#include <random>

#include "torasc/asymptotics.hpp"
#include "torasc/fixtures.hpp"
#include "torasc/toric.hpp"

namespace torasc {

namespace {

struct Instance {
  std::string name;
  Analysis a;
  bool charted;  // P certified and away from the origin
};

void record(SuiteResult& r, double value, const std::string& where) {
  ++r.checks;
  r.worst = std::max(r.worst, value);
  if (!(value <= r.threshold) && r.passed) {
    r.passed = false;
    r.detail = where + ": " + std::to_string(value);
  }
}

}  // namespace

std::vector<SuiteResult> run_property_suites(int random_phases, std::uint64_t seed) {
  std::vector<Instance> all;
  for (const auto& fx : builtin_fixtures()) {
    auto a = analyze(fx.f);
    bool charted = a.membership.verdict != Verdict::Rejected && a.annotation.has_value();
    all.push_back({fx.name, std::move(a), charted});
  }
  std::mt19937_64 rng(seed);
  for (int i = 0; i < random_phases; ++i) {
    auto f = random_polynomial_phase(2 + i % 2, rng);
    all.push_back({"random " + f.str(), analyze(f), true});
  }

  SuiteResult a{"a", "chart identity f(pi(y)) = y^l f_sigma(y)", true, 0, 1e-10, 0, 0, ""};
  SuiteResult b{"b", "unimodular cones covering the orthant", true, 0, 0, 0, 0, ""};
  SuiteResult c{"c", "Euler identity on face parts", true, 0, 1e-8, 0, 0, ""};
  SuiteResult d{"d", "Jacobian against finite differences", true, 0, 1e-6, 0, 0, ""};
  SuiteResult e{"e", "quasihomogeneity of face parts", true, 0, 1e-12, 0, 0, ""};
  SuiteResult f{"f", "max card A(sigma) = m", true, 0, 0, 0, 0, ""};

  std::uint64_t s = seed;
  for (const auto& inst : all) {
    const auto& an = inst.a;
    const std::size_t n = an.f.n();

    ++b.instances;
    for (const auto& cone : an.sigma.maximal())
      record(b, cone.multiplicity() == 1 ? 0.0 : 1.0, inst.name + " cone with |det| != 1");
    std::uniform_int_distribution<Int> coord(0, 20);
    for (int k = 0; k < 400; ++k) {
      std::vector<Int> v(n);
      for (auto& x : v) x = coord(rng);
      LatticeVector lv(v);
      if (lv.is_zero()) continue;
      int holding = 0, interior = 0;
      for (const auto& cone : an.sigma.maximal()) {
        auto co = cone.coordinates(lv);
        if (!co) continue;
        bool in = std::all_of(co->begin(), co->end(), [](const Rational& q) { return q >= 0; });
        bool strict = std::all_of(co->begin(), co->end(), [](const Rational& q) { return q > 0; });
        holding += in;
        interior += strict;
      }
      record(b, holding >= 1 && interior <= 1 ? 0.0 : 1.0, inst.name + " covering fails at " + lv.str());
    }

    if (!inst.charted) continue;
    ++a.instances;
    ++c.instances;
    ++d.instances;
    ++e.instances;
    ++f.instances;
    for (const auto& cone : an.sigma.maximal()) {
      auto chart = build_chart(an.f, cone, an.P);
      record(a, chart_identity_residual(an.f, chart, 200, s++), inst.name + " chart " + chart.map.str());
      record(d, jacobian_residual(chart.map, 100, s++), inst.name + " map " + chart.map.str());
    }
    for (const auto& face : an.P.faces()) {
      auto fg = gamma_part(an.f, face, an.P);
      std::vector<ValidPair> pairs{face.defining_pair()};
      for (auto id : face.facet_ids()) pairs.push_back(an.P.facets()[id]);
      for (const auto& vp : pairs) {
        record(c, euler_identity_residual(fg, vp, 50, s++), inst.name + " face " + face.describe(an.P));
        record(e, quasihomogeneity_residual(fg, vp, 100, s++), inst.name + " face " + face.describe(an.P));
      }
    }
    std::size_t most = 0;
    for (const auto& ca : an.annotation->cones) most = std::max(most, ca.A.size());
    record(f, std::abs(static_cast<double>(most) - an.m()), inst.name);
  }
  return {a, b, c, d, e, f};
}

nlohmann::json to_json(const SuiteResult& r) {
  nlohmann::json j{{"suite", r.id},        {"title", r.title},         {"passed", r.passed},
                   {"worst", r.worst},     {"threshold", r.threshold}, {"instances", r.instances},
                   {"checks", r.checks}};
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

}  // namespace torasc
