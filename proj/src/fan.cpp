#include "torasc/fan.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "torasc/errors.hpp"

namespace torasc {

namespace {

Rational frac(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  BigInt q = num / den;
  if (num < 0 && q * den != num) q -= 1;
  return r - Rational(q);
}

// Inner normals of the facets of cone(rays) inside its span, each paired
// with the rays on that facet.
std::vector<std::pair<LatticeVector, std::vector<LatticeVector>>> facet_data(
    const std::vector<LatticeVector>& rays) {
  std::vector<std::pair<LatticeVector, std::vector<LatticeVector>>> out;
  if (rays.empty()) return out;
  const std::size_t n = rays.front().size();
  const std::size_t d = rank(rays);
  if (d == 0) return out;
  auto perp = integer_kernel(rays, n);
  std::set<std::vector<LatticeVector>> seen;
  // Walk all (d−1)-subsets.
  const std::size_t r = rays.size();
  std::vector<bool> mask(r, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(d - 1), true);
  do {
    std::vector<LatticeVector> rows;
    for (std::size_t i = 0; i < r; ++i)
      if (mask[i]) rows.push_back(rays[i]);
    if (rank(rows) != d - 1) continue;
    rows.insert(rows.end(), perp.begin(), perp.end());
    auto ker = integer_kernel(rows, n);
    if (ker.size() != 1) continue;
    LatticeVector h = ker.front();
    bool pos = false;
    bool neg = false;
    for (const auto& ray : rays) {
      Int v = h.dot(ray);
      if (v > 0) pos = true;
      if (v < 0) neg = true;
    }
    if (pos && neg) continue;
    if (neg) h = h * -1;
    std::vector<LatticeVector> on;
    for (const auto& ray : rays)
      if (h.dot(ray) == 0) on.push_back(ray);
    if (seen.insert(on).second) out.emplace_back(h, on);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

std::vector<std::vector<LatticeVector>> pulling(std::vector<LatticeVector> rays, std::size_t d) {
  std::sort(rays.begin(), rays.end());
  if (rays.size() == d) return {rays};
  const LatticeVector& v = rays.front();
  std::vector<std::vector<LatticeVector>> out;
  for (const auto& [h, facet] : facet_data(rays)) {
    if (std::find(facet.begin(), facet.end(), v) != facet.end()) continue;
    for (auto simplex : pulling(facet, d - 1)) {
      simplex.push_back(v);
      std::sort(simplex.begin(), simplex.end());
      out.push_back(std::move(simplex));
    }
  }
  return out;
}

// Nonzero lattice points of the half-open fundamental parallelepiped.
std::vector<LatticeVector> parallelepiped_points(const std::vector<LatticeVector>& basis) {
  const std::size_t n = basis.size();
  std::vector<RationalVector> gens;
  for (std::size_t k = 0; k < n; ++k) {
    auto lam = solve_in_basis(basis, LatticeVector::unit(n, k));
    if (!lam) throw ConsistencyError("cone skeleton is not a basis");
    for (auto& c : *lam) c = frac(c);
    gens.push_back(*lam);
  }
  std::set<RationalVector> group{RationalVector(n, Rational(0))};
  std::vector<RationalVector> frontier{RationalVector(n, Rational(0))};
  while (!frontier.empty()) {
    std::vector<RationalVector> next;
    for (const auto& x : frontier)
      for (const auto& g : gens) {
        RationalVector y(n);
        for (std::size_t j = 0; j < n; ++j) y[j] = frac(x[j] + g[j]);
        if (group.insert(y).second) next.push_back(y);
      }
    frontier = std::move(next);
  }
  std::vector<LatticeVector> out;
  for (const auto& lam : group) {
    if (std::all_of(lam.begin(), lam.end(), [](const Rational& c) { return c == 0; })) continue;
    LatticeVector w(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rational acc = 0;
      for (std::size_t j = 0; j < n; ++j) acc += lam[j] * basis[j][i];
      if (boost::multiprecision::denominator(acc) != 1) throw ConsistencyError("non-integral parallelepiped point");
      w[i] = static_cast<Int>(boost::multiprecision::numerator(acc));
    }
    out.push_back(w);
  }
  return out;
}

}  // namespace

std::vector<std::vector<LatticeVector>> cone_facets(const std::vector<LatticeVector>& rays) {
  std::vector<std::vector<LatticeVector>> out;
  for (auto& [h, f] : facet_data(rays)) out.push_back(std::move(f));
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Cone::dim() const { return skeleton.empty() ? 0 : rank(skeleton); }

BigInt Cone::multiplicity() const {
  BigInt det = determinant(skeleton);
  return det < 0 ? BigInt(-det) : det;
}

std::optional<RationalVector> Cone::coordinates(const LatticeVector& v) const {
  if (skeleton.empty()) return std::nullopt;
  return solve_in_basis(skeleton, v);
}

bool Cone::contains(const LatticeVector& v) const {
  if (skeleton.empty()) return v.is_zero();
  if (simplicial()) {
    auto lam = coordinates(v);
    return lam && std::all_of(lam->begin(), lam->end(), [](const Rational& c) { return c >= 0; });
  }
  auto with_v = skeleton;
  with_v.push_back(v);
  if (rank(with_v) != dim()) return false;
  for (const auto& [h, f] : facet_data(skeleton))
    if (h.dot(v) < 0) return false;
  return true;
}

Fan::Fan(std::size_t n, std::vector<Cone> maximal) : n_(n), maximal_(std::move(maximal)) {
  for (auto& c : maximal_) std::sort(c.skeleton.begin(), c.skeleton.end());
  std::sort(maximal_.begin(), maximal_.end());
}

std::vector<Cone> Fan::all_cones() const {
  std::set<Cone> seen{Cone{}};
  std::vector<std::vector<LatticeVector>> stack;
  for (const auto& c : maximal_) stack.push_back(c.skeleton);
  while (!stack.empty()) {
    auto rays = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(Cone{rays}).second) continue;
    if (rays.size() > 1)
      for (auto& f : cone_facets(rays)) stack.push_back(std::move(f));
  }
  return {seen.begin(), seen.end()};
}

std::vector<LatticeVector> Fan::rays() const {
  std::set<LatticeVector> out;
  for (const auto& c : maximal_) out.insert(c.skeleton.begin(), c.skeleton.end());
  return {out.begin(), out.end()};
}

std::optional<std::size_t> Fan::locate(const LatticeVector& v) const {
  for (std::size_t i = 0; i < maximal_.size(); ++i)
    if (maximal_[i].contains(v)) return i;
  return std::nullopt;
}

NormalFan normal_fan(const LatticePolyhedron& P) {
  if (P.is_empty()) throw DomainError("normal fan of an empty polyhedron");
  NormalFan out;
  out.faces = P.faces();
  std::vector<Cone> maximal;
  for (const auto& f : out.faces) {
    Cone c;
    for (auto id : f.facet_ids()) c.skeleton.push_back(P.facets()[id].a);
    std::sort(c.skeleton.begin(), c.skeleton.end());
    if (f.dim() == 0) maximal.push_back(c);
    out.duals.push_back(std::move(c));
  }
  out.fan = Fan(P.dim_ambient(), std::move(maximal));
  return out;
}

Fan simplicial_refinement(const Fan& fan) {
  std::vector<Cone> out;
  for (const auto& c : fan.maximal()) {
    if (c.simplicial()) {
      out.push_back(c);
      continue;
    }
    for (auto& s : pulling(c.skeleton, c.dim())) out.push_back(Cone{std::move(s)});
  }
  return Fan(fan.n(), std::move(out));
}

Fan unimodular_subdivision(const Fan& fan) {
  Fan current = simplicial_refinement(fan);
  std::vector<Cone> cones = current.maximal();
  for (int guard = 0;; ++guard) {
    if (guard > 100000) throw ConsistencyError("stellar subdivision did not terminate");
    auto bad = std::find_if(cones.begin(), cones.end(), [](const Cone& c) { return c.multiplicity() > 1; });
    if (bad == cones.end()) break;
    auto pts = parallelepiped_points(bad->skeleton);
    auto w = *std::min_element(pts.begin(), pts.end(), [](const LatticeVector& a, const LatticeVector& b) {
      return std::make_pair(a.sum(), a) < std::make_pair(b.sum(), b);
    });
    std::vector<Cone> next;
    for (const auto& c : cones) {
      auto lam = c.coordinates(w);
      if (!lam || std::any_of(lam->begin(), lam->end(), [](const Rational& x) { return x < 0; })) {
        next.push_back(c);
        continue;
      }
      for (std::size_t j = 0; j < lam->size(); ++j) {
        if ((*lam)[j] == 0) continue;
        Cone s = c;
        s.skeleton[j] = w;
        std::sort(s.skeleton.begin(), s.skeleton.end());
        next.push_back(std::move(s));
      }
    }
    std::sort(next.begin(), next.end());
    cones = std::move(next);
  }
  return Fan(fan.n(), std::move(cones));
}

FanAnnotation annotate_cones(const Fan& sigma, const LatticePolyhedron& P) {
  if (P.is_empty()) throw DomainError("annotation needs a nonempty polyhedron");
  std::map<LatticeVector, Int> lcache;
  for (const auto& a : sigma.rays()) lcache[a] = P.l_value(a);
  std::optional<Rational> beta;
  for (const auto& [a, l] : lcache) {
    if (l == 0) continue;
    Rational v = Rational(-a.sum(), l);
    if (!beta || v > *beta) beta = v;
  }
  if (!beta) throw DomainError("origin in polyhedron: every ray has l(a) = 0");
  auto nd = newton_distance(P);
  if (*beta != -1 / nd.d) throw ConsistencyError("beta tilde differs from -1/d");

  FanAnnotation out;
  out.beta_tilde = *beta;
  out.multiplicity = principal_face(P).multiplicity;
  for (const auto& c : sigma.maximal()) {
    ConeAnnotation ca;
    ca.cone = c;
    for (std::size_t j = 0; j < c.skeleton.size(); ++j) {
      Int l = lcache.at(c.skeleton[j]);
      ca.l.push_back(l);
      if (l == 0) continue;
      ca.B.push_back(j);
      if (Rational(-c.skeleton[j].sum(), l) == *beta) ca.A.push_back(j);
    }
    ca.in_sigma_star = static_cast<int>(ca.A.size()) == out.multiplicity;
    out.cones.push_back(std::move(ca));
  }
  return out;
}

Face gamma_of(const IndexSet& I, const Cone& sigma, const LatticePolyhedron& P) {
  LatticeVector a(P.dim_ambient());
  Int l = 0;
  for (auto j : I) {
    a = a + sigma.skeleton.at(j);
    l = checked_add(l, P.l_value(sigma.skeleton[j]));
  }
  if (P.l_value(a) != l) throw ConsistencyError("skeleton faces do not meet; cone is not in the fan");
  return P.face_of(a);
}

IndexSet I_of(const Face& gamma, const Cone& sigma, const LatticePolyhedron& P) {
  IndexSet out;
  for (std::size_t j = 0; j < sigma.skeleton.size(); ++j) {
    const auto& a = sigma.skeleton[j];
    Int l = P.l_value(a);
    bool inside = std::all_of(gamma.vertex_ids().begin(), gamma.vertex_ids().end(),
                              [&](std::size_t v) { return a.dot(P.vertices()[v]) == l; }) &&
                  std::all_of(gamma.V().begin(), gamma.V().end(), [&](std::size_t k) { return a[k] == 0; });
    if (inside) out.push_back(j);
  }
  return out;
}

namespace {

nlohmann::json skeleton_json(const Cone& c) {
  nlohmann::json s = nlohmann::json::array();
  for (const auto& a : c.skeleton) s.push_back(a.coords());
  return s;
}

nlohmann::json one_based(const IndexSet& s) {
  nlohmann::json out = nlohmann::json::array();
  for (auto j : s) out.push_back(j + 1);
  return out;
}

}  // namespace

nlohmann::json to_json(const FanAnnotation& ann) {
  nlohmann::json cones = nlohmann::json::array();
  for (const auto& c : ann.cones)
    cones.push_back({{"skeleton", skeleton_json(c.cone)},
                     {"l", c.l},
                     {"A", one_based(c.A)},
                     {"B", one_based(c.B)},
                     {"in_sigma_star", c.in_sigma_star}});
  return {{"cones", cones}, {"beta_tilde", to_string(ann.beta_tilde)}};
}

nlohmann::json to_json(const Fan& fan) {
  nlohmann::json cones = nlohmann::json::array();
  for (const auto& c : fan.maximal()) cones.push_back({{"skeleton", skeleton_json(c)}});
  return {{"n", fan.n()}, {"cones", cones}};
}

}  // namespace torasc
