#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "torasc/errors.hpp"
#include "torasc/geometry.hpp"

using namespace torasc;

namespace {

std::vector<ValidPair> pairs(std::initializer_list<std::pair<LatticeVector, Int>> list) {
  std::vector<ValidPair> out;
  for (const auto& [a, l] : list) out.push_back({a, l});
  return out;
}

// Independent hull oracle: every facet normal of Γ₊ is orthogonal to n−1
// independent directions drawn from support differences and unit vectors,
// so enumerating those normals (cross products for n ≤ 3) and keeping the
// valid ones describes Γ₊ without the double-description code.
std::vector<std::array<Int, 4>> oracle_halfspaces(std::size_t n, const std::vector<LatticeVector>& pts) {
  std::vector<std::array<Int, 3>> dirs;
  for (std::size_t k = 0; k < n; ++k) {
    std::array<Int, 3> e{0, 0, 0};
    e[k] = 1;
    dirs.push_back(e);
  }
  for (const auto& p : pts)
    for (const auto& q : pts) {
      if (p == q) continue;
      std::array<Int, 3> d{0, 0, 0};
      for (std::size_t k = 0; k < n; ++k) d[k] = p[k] - q[k];
      dirs.push_back(d);
    }
  std::vector<std::array<Int, 3>> normals;
  if (n == 1) normals.push_back({1, 0, 0});
  if (n == 2)
    for (const auto& d : dirs) normals.push_back({d[1], -d[0], 0});
  if (n == 3)
    for (const auto& d : dirs)
      for (const auto& e : dirs)
        normals.push_back({d[1] * e[2] - d[2] * e[1], d[2] * e[0] - d[0] * e[2], d[0] * e[1] - d[1] * e[0]});
  std::vector<std::array<Int, 4>> out;
  for (auto a : normals) {
    bool nonneg = std::all_of(a.begin(), a.begin() + n, [](Int c) { return c >= 0; });
    bool nonpos = std::all_of(a.begin(), a.begin() + n, [](Int c) { return c <= 0; });
    if (nonpos && !nonneg)
      for (auto& c : a) c = -c;
    else if (!nonneg)
      continue;
    if (std::all_of(a.begin(), a.end(), [](Int c) { return c == 0; })) continue;
    Int l = std::numeric_limits<Int>::max();
    for (const auto& p : pts) {
      Int v = 0;
      for (std::size_t k = 0; k < n; ++k) v += a[k] * p[k];
      l = std::min(l, v);
    }
    out.push_back({a[0], a[1], a[2], l});
  }
  return out;
}

bool oracle_contains(std::size_t n, const std::vector<std::array<Int, 4>>& hs, const RationalVector& x) {
  for (const auto& h : hs) {
    Rational v = 0;
    for (std::size_t k = 0; k < n; ++k) v += Rational(h[k]) * x[k];
    if (v < h[3]) return false;
  }
  return true;
}

LatticePolyhedron ex11_1() { return LatticePolyhedron::build(2, {{8, 0}, {7, 1}, {6, 2}}); }

}  // namespace

TEST_CASE("hull of the three-term planar phase") {
  auto P = ex11_1();
  CHECK(P.facets() == pairs({{{0, 1}, 0}, {{1, 0}, 6}, {{1, 1}, 8}}));
  CHECK(P.vertices() == std::vector<LatticeVector>{{6, 2}, {8, 0}});
  CHECK(P.l_value({1, 0}) == 6);
  CHECK(P.l_value({1, 1}) == 8);
  CHECK(P.l_value({0, 0}) == 0);
  CHECK(P.face_of({0, 0}) == P.whole());
  CHECK_THROWS_AS(P.l_value({1, -1}), DomainError);

  auto nd = newton_distance(P);
  CHECK(nd.d == 6);
  auto pf = principal_face(P);
  CHECK(pf.multiplicity == 1);
  CHECK(pf.face.dim() == 1);
  CHECK(pf.face.V() == IndexSet{1});
  CHECK(pf.face.vertex_ids().size() == 1);
  CHECK(P.vertices()[pf.face.vertex_ids()[0]] == LatticeVector{6, 2});
}

TEST_CASE("two-point hull and distance") {
  auto P = LatticePolyhedron::build(2, {{2, 0}, {0, 2}});
  CHECK(P.facets() == pairs({{{0, 1}, 0}, {{1, 0}, 0}, {{1, 1}, 2}}));
  CHECK(P.vertices() == std::vector<LatticeVector>{{0, 2}, {2, 0}});
  CHECK(newton_distance(P).d == 1);
  CHECK(principal_face(P).multiplicity == 1);
}

TEST_CASE("the orthant and its coordinate faces") {
  for (std::size_t n = 1; n <= 4; ++n) {
    auto P = LatticePolyhedron::build(n, {LatticeVector(n)});
    CHECK(P.facets().size() == n);
    for (const auto& f : P.facets()) {
      CHECK(f.l == 0);
      CHECK(f.a.sum() == 1);
    }
    CHECK(P.vertices() == std::vector<LatticeVector>{LatticeVector(n)});
    CHECK(P.contains_origin());
    auto faces = P.faces();
    CHECK(faces.size() == (std::size_t{1} << n));
    std::set<IndexSet> vsets;
    for (const auto& f : faces) vsets.insert(f.V());
    CHECK(vsets.size() == faces.size());
  }
}

TEST_CASE("faces of the shifted quadrant") {
  auto P = LatticePolyhedron::build(2, {{1, 1}});
  auto faces = P.faces();
  REQUIRE(faces.size() == 4);
  CHECK(faces[0] == P.whole());
  int rays = 0;
  int points = 0;
  for (const auto& f : faces) {
    if (f.dim() == 1) {
      ++rays;
      CHECK_FALSE(f.compact());
      // Face {(1, α₂)}: defining pair ((1,0),1), so V = {2} and W = {1}.
      if (f.defining_pair() == ValidPair{{1, 0}, 1}) {
        CHECK(f.V() == IndexSet{1});
        CHECK(f.W() == IndexSet{0});
      }
    }
    if (f.dim() == 0) {
      ++points;
      CHECK(f.compact());
      CHECK(f.V().empty());
      CHECK(f.lattice_points() == std::vector<LatticeVector>{{1, 1}});
    }
  }
  CHECK(rays == 2);
  CHECK(points == 1);
}

TEST_CASE("distance and principal face in three variables") {
  // Exponents of the non-flat part of x1^6 + x1^2 x2^2 (1 + flat) + x2^6.
  auto P = LatticePolyhedron::build(3, {{6, 0, 0}, {2, 2, 0}, {0, 6, 0}});
  CHECK(newton_distance(P).d == 2);
  auto pf = principal_face(P);
  CHECK(pf.multiplicity == 2);
  CHECK(pf.face.V() == IndexSet{2});
  CHECK(P.vertices()[pf.face.vertex_ids()[0]] == LatticeVector{2, 2, 0});
  CHECK(pf.face.describe(P) == "{(2,2,0) + R+e3}");

  auto Q = LatticePolyhedron::build(3, {{6, 0, 0}, {0, 6, 0}});
  CHECK(newton_distance(Q).d == 3);
  CHECK(principal_face(Q).multiplicity == 1);
}

TEST_CASE("vertex principal face") {
  auto P = LatticePolyhedron::build(2, {{2, 2}});
  auto pf = principal_face(P);
  CHECK(newton_distance(P).d == 2);
  CHECK(pf.multiplicity == 2);
  CHECK(pf.face.dim() == 0);
}

TEST_CASE("errors and the empty polyhedron") {
  CHECK_THROWS_AS(LatticePolyhedron::build(2, {{1, -1}}), DomainError);
  auto E = LatticePolyhedron::build(2, {});
  CHECK(E.is_empty());
  CHECK(E == LatticePolyhedron::empty(2));
  CHECK_THROWS(newton_distance(E));
  CHECK_THROWS(principal_face(E));
}

TEST_CASE("random hulls agree with the hyperplane oracle") {
  std::mt19937_64 rng(20261016);
  std::uniform_int_distribution<int> coord(0, 8);
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_int_distribution<int> num(0, 96);
  std::uniform_int_distribution<int> den(1, 8);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 2 + trial % 2;
    std::vector<LatticeVector> pts;
    int c = count(rng);
    for (int i = 0; i < c; ++i) {
      LatticeVector p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = coord(rng);
      pts.push_back(p);
    }
    auto P = LatticePolyhedron::build(n, pts);
    auto hs = oracle_halfspaces(n, pts);
    int queries = trial < 4 ? 1000 : 100;
    for (int q = 0; q < queries; ++q) {
      RationalVector x(n);
      for (std::size_t k = 0; k < n; ++k) x[k] = Rational(num(rng), den(rng)) / 2;
      REQUIRE(P.contains(x) == oracle_contains(n, hs, x));
    }
    // Points themselves are in, vertices are support points.
    for (const auto& p : pts) CHECK(P.contains(p));
    for (const auto& v : P.vertices()) CHECK(std::find(pts.begin(), pts.end(), v) != pts.end());
  }
}

TEST_CASE("face invariants on random hulls") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coord(0, 6);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 2 + trial % 2;
    std::vector<LatticeVector> pts;
    for (int i = 0; i < 5; ++i) {
      LatticeVector p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = coord(rng);
      pts.push_back(p);
    }
    auto P = LatticePolyhedron::build(n, pts);
    auto faces = P.faces();

    for (const auto& f : faces) {
      // V from two different valid pairs: the defining sum and a reweighted sum.
      auto v_of = [&](const LatticeVector& a) {
        IndexSet v;
        for (std::size_t k = 0; k < n; ++k)
          if (a[k] == 0) v.push_back(k);
        return v;
      };
      CHECK(v_of(f.defining_pair().a) == f.V());
      if (!f.facet_ids().empty()) {
        LatticeVector alt = f.defining_pair().a + P.facets()[f.facet_ids().front()].a * 2;
        CHECK(v_of(alt) == f.V());
        CHECK(P.face_of(alt) == f);
      }
      // Bounded iff no unit direction stays inside the face.
      bool unbounded = false;
      const auto& v0 = P.vertices()[f.vertex_ids().front()];
      for (std::size_t k = 0; k < n; ++k) {
        auto moved = v0 + LatticeVector::unit(n, k);
        if (f.contains(moved, P)) unbounded = true;
      }
      CHECK(f.compact() == !unbounded);
      CHECK(f.compact() == f.V().empty());
      CHECK(f.V().size() + f.W().size() == n);
    }

    // Intersections of faces are faces (or empty).
    for (const auto& f : faces)
      for (const auto& g : faces) {
        IndexSet verts;
        std::set_intersection(f.vertex_ids().begin(), f.vertex_ids().end(), g.vertex_ids().begin(),
                              g.vertex_ids().end(), std::back_inserter(verts));
        if (verts.empty()) continue;
        IndexSet vs;
        std::set_intersection(f.V().begin(), f.V().end(), g.V().begin(), g.V().end(), std::back_inserter(vs));
        bool found = std::any_of(faces.begin(), faces.end(), [&](const Face& h) {
          return h.vertex_ids() == verts && h.V() == vs;
        });
        CHECK(found);
      }

    // q* lies on the boundary on a facet with l > 0.
    if (!P.contains_origin()) {
      auto nd = newton_distance(P);
      CHECK(P.contains(nd.q_star));
      bool tight = false;
      for (const auto& fp : P.facets())
        if (fp.l > 0 && dot(fp.a, nd.q_star) == fp.l) tight = true;
      CHECK(tight);
      auto pf = principal_face(P);
      CHECK(pf.face.contains(nd.q_star, P));
      CHECK(pf.multiplicity == static_cast<int>(n) - pf.face.dim());
    }
  }
}
