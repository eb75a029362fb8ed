#include "torasc/geometry.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "torasc/errors.hpp"

namespace torasc {

namespace {

bool includes(const IndexSet& big, const IndexSet& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Incremental double description for the cone
//   C* = {(a, b) ∈ R^{n+1} : a ≥ 0, ⟨a, p⟩ + b ≥ 0 for p ∈ support}
// whose extreme rays with a ≠ 0 are exactly the facets (a, −b) of Γ₊.
class DoubleDescription {
 public:
  DoubleDescription(std::size_t n, const std::vector<LatticeVector>& points) : n_(n) {
    for (std::size_t k = 0; k < n; ++k) {
      LatticeVector row(n + 1);
      row[k] = 1;
      constraints_.push_back(row);
    }
    for (const auto& p : points) {
      LatticeVector row(n + 1);
      for (std::size_t k = 0; k < n; ++k) row[k] = p[k];
      row[n] = 1;
      constraints_.push_back(row);
    }
  }

  std::vector<LatticeVector> run() {
    const std::size_t total = constraints_.size();
    // Seed: the simplicial cone cut out by a ≥ 0 and the first point.
    const LatticeVector& p0 = constraints_[n_];
    {
      LatticeVector r0(n_ + 1);
      r0[n_] = 1;
      add_ray(r0, n_ + 1);
      for (std::size_t k = 0; k < n_; ++k) {
        LatticeVector rk(n_ + 1);
        rk[k] = 1;
        rk[n_] = -p0[k];
        add_ray(rk, n_ + 1);
      }
    }
    for (std::size_t c = n_ + 1; c < total; ++c) step(c);
    std::vector<LatticeVector> out;
    for (const auto& r : rays_) out.push_back(r.v);
    return out;
  }

 private:
  struct Ray {
    LatticeVector v;
    std::vector<bool> zero;  // over processed constraints
  };

  std::size_t n_;
  std::vector<LatticeVector> constraints_;
  std::vector<Ray> rays_;

  Int value(const LatticeVector& r, std::size_t c) const { return constraints_[c].dot(r); }

  void add_ray(LatticeVector v, std::size_t processed) {
    v = v.primitive();
    Ray r{v, std::vector<bool>(constraints_.size(), false)};
    for (std::size_t c = 0; c < processed; ++c) r.zero[c] = value(v, c) == 0;
    rays_.push_back(std::move(r));
  }

  bool adjacent(std::size_t i, std::size_t j, std::size_t processed) const {
    std::vector<bool> common(processed);
    std::size_t count = 0;
    for (std::size_t c = 0; c < processed; ++c) {
      common[c] = rays_[i].zero[c] && rays_[j].zero[c];
      count += common[c];
    }
    if (count + 2 < n_ + 1) return false;
    for (std::size_t k = 0; k < rays_.size(); ++k) {
      if (k == i || k == j) continue;
      bool contains_all = true;
      for (std::size_t c = 0; c < processed && contains_all; ++c)
        if (common[c] && !rays_[k].zero[c]) contains_all = false;
      if (contains_all) return false;
    }
    return true;
  }

  void step(std::size_t c) {
    std::vector<std::size_t> pos, neg, zer;
    std::vector<Int> val(rays_.size());
    for (std::size_t i = 0; i < rays_.size(); ++i) {
      val[i] = value(rays_[i].v, c);
      (val[i] > 0 ? pos : val[i] < 0 ? neg : zer).push_back(i);
    }
    std::vector<Ray> next;
    std::vector<LatticeVector> created;
    for (auto i : pos)
      for (auto j : neg) {
        if (!adjacent(i, j, c)) continue;
        // val[i] * r_j − val[j] * r_i vanishes on constraint c
        created.push_back(rays_[j].v * val[i] - rays_[i].v * val[j]);
      }
    for (auto i : pos) next.push_back(rays_[i]);
    for (auto i : zer) next.push_back(rays_[i]);
    rays_ = std::move(next);
    for (auto& v : created) add_ray(v, c);
    for (auto& r : rays_) r.zero[c] = value(r.v, c) == 0;
  }
};

}  // namespace

// ---------------------------------------------------------------- polyhedron

LatticePolyhedron LatticePolyhedron::empty(std::size_t n) {
  LatticePolyhedron P;
  P.n_ = n;
  P.empty_ = true;
  return P;
}

LatticePolyhedron LatticePolyhedron::build(std::size_t n, const std::vector<LatticeVector>& support) {
  if (n == 0) throw DomainError("ambient dimension must be at least 1");
  std::set<LatticeVector> points;
  for (const auto& p : support) {
    if (p.size() != n) throw DomainError("support point " + p.str() + " has wrong dimension");
    if (!p.is_nonnegative()) throw DomainError("support point " + p.str() + " has a negative coordinate");
    points.insert(p);
  }
  if (points.empty()) return empty(n);

  std::vector<LatticeVector> pts(points.begin(), points.end());
  DoubleDescription dd(n, pts);
  std::set<ValidPair> facets;
  for (const auto& ray : dd.run()) {
    LatticeVector a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = ray[k];
    if (a.is_zero()) continue;  // homogenising ray (0, 1)
    if (!a.is_nonnegative()) throw ConsistencyError("facet normal with a negative entry");
    Int g = a.content();
    Int l = -ray[n];
    if (l % g != 0) throw ConsistencyError("facet offset not divisible by normal content");
    facets.insert(ValidPair{a.primitive(), l / g});
  }

  LatticePolyhedron P;
  P.n_ = n;
  P.empty_ = false;
  P.facets_.assign(facets.begin(), facets.end());
  for (const auto& p : pts) {
    std::vector<LatticeVector> tight;
    for (const auto& f : P.facets_)
      if (f.a.dot(p) == f.l) tight.push_back(f.a);
    if (rank(tight) == n) P.vertices_.push_back(p);
  }
  std::sort(P.vertices_.begin(), P.vertices_.end());
  return P;
}

bool LatticePolyhedron::contains(const RationalVector& x) const {
  if (empty_) return false;
  for (const auto& f : facets_)
    if (dot(f.a, x) < Rational(f.l)) return false;
  return true;
}

bool LatticePolyhedron::contains(const LatticeVector& x) const {
  if (empty_) return false;
  for (const auto& f : facets_)
    if (f.a.dot(x) < f.l) return false;
  return true;
}

bool LatticePolyhedron::contains_origin() const { return contains(LatticeVector(n_)); }

Int LatticePolyhedron::l_value(const LatticeVector& a) const {
  if (empty_) throw DomainError("l(a) is undefined on the empty polyhedron");
  if (a.size() != n_) throw DomainError("functional has wrong dimension");
  if (!a.is_nonnegative()) throw DomainError("l(a) needs a ∈ Z₊ⁿ; " + a.str() + " has a negative entry");
  Int best = vertices_.front().dot(a);
  for (const auto& v : vertices_) best = std::min(best, v.dot(a));
  return best;
}

Face LatticePolyhedron::face_of(const LatticeVector& a) const {
  Int l = l_value(a);
  IndexSet verts, v_set;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i].dot(a) == l) verts.push_back(i);
  for (std::size_t k = 0; k < n_; ++k)
    if (a[k] == 0) v_set.push_back(k);
  return make_face(verts, v_set);
}

IndexSet LatticePolyhedron::tight_facets(const IndexSet& vertex_ids, const IndexSet& v_set) const {
  IndexSet out;
  for (std::size_t i = 0; i < facets_.size(); ++i) {
    const auto& f = facets_[i];
    bool tight = true;
    for (auto v : vertex_ids)
      if (f.a.dot(vertices_[v]) != f.l) tight = false;
    for (auto k : v_set)
      if (f.a[k] != 0) tight = false;
    if (tight) out.push_back(i);
  }
  return out;
}

Face LatticePolyhedron::make_face(IndexSet vertex_ids, IndexSet v_set) const {
  if (empty_) throw DomainError("the empty polyhedron has no nonempty faces");
  std::sort(vertex_ids.begin(), vertex_ids.end());
  std::sort(v_set.begin(), v_set.end());
  IndexSet tight = tight_facets(vertex_ids, v_set);
  // Close up: everything cut out by the tight facets.
  IndexSet verts, dirs;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    bool ok = true;
    for (auto j : tight)
      if (facets_[j].a.dot(vertices_[i]) != facets_[j].l) ok = false;
    if (ok) verts.push_back(i);
  }
  for (std::size_t k = 0; k < n_; ++k) {
    bool ok = true;
    for (auto j : tight)
      if (facets_[j].a[k] != 0) ok = false;
    if (ok) dirs.push_back(k);
  }
  return finish_face(verts, dirs);
}

Face LatticePolyhedron::finish_face(IndexSet vertex_ids, IndexSet v_set) const {
  Face F;
  F.vertex_ids_ = std::move(vertex_ids);
  F.v_set_ = std::move(v_set);
  F.facet_ids_ = tight_facets(F.vertex_ids_, F.v_set_);
  for (std::size_t k = 0, j = 0; k < n_; ++k) {
    if (j < F.v_set_.size() && F.v_set_[j] == k) {
      ++j;
      continue;
    }
    F.w_set_.push_back(k);
  }
  LatticeVector a(n_);
  Int l = 0;
  for (auto j : F.facet_ids_) {
    a = a + facets_[j].a;
    l = checked_add(l, facets_[j].l);
  }
  F.defining_pair_ = ValidPair{a, l};

  std::vector<LatticeVector> span;
  const auto& v0 = vertices_[F.vertex_ids_.front()];
  for (auto v : F.vertex_ids_) span.push_back(vertices_[v] - v0);
  for (auto k : F.v_set_) span.push_back(LatticeVector::unit(n_, k));
  F.dim_ = static_cast<int>(rank(span));

  if (F.compact()) {
    LatticeVector lo = v0, hi = v0;
    for (auto v : F.vertex_ids_)
      for (std::size_t k = 0; k < n_; ++k) {
        lo[k] = std::min(lo[k], vertices_[v][k]);
        hi[k] = std::max(hi[k], vertices_[v][k]);
      }
    LatticeVector x = lo;
    while (true) {
      if (F.contains(x, *this)) F.lattice_points_.push_back(x);
      std::size_t k = 0;
      while (k < n_ && x[k] == hi[k]) {
        x[k] = lo[k];
        ++k;
      }
      if (k == n_) break;
      ++x[k];
    }
    std::sort(F.lattice_points_.begin(), F.lattice_points_.end());
  }
  return F;
}

Face LatticePolyhedron::whole() const {
  IndexSet verts(vertices_.size()), dirs(n_);
  for (std::size_t i = 0; i < verts.size(); ++i) verts[i] = i;
  for (std::size_t k = 0; k < n_; ++k) dirs[k] = k;
  return make_face(verts, dirs);
}

std::vector<Face> LatticePolyhedron::faces() const {
  if (empty_) throw DomainError("the empty polyhedron has no nonempty faces");
  std::map<std::pair<IndexSet, IndexSet>, Face> found;
  std::vector<Face> queue{whole()};
  found.emplace(std::make_pair(queue[0].vertex_ids(), queue[0].V()), queue[0]);
  while (!queue.empty()) {
    Face F = queue.back();
    queue.pop_back();
    for (std::size_t j = 0; j < facets_.size(); ++j) {
      if (std::binary_search(F.facet_ids().begin(), F.facet_ids().end(), j)) continue;
      IndexSet verts, dirs;
      for (auto v : F.vertex_ids())
        if (facets_[j].a.dot(vertices_[v]) == facets_[j].l) verts.push_back(v);
      if (verts.empty()) continue;
      for (auto k : F.V())
        if (facets_[j].a[k] == 0) dirs.push_back(k);
      Face G = make_face(verts, dirs);
      auto key = std::make_pair(G.vertex_ids(), G.V());
      if (found.count(key)) continue;
      found.emplace(key, G);
      queue.push_back(G);
    }
  }
  std::vector<Face> out;
  for (auto& [key, F] : found) out.push_back(F);
  std::stable_sort(out.begin(), out.end(), [](const Face& x, const Face& y) { return x.dim() > y.dim(); });
  return out;
}

Face LatticePolyhedron::minimal_face_containing(const RationalVector& x) const {
  if (!contains(x)) throw DomainError("point is not in the polyhedron");
  IndexSet tight;
  for (std::size_t j = 0; j < facets_.size(); ++j)
    if (dot(facets_[j].a, x) == Rational(facets_[j].l)) tight.push_back(j);
  IndexSet verts, dirs;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    bool ok = true;
    for (auto j : tight)
      if (facets_[j].a.dot(vertices_[i]) != facets_[j].l) ok = false;
    if (ok) verts.push_back(i);
  }
  for (std::size_t k = 0; k < n_; ++k) {
    bool ok = true;
    for (auto j : tight)
      if (facets_[j].a[k] != 0) ok = false;
    if (ok) dirs.push_back(k);
  }
  return finish_face(verts, dirs);
}

// ---------------------------------------------------------------------- face

bool Face::contains(const RationalVector& x, const LatticePolyhedron& P) const {
  if (!P.contains(x)) return false;
  for (auto j : facet_ids_)
    if (dot(P.facets()[j].a, x) != Rational(P.facets()[j].l)) return false;
  return true;
}

bool Face::contains(const LatticeVector& x, const LatticePolyhedron& P) const {
  if (!P.contains(x)) return false;
  for (auto j : facet_ids_)
    if (P.facets()[j].a.dot(x) != P.facets()[j].l) return false;
  return true;
}

bool Face::is_subface_of(const Face& other) const {
  return includes(other.vertex_ids_, vertex_ids_) && includes(other.v_set_, v_set_);
}

std::string Face::describe(const LatticePolyhedron& P) const {
  std::ostringstream os;
  os << '{';
  if (vertex_ids_.size() == 1) {
    os << P.vertices()[vertex_ids_[0]].str();
  } else {
    os << "conv(";
    for (std::size_t i = 0; i < vertex_ids_.size(); ++i) os << (i ? "," : "") << P.vertices()[vertex_ids_[i]].str();
    os << ')';
  }
  for (auto k : v_set_) os << " + R+e" << (k + 1);
  os << '}';
  return os.str();
}

// ----------------------------------------------------------- distance, face

NewtonDistance newton_distance(const LatticePolyhedron& P) {
  if (P.is_empty()) throw DomainError("Newton distance of the empty polyhedron (flat function)");
  Rational d = 0;
  for (const auto& f : P.facets()) {
    if (f.l <= 0) continue;
    Rational t(f.l, f.a.sum());
    if (t > d) d = t;
  }
  return NewtonDistance{d, RationalVector(P.dim_ambient(), d)};
}

PrincipalFace principal_face(const LatticePolyhedron& P) {
  auto nd = newton_distance(P);
  Face tau = P.minimal_face_containing(nd.q_star);
  return PrincipalFace{tau, static_cast<int>(P.dim_ambient()) - tau.dim()};
}

}  // namespace torasc
