#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "torasc/lattice.hpp"

namespace torasc {

// (a, l) with a ∈ Z₊ⁿ: the halfspace ⟨a, α⟩ ≥ l and its boundary hyperplane.
struct ValidPair {
  LatticeVector a;
  Int l = 0;

  auto operator<=>(const ValidPair&) const = default;
  bool operator==(const ValidPair&) const = default;
};

class LatticePolyhedron;

// Nonempty face of a lattice polyhedron P with recession cone R₊ⁿ.
//
// A face is stored as conv(vertices) + cone{e_k : k ∈ V}. The tight facet
// set is closed: it lists every facet of P containing the face.
class Face {
 public:
  const ValidPair& defining_pair() const { return defining_pair_; }
  int dim() const { return dim_; }
  // V(γ) = {k : γ + R₊e_k ⊂ γ}; W(γ) its complement. 0-based.
  const IndexSet& V() const { return v_set_; }
  const IndexSet& W() const { return w_set_; }
  bool compact() const { return v_set_.empty(); }
  // Indices into the owning polyhedron's vertex and facet lists.
  const IndexSet& vertex_ids() const { return vertex_ids_; }
  const IndexSet& facet_ids() const { return facet_ids_; }
  // Integer points of the face; filled only for compact faces.
  const std::vector<LatticeVector>& lattice_points() const { return lattice_points_; }

  bool contains(const RationalVector& x, const LatticePolyhedron& P) const;
  bool contains(const LatticeVector& x, const LatticePolyhedron& P) const;
  bool is_subface_of(const Face& other) const;

  // "{(6,2) + R₊e2}"-style description.
  std::string describe(const LatticePolyhedron& P) const;

  bool operator==(const Face& other) const {
    return vertex_ids_ == other.vertex_ids_ && v_set_ == other.v_set_;
  }

 private:
  friend class LatticePolyhedron;
  ValidPair defining_pair_;
  int dim_ = -1;
  IndexSet v_set_;
  IndexSet w_set_;
  IndexSet vertex_ids_;
  IndexSet facet_ids_;
  std::vector<LatticeVector> lattice_points_;
};

// Γ₊ = conv(∪ α + R₊ⁿ): an unbounded lattice polyhedron with recession cone
// R₊ⁿ, held as an irredundant facet list plus its vertices.
class LatticePolyhedron {
 public:
  // The distinguished empty polyhedron in dimension n.
  static LatticePolyhedron empty(std::size_t n);
  // Throws DomainError for points with a negative coordinate.
  static LatticePolyhedron build(std::size_t n, const std::vector<LatticeVector>& support);

  std::size_t dim_ambient() const { return n_; }
  bool is_empty() const { return empty_; }
  const std::vector<ValidPair>& facets() const { return facets_; }
  const std::vector<LatticeVector>& vertices() const { return vertices_; }

  bool contains(const RationalVector& x) const;
  bool contains(const LatticeVector& x) const;
  bool contains_origin() const;

  // l(a) = min ⟨a, α⟩ over P and the face H(a, l(a)) ∩ P.
  Int l_value(const LatticeVector& a) const;
  Face face_of(const LatticeVector& a) const;

  // All nonempty faces, P itself first, then by dimension descending.
  std::vector<Face> faces() const;
  // The face spanned by a set of vertices and recession directions.
  Face make_face(IndexSet vertex_ids, IndexSet v_set) const;
  // Smallest face containing x ∈ P.
  Face minimal_face_containing(const RationalVector& x) const;
  Face whole() const;

  bool operator==(const LatticePolyhedron& other) const {
    return n_ == other.n_ && empty_ == other.empty_ && facets_ == other.facets_;
  }

 private:
  std::size_t n_ = 0;
  bool empty_ = true;
  std::vector<ValidPair> facets_;
  std::vector<LatticeVector> vertices_;

  IndexSet tight_facets(const IndexSet& vertex_ids, const IndexSet& v_set) const;
  Face finish_face(IndexSet vertex_ids, IndexSet v_set) const;
};

// Newton distance d and the diagonal point q* = (d, ..., d).
struct NewtonDistance {
  Rational d;
  RationalVector q_star;
};

NewtonDistance newton_distance(const LatticePolyhedron& P);

struct PrincipalFace {
  Face face;
  int multiplicity = 0;  // m = n − dim τ*
};

PrincipalFace principal_face(const LatticePolyhedron& P);

}  // namespace torasc
