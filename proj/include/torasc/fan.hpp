#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "json.hpp"

#include "torasc/geometry.hpp"

namespace torasc {

// Cone generated by primitive vectors in Z₊ⁿ. For simplicial cones the
// skeleton is a basis of its span; it is kept sorted lexicographically.
struct Cone {
  std::vector<LatticeVector> skeleton;

  std::size_t dim() const;
  bool simplicial() const { return dim() == skeleton.size(); }
  // |det| of the skeleton; only for maximal simplicial cones.
  BigInt multiplicity() const;
  // Exact membership; coefficients in the skeleton basis when simplicial.
  bool contains(const LatticeVector& v) const;
  std::optional<RationalVector> coordinates(const LatticeVector& v) const;

  auto operator<=>(const Cone&) const = default;
  bool operator==(const Cone&) const = default;
};

// A fan with support R₊ⁿ stored through its maximal cones, sorted.
class Fan {
 public:
  Fan() = default;
  Fan(std::size_t n, std::vector<Cone> maximal);

  std::size_t n() const { return n_; }
  const std::vector<Cone>& maximal() const { return maximal_; }
  // Every cone of the fan (faces of the maximal cones), deduplicated.
  std::vector<Cone> all_cones() const;
  // Σ^{(1)}: distinct rays, sorted.
  std::vector<LatticeVector> rays() const;
  // Index of a maximal cone containing v.
  std::optional<std::size_t> locate(const LatticeVector& v) const;

 private:
  std::size_t n_ = 0;
  std::vector<Cone> maximal_;
};

// Σ₀ with the face ↔ dual cone pairing: duals[i] is the closure of faces[i]*.
struct NormalFan {
  Fan fan;
  std::vector<Face> faces;
  std::vector<Cone> duals;
};

NormalFan normal_fan(const LatticePolyhedron& P);

// Triangulation without new rays (pulling, lex-smallest ray first).
Fan simplicial_refinement(const Fan& fan);
// Simplicial refinement followed by stellar subdivision until every maximal
// cone has |det| = 1.
Fan unimodular_subdivision(const Fan& fan);

// All proper faces of a cone given by its extreme rays, as ray subsets.
std::vector<std::vector<LatticeVector>> cone_facets(const std::vector<LatticeVector>& rays);

struct ConeAnnotation {
  Cone cone;
  std::vector<Int> l;  // l(a^j)
  IndexSet B;          // {j : l_j ≠ 0}
  IndexSet A;          // {j ∈ B : −⟨a^j⟩/l_j = β̃}
  bool in_sigma_star = false;
};

struct FanAnnotation {
  Rational beta_tilde;
  int multiplicity = 0;  // m(f), for the Σ* flag
  std::vector<ConeAnnotation> cones;
};

// Throws DomainError when every ray has l = 0 (origin in P).
FanAnnotation annotate_cones(const Fan& sigma, const LatticePolyhedron& P);

// γ(I, σ) = P ∩ ⋂_{j∈I} H(a^j, l(a^j)) and I(γ, σ) = {j : γ ⊂ H(a^j, l(a^j))}.
Face gamma_of(const IndexSet& I, const Cone& sigma, const LatticePolyhedron& P);
IndexSet I_of(const Face& gamma, const Cone& sigma, const LatticePolyhedron& P);

nlohmann::json to_json(const FanAnnotation& ann);
nlohmann::json to_json(const Fan& fan);

}  // namespace torasc
