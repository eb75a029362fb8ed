#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "torasc/fan.hpp"
#include "torasc/funcspec.hpp"

namespace torasc {

// x_k = Π_j y_j^{a_k^j}, the columns a^j being the skeleton of σ in the
// order given.
class MonomialMap {
 public:
  MonomialMap() = default;
  // Requires n linearly independent columns with |det| = 1.
  explicit MonomialMap(const Cone& sigma);

  std::size_t n() const { return columns_.size(); }
  const std::vector<LatticeVector>& columns() const { return columns_; }
  // rows()[k] = (a_k^1, …, a_k^n).
  const std::vector<LatticeVector>& rows() const { return rows_; }

  void apply(std::span<const double> y, std::span<double> x) const;
  // y from x on the open positive orthant, via the inverse integer matrix.
  std::vector<double> inverse(std::span<const double> x) const;
  // J = ±Π y_j^{⟨a^j⟩−1}.
  std::vector<Int> jacobian_exponents() const;
  // "(y1*y2, y2)"
  std::string str() const;

 private:
  std::vector<LatticeVector> columns_;
  std::vector<LatticeVector> rows_;
  std::vector<std::vector<Rational>> inverse_rows_;
};

struct ResolutionChart {
  Cone cone;
  MonomialMap map;
  std::vector<Int> l;
  std::vector<Int> jacobian;
  // f_σ in the chart variables, displayed with prefix "y".
  FunctionSpec f_sigma;
  double f_sigma_at_0 = 0;
  LatticeVector vertex;  // p(σ)

  std::string display() const { return f_sigma.str("y"); }
};

// f_σ(y) = Σ_p y^{⟨a^j,p⟩ − l(a^j)} ψ_p(π(σ)(y)). P is the polyhedron the
// representation is certified against.
ResolutionChart build_chart(const FunctionSpec& f, const Cone& sigma, const LatticePolyhedron& P);

nlohmann::json to_json(const ResolutionChart& c);

// f_{θ,σ}(y) for the reflected and rescaled phase x ↦ f(θ·R·x):
// Σ_p θ^p R^p y^{e_p} ψ_p(θ·R·π(y)). With θ = 1, R = 1 it is f_σ.
class ChartEvaluator {
 public:
  ChartEvaluator(const FunctionSpec& f, const ResolutionChart& chart, std::vector<int> theta,
                 std::vector<double> scale);
  double operator()(std::span<const double> y) const;
  // x = θ·R·π(y).
  void point(std::span<const double> y, std::span<double> x) const;

 private:
  struct Piece {
    double coeff;
    std::vector<std::pair<std::size_t, Int>> mono;  // y exponents e_p
    bool constant;
    double value;
    CompiledExpr factor;
  };
  MonomialMap map_;
  std::vector<int> theta_;
  std::vector<double> scale_;
  std::vector<Piece> pieces_;
};

// Residual checks. Sample points are drawn from a seeded generator.
double chart_identity_residual(const FunctionSpec& f, const ResolutionChart& chart, int samples,
                               std::uint64_t seed);
double gamma_pullback_residual(const FunctionSpec& f, const LatticePolyhedron& P, const ResolutionChart& chart,
                               const IndexSet& I, int samples, std::uint64_t seed);
double euler_identity_residual(const FunctionSpec& f_gamma, const ValidPair& pair, int samples,
                               std::uint64_t seed);
// f_γ(t^a x) against t^l f_γ(x), relative to t^l Σ |terms|.
double quasihomogeneity_residual(const FunctionSpec& f_gamma, const ValidPair& pair, int samples,
                                 std::uint64_t seed);
// Max relative error of |J| against a finite-difference determinant.
double jacobian_residual(const MonomialMap& map, int samples, std::uint64_t seed);

enum class FaceStatus { Verified, Refuted, Unknown };
std::string to_string(FaceStatus s);

struct FaceNondegeneracy {
  std::string face;  // description
  int dim = 0;
  FaceStatus status = FaceStatus::Unknown;
  std::string method;
  std::vector<double> witness;  // x with f_γ(x) = 0 and ∇f_γ(x) ≈ 0
  double residual = 0;
};

struct NondegeneracyReport {
  std::vector<FaceNondegeneracy> faces;
  FaceStatus overall = FaceStatus::Unknown;
};

// Checks ∇f_γ ≠ 0 on (R∖0)ⁿ for every compact face of P. `budget_boxes`
// bounds the interval search used on faces of dimension ≥ 2.
NondegeneracyReport nondegeneracy_check(const FunctionSpec& f, const LatticePolyhedron& P,
                                        std::size_t budget_boxes = 200000);

nlohmann::json to_json(const NondegeneracyReport& r);

}  // namespace torasc
