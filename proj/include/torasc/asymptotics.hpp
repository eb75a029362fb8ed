#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "torasc/fan.hpp"
#include "torasc/funcspec.hpp"
#include "torasc/quadrature.hpp"
#include "torasc/toric.hpp"

namespace torasc {

// φ(x) = c·Π β((x_i − c_i)/r_i) with β(u) = exp(−1/(1−u²)) on |u| < 1.
class Amplitude {
 public:
  Amplitude() = default;
  Amplitude(std::vector<double> radius, std::vector<double> center, double scale);
  static Amplitude unit(std::size_t n);
  // "unit" or {"radius": r | [r_i], "center": [c_i], "scale": c}.
  static Amplitude from_json(const nlohmann::json& j, std::size_t n);
  nlohmann::json to_json() const;

  std::size_t n() const { return radius_.size(); }
  double scale() const { return scale_; }
  const std::vector<double>& radius() const { return radius_; }
  const std::vector<double>& center() const { return center_; }

  double operator()(std::span<const double> x) const;
  // β((x − c_k)/r_k) for one axis.
  double axis(std::size_t k, double x) const;
  double at_origin() const;
  // R_k = |c_k| + r_k, so supp φ ⊂ Π [−R_k, R_k].
  std::vector<double> reach() const;
  double integral() const;

 private:
  std::vector<double> radius_;
  std::vector<double> center_;
  double scale_ = 1;
};

// Everything exact about a phase: membership, Newton data, fans, the chart
// annotations and the nondegeneracy verdict.
struct Analysis {
  FunctionSpec f;
  MembershipReport membership;
  // d, q* and τ* come from the Taylor polyhedron.
  NewtonDistance distance;
  PrincipalFace principal;
  // Polyhedron the charts are built on: the certified one, else the hull.
  LatticePolyhedron P;
  NormalFan sigma0;
  Fan sigma;
  std::optional<FanAnnotation> annotation;
  std::optional<NondegeneracyReport> nondegeneracy;

  const Rational& d() const { return distance.d; }
  int m() const { return principal.multiplicity; }
  std::vector<const ConeAnnotation*> sigma_star() const;
};

Analysis analyze(const FunctionSpec& f, const std::optional<LatticePolyhedron>& declared = std::nullopt,
                 std::size_t budget_boxes = 200000);

nlohmann::json to_json(const Analysis& a);

struct PoleEntry {
  Rational value;
  std::vector<std::string> sources;  // ray "(1,0)" or "negative integer"
  int order_bound = 1;
};

struct CandidatePoleSet {
  std::vector<PoleEntry> entries;  // descending
  Rational beta_tilde;
};

// Ray values −(⟨a⟩+ν)/l(a) for ν ≤ nu_max over rays with l(a) > 0, and the
// integers −1..−lambda_max.
CandidatePoleSet candidate_poles(const FanAnnotation& ann, std::size_t n, int nu_max, int lambda_max);

nlohmann::json to_json(const CandidatePoleSet& c);

enum class CoefficientForm { Chart, Pullback };

struct CoefficientOptions {
  std::size_t cone_index = 0;  // among the Σ* cones, in annotation order
  CoefficientForm form = CoefficientForm::Chart;
  bool assume_nondegenerate = false;
  double y_scale = 0;  // 0: the amplitude reach
  std::uint64_t seed = 1;
  QuadratureConfig quad;
};

struct OctantCoefficient {
  std::vector<int> theta;
  double plus = 0;
  double minus = 0;
  double error = 0;
};

struct LeadingCoeffData {
  Cone sigma;
  IndexSet A;
  std::vector<Int> l;
  Rational L;
  std::vector<Rational> M;  // M_j for every j; zero on A
  Rational d;
  int m = 0;
  std::vector<OctantCoefficient> octants;
  double C_plus = 0;
  double C_minus = 0;
  double C = 0;
  double quad_error = 0;
  bool closed_form = false;
  std::string hypothesis;
  std::string provenance;
};

// Leading Laurent coefficients of Z_± at −1/d. Throws RefusalError when the
// hypotheses cannot be certified, BudgetError when quadrature does not
// converge.
LeadingCoeffData leading_zeta_coefficients(const Analysis& a, const Amplitude& phi, const CoefficientOptions& opt);

nlohmann::json to_json(const LeadingCoeffData& c);

struct OscLeadingTerm {
  Rational exponent;
  int log_power = 0;
  std::complex<double> coefficient;
};

OscLeadingTerm osc_leading_term(const LeadingCoeffData& data);

// Z(s) = ∫ |f|^s φ through the charts of Σ over (0,1)ⁿ, for s > −1/d.
QuadResult numeric_zeta(const Analysis& a, const Amplitude& phi, double s, const QuadratureConfig& cfg);

struct PoleExtrapolation {
  std::vector<double> eps;
  std::vector<double> scaled;  // ε^m Z(−1/d + ε)
  std::vector<double> errors;
  double limit = 0;
  double error = 0;
};

// Quadratic Richardson extrapolation of ε^m Z(−1/d + ε) to ε = 0.
PoleExtrapolation extrapolate_at_pole(const Analysis& a, const Amplitude& phi, const std::vector<double>& eps,
                                      const QuadratureConfig& cfg);

struct OscConfig {
  double abs_tol = 1e-8;
  std::size_t max_evals = 400'000'000;
};

// I(t) = ∫ e^{itf} φ by nested one-dimensional Filon-aware integration. On
// an outer axis the phase f(0,…,0,x_k,…) is split off so the inner integral
// is smooth in x_k.
ComplexQuadResult numeric_osc(const FunctionSpec& f, const Amplitude& phi, double t, const OscConfig& cfg);

struct DecayFit {
  double beta = 0;
  int eta = 0;
  double intercept = 0;
  std::vector<double> ssr;  // per η
  std::vector<double> betas;
};

// Regresses log|I| − η log log t = b + β log t for η = 0..n and keeps the η
// with the smallest residual.
DecayFit fit_decay(const std::vector<std::pair<double, std::complex<double>>>& samples, std::size_t n);

}  // namespace torasc
