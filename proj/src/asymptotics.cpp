#include "torasc/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "torasc/errors.hpp"
#include "torasc/parallel.hpp"

namespace torasc {

namespace {

double bump(double u) {
  if (!(std::abs(u) < 1.0)) return 0.0;
  double e = -1.0 / (1.0 - u * u);
  return e < -745.0 ? 0.0 : std::exp(e);
}

double bump_integral() {
  static const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(bump, -1.0, 1.0, 20, 1e-15);
  return v;
}

double to_double(const Rational& r) { return static_cast<double>(r); }

std::vector<std::vector<int>> octants(std::size_t n) {
  std::vector<std::vector<int>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<int> th(n);
    for (std::size_t k = 0; k < n; ++k) th[k] = (mask & (std::size_t{1} << k)) ? -1 : 1;
    out.push_back(th);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Amplitude

Amplitude::Amplitude(std::vector<double> radius, std::vector<double> center, double scale)
    : radius_(std::move(radius)), center_(std::move(center)), scale_(scale) {
  if (center_.empty()) center_.assign(radius_.size(), 0.0);
  if (radius_.empty() || center_.size() != radius_.size())
    throw InputError("amplitude radius and center must have the same positive length");
  for (double r : radius_)
    if (!(r > 0) || !std::isfinite(r)) throw InputError("amplitude radii must be positive and finite");
  for (double c : center_)
    if (!std::isfinite(c)) throw InputError("amplitude centers must be finite");
  if (!std::isfinite(scale_)) throw InputError("amplitude scale must be finite");
}

Amplitude Amplitude::unit(std::size_t n) { return Amplitude(std::vector<double>(n, 1.0), {}, 1.0); }

Amplitude Amplitude::from_json(const nlohmann::json& j, std::size_t n) {
  if (j.is_string()) {
    if (j.get<std::string>() == "unit") return unit(n);
    throw InputError("unknown amplitude \"" + j.get<std::string>() + "\"");
  }
  if (!j.is_object()) throw InputError("amplitude must be \"unit\" or an object");
  try {
    std::vector<double> r;
    if (!j.contains("radius")) r.assign(n, 1.0);
    else if (j["radius"].is_number()) r.assign(n, j["radius"].get<double>());
    else r = j["radius"].get<std::vector<double>>();
    std::vector<double> c = j.value("center", std::vector<double>(n, 0.0));
    double s = j.value("scale", 1.0);
    if (r.size() != n || c.size() != n) throw InputError("amplitude dimension differs from the function");
    return Amplitude(r, c, s);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad amplitude: ") + e.what());
  }
}

nlohmann::json Amplitude::to_json() const {
  return {{"radius", radius_}, {"center", center_}, {"scale", scale_}};
}

double Amplitude::axis(std::size_t k, double x) const { return bump((x - center_[k]) / radius_[k]); }

double Amplitude::operator()(std::span<const double> x) const {
  double v = scale_;
  for (std::size_t k = 0; k < n() && v != 0.0; ++k) v *= axis(k, x[k]);
  return v;
}

double Amplitude::at_origin() const {
  std::vector<double> z(n(), 0.0);
  return (*this)(z);
}

std::vector<double> Amplitude::reach() const {
  std::vector<double> r(n());
  for (std::size_t k = 0; k < n(); ++k) r[k] = std::abs(center_[k]) + radius_[k];
  return r;
}

double Amplitude::integral() const {
  double v = scale_;
  for (double r : radius_) v *= r * bump_integral();
  return v;
}

// ---------------------------------------------------------------------------
// Analysis

std::vector<const ConeAnnotation*> Analysis::sigma_star() const {
  std::vector<const ConeAnnotation*> out;
  if (!annotation) return out;
  for (const auto& c : annotation->cones)
    if (c.in_sigma_star) out.push_back(&c);
  return out;
}

Analysis analyze(const FunctionSpec& f, const std::optional<LatticePolyhedron>& declared, std::size_t budget_boxes) {
  Analysis a;
  a.f = f;
  a.membership = check_membership(f, declared);
  const auto& T = a.membership.taylor_polyhedron;
  if (T.is_empty()) throw DomainError("the Taylor support is empty: the phase is flat at the origin");
  a.distance = newton_distance(T);
  a.principal = principal_face(T);
  a.P = a.membership.verdict == Verdict::Rejected ? a.membership.hull : a.membership.certified;
  a.sigma0 = normal_fan(a.P);
  a.sigma = unimodular_subdivision(a.sigma0.fan);
  if (!a.P.contains_origin()) a.annotation = annotate_cones(a.sigma, a.P);
  if (a.membership.verdict != Verdict::Rejected) a.nondegeneracy = nondegeneracy_check(f, a.P, budget_boxes);
  return a;
}

namespace {

nlohmann::json polyhedron_json(const LatticePolyhedron& P) {
  nlohmann::json facets = nlohmann::json::array();
  for (const auto& fp : P.facets()) facets.push_back({{"a", fp.a.coords()}, {"l", fp.l}});
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : P.vertices()) verts.push_back(v.coords());
  return {{"vertices", verts}, {"facets", facets}};
}

}  // namespace

nlohmann::json to_json(const Analysis& a) {
  nlohmann::json q = nlohmann::json::array();
  for (const auto& c : a.distance.q_star) q.push_back(to_string(c));
  nlohmann::json j{{"n", a.f.n()},
                   {"function", a.f.str()},
                   {"membership", to_string(a.membership.verdict)},
                   {"membership_witness", a.membership.witness},
                   {"d", to_string(a.d())},
                   {"m", a.m()},
                   {"q_star", q},
                   {"tau_star", a.principal.face.describe(a.membership.taylor_polyhedron)},
                   {"tau_star_dim", a.principal.face.dim()},
                   {"newton_polyhedron", polyhedron_json(a.membership.taylor_polyhedron)},
                   {"chart_polyhedron", polyhedron_json(a.P)}};
  if (a.d() != 0) j["beta"] = to_string(Rational(-1) / a.d());
  if (a.nondegeneracy) j["nondegeneracy"] = to_json(*a.nondegeneracy);
  else j["nondegeneracy"] = {{"overall", "not evaluated"}};
  return j;
}

// ---------------------------------------------------------------------------
// Candidate poles

CandidatePoleSet candidate_poles(const FanAnnotation& ann, std::size_t n, int nu_max, int lambda_max) {
  if (nu_max < 0 || lambda_max < 0) throw InputError("nu_max and lambda_max must be nonnegative");
  std::map<LatticeVector, Int> ray_l;
  for (const auto& c : ann.cones)
    for (std::size_t j = 0; j < c.cone.skeleton.size(); ++j)
      if (c.l[j] > 0) ray_l[c.cone.skeleton[j]] = c.l[j];
  if (ray_l.empty()) throw DomainError("no ray with l(a) > 0");
  const Rational inv_d = -ann.beta_tilde;  // 1/d
  const int m = ann.multiplicity;

  std::map<Rational, PoleEntry, std::greater<Rational>> table;
  for (const auto& [a, l] : ray_l)
    for (int nu = 0; nu <= nu_max; ++nu) {
      Rational v = -Rational(a.sum() + nu, l);
      auto& e = table[v];
      e.value = v;
      e.sources.push_back(a.str());
    }
  for (int lam = 1; lam <= lambda_max; ++lam) {
    auto& e = table[Rational(-lam)];
    e.value = Rational(-lam);
    e.sources.push_back("negative integer");
  }

  // Count of chart factors 1/(l_j s + ⟨a^j⟩ + ν) that vanish at v.
  auto chart_count = [&](const Rational& v) {
    std::size_t best = 0;
    for (const auto& c : ann.cones) {
      std::size_t cnt = 0;
      for (auto j : c.B) {
        Rational nu = -(v * c.l[j]) - c.cone.skeleton[j].sum();
        if (nu >= 0 && denominator(nu) == 1) ++cnt;
      }
      best = std::max(best, cnt);
    }
    return best;
  };

  const int ni = static_cast<int>(n);
  for (auto& [v, e] : table) {
    if (v == -inv_d) {
      e.order_bound = denominator(inv_d) == 1 ? std::min(m + 1, ni) : m;
    } else if (denominator(v) == 1) {
      Rational lam = -v;
      if (lam < inv_d) {
        e.order_bound = 1;
      } else {
        // A_λ(σ) = {j ∈ B(σ) : l_j λ − ⟨a^j⟩ ∈ Z₊}
        int rho = std::min(static_cast<int>(chart_count(v)), ni - 1);
        e.order_bound = rho + 1;
      }
    } else {
      e.order_bound = std::max(1, std::min(static_cast<int>(chart_count(v)), ni));
    }
  }
  CandidatePoleSet out;
  out.beta_tilde = ann.beta_tilde;
  for (auto& [v, e] : table) out.entries.push_back(e);
  return out;
}

nlohmann::json to_json(const CandidatePoleSet& c) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : c.entries)
    arr.push_back({{"value", to_string(e.value)}, {"sources", e.sources}, {"order_bound", e.order_bound}});
  return arr;
}

// ---------------------------------------------------------------------------
// Leading coefficients

namespace {

std::vector<std::vector<double>> sample_support(const Amplitude& phi, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> pts;
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<double> x(phi.n());
    for (std::size_t k = 0; k < phi.n(); ++k) {
      std::uniform_real_distribution<double> u(phi.center()[k] - phi.radius()[k], phi.center()[k] + phi.radius()[k]);
      x[k] = u(rng);
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

// Which of the three sufficient hypotheses holds; empty when none does.
std::string certify_hypothesis(const Analysis& a, const Amplitude& phi, std::uint64_t seed) {
  if (a.d() > 1) return "d(f) > 1";
  auto pts = sample_support(phi, 4096, seed);
  CompiledFunction F(a.f);
  bool pos = true, neg = true;
  for (const auto& x : pts) {
    double v = F(x);
    pos &= v >= 0;
    neg &= v <= 0;
  }
  if (pos || neg) return "f has constant sign on the amplitude support (sampled)";
  CompiledFunction Ft(gamma_part(a.f, a.principal.face, a.P));
  bool nonzero = true;
  for (const auto& x : pts) {
    bool torus = std::all_of(x.begin(), x.end(), [](double v) { return v != 0.0; });
    if (torus && Ft(x) == 0.0) nonzero = false;
  }
  // Sign changes inside one orthant force a zero by continuity.
  std::map<std::vector<int>, int> sign_by_orthant;
  for (const auto& x : pts) {
    std::vector<int> key;
    for (double v : x) key.push_back(v > 0 ? 1 : -1);
    double v = Ft(x);
    int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    auto [it, fresh] = sign_by_orthant.emplace(key, s);
    if (!fresh && it->second != s) nonzero = false;
  }
  if (nonzero) return "f_tau* has no zero on the amplitude support minus the coordinate planes (sampled)";
  return "";
}

struct CoefficientIntegrand {
  const ChartEvaluator* ev;
  const CompiledFunction* f_tau;  // pull-back form only
  const Amplitude* phi;
  const ResolutionChart* chart;
  std::vector<int> theta;
  IndexSet free;
  std::vector<double> M;       // per free axis
  std::vector<Int> degree;     // ⟨a^j⟩ per free axis
  double inv_d;
  double Y;
  bool pullback;
  int sign;  // +1 or −1

  double operator()(std::span<const double> u) const {
    const std::size_t n = chart->map.n();
    std::vector<double> y(n, 0.0), x(n);
    double w = 1.0;
    for (std::size_t i = 0; i < free.size(); ++i) {
      double v = Y * u[i] / (1.0 - u[i]);
      double yi = std::pow(v, 1.0 / (M[i] + 1.0));
      y[free[i]] = yi;
      w *= Y / ((1.0 - u[i]) * (1.0 - u[i]) * (M[i] + 1.0));
    }
    ev->point(y, x);
    double amp = (*phi)(x);
    if (amp == 0.0) return 0.0;
    double val;
    if (!pullback) {
      val = (*ev)(y);
    } else {
      std::vector<double> y1 = y, x1(n);
      for (std::size_t j = 0; j < n; ++j)
        if (std::find(free.begin(), free.end(), j) == free.end()) y1[j] = 1.0;
      chart->map.apply(y1, x1);
      for (std::size_t k = 0; k < n; ++k) x1[k] *= theta[k];
      val = (*f_tau)(x1);
      // y^{⟨a⟩−1} in place of the y^{M} absorbed by the substitution.
      for (std::size_t i = 0; i < free.size(); ++i) {
        double yi = y[free[i]];
        w *= std::pow(yi, static_cast<double>(degree[i] - 1) - M[i]);
      }
    }
    if (!std::isfinite(val)) return 0.0;
    double sv = sign * val;
    if (sv <= 0) return 0.0;
    double r = amp * w / std::pow(sv, inv_d);
    return std::isfinite(r) ? r : 0.0;
  }
};

}  // namespace

LeadingCoeffData leading_zeta_coefficients(const Analysis& a, const Amplitude& phi, const CoefficientOptions& opt) {
  const std::size_t n = a.f.n();
  if (phi.n() != n) throw InputError("amplitude dimension differs from the function");
  if (a.membership.verdict != Verdict::EHat)
    throw RefusalError("leading coefficients need a representation certified in the class EHat; verdict is " +
                       to_string(a.membership.verdict));
  if (!a.annotation) throw RefusalError("the Newton polyhedron contains the origin");
  LeadingCoeffData out;
  out.provenance = "numeric";
  if (a.nondegeneracy) {
    if (a.nondegeneracy->overall == FaceStatus::Refuted)
      throw RefusalError("the phase is degenerate on a compact face");
    if (a.nondegeneracy->overall == FaceStatus::Unknown) {
      if (!opt.assume_nondegenerate)
        throw RefusalError("nondegeneracy could not be decided; rerun with the nondegeneracy override");
      out.provenance = "conditional on nondegeneracy=unknown";
    }
  }
  out.hypothesis = certify_hypothesis(a, phi, opt.seed);
  if (out.hypothesis.empty())
    throw RefusalError("none of the hypotheses (d > 1, constant sign, nonvanishing f_tau*) could be certified");

  auto star = a.sigma_star();
  if (star.empty()) throw ConsistencyError("no cone in Sigma*");
  if (opt.cone_index >= star.size())
    throw InputError("cone index " + std::to_string(opt.cone_index) + " out of range (" +
                     std::to_string(star.size()) + " cones in Sigma*)");
  const ConeAnnotation& ca = *star[opt.cone_index];
  out.sigma = ca.cone;
  out.A = ca.A;
  out.l = ca.l;
  out.d = a.d();
  out.m = a.m();
  out.L = 1;
  for (auto j : ca.A) out.L /= ca.l[j];
  const double inv_d = 1.0 / to_double(out.d);
  auto chart = build_chart(a.f, ca.cone, a.P);

  IndexSet free;
  std::vector<double> M;
  std::vector<Int> degree;
  out.M.assign(n, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    if (std::find(ca.A.begin(), ca.A.end(), j) != ca.A.end()) continue;
    Rational mj = -Rational(ca.l[j]) / out.d + ca.cone.skeleton[j].sum() - 1;
    if (mj <= -1) throw ConsistencyError("exponent M_j <= -1: the coefficient integral diverges");
    out.M[j] = mj;
    free.push_back(j);
    M.push_back(to_double(mj));
    degree.push_back(ca.cone.skeleton[j].sum());
  }
  out.closed_form = free.empty();

  CompiledFunction f_tau;
  if (opt.form == CoefficientForm::Pullback) f_tau = CompiledFunction(gamma_part(a.f, a.principal.face, a.P));
  double Y = opt.y_scale;
  if (Y <= 0) {
    auto r = phi.reach();
    Y = *std::max_element(r.begin(), r.end());
  }
  const double L = to_double(out.L);
  const double phi0 = phi.at_origin();

  for (const auto& theta : octants(n)) {
    OctantCoefficient oc;
    oc.theta = theta;
    ChartEvaluator ev(a.f, chart, theta, std::vector<double>(n, 1.0));
    if (out.closed_form) {
      double v;
      if (opt.form == CoefficientForm::Chart) {
        std::vector<double> zero(n, 0.0);
        v = ev(zero);
      } else {
        std::vector<double> th(theta.begin(), theta.end());
        v = f_tau(th);
      }
      if (v > 0) oc.plus = L * phi0 / std::pow(v, inv_d);
      if (v < 0) oc.minus = L * phi0 / std::pow(-v, inv_d);
    } else {
      for (int sign : {1, -1}) {
        CoefficientIntegrand g{&ev, &f_tau, &phi, &chart, theta, free, M, degree, inv_d, Y,
                               opt.form == CoefficientForm::Pullback, sign};
        std::vector<double> lo(free.size(), 0.0), hi(free.size(), 1.0);
        auto r = adaptive_cubature(std::cref(g), lo, hi, opt.quad);
        (sign > 0 ? oc.plus : oc.minus) = L * r.value;
        oc.error += L * r.error;
      }
    }
    out.C_plus += oc.plus;
    out.C_minus += oc.minus;
    out.quad_error += oc.error;
    out.octants.push_back(std::move(oc));
  }
  out.C = out.C_plus + out.C_minus;
  if (out.closed_form && out.provenance == "numeric") out.provenance = "closed form";
  return out;
}

nlohmann::json to_json(const LeadingCoeffData& c) {
  nlohmann::json skel = nlohmann::json::array();
  for (const auto& v : c.sigma.skeleton) skel.push_back(v.coords());
  nlohmann::json A = nlohmann::json::array();
  for (auto j : c.A) A.push_back(j + 1);
  nlohmann::json M = nlohmann::json::array();
  for (const auto& v : c.M) M.push_back(to_string(v));
  nlohmann::json oct = nlohmann::json::array();
  for (const auto& o : c.octants)
    oct.push_back({{"theta", o.theta}, {"C_tilde_plus", o.plus}, {"C_tilde_minus", o.minus}, {"error", o.error}});
  return {{"cone", skel},          {"A", A},
          {"l", c.l},              {"L_sigma", to_string(c.L)},
          {"M", M},                {"closed_form", c.closed_form},
          {"octants", oct},        {"hypothesis", c.hypothesis},
          {"provenance", c.provenance}};
}

OscLeadingTerm osc_leading_term(const LeadingCoeffData& data) {
  OscLeadingTerm t;
  t.exponent = Rational(-1) / data.d;
  t.log_power = data.m - 1;
  const double d = to_double(data.d);
  double pre = boost::math::tgamma(1.0 / d) / boost::math::factorial<double>(static_cast<unsigned>(data.m - 1));
  const double ph = std::numbers::pi / (2 * d);
  t.coefficient = pre * (std::polar(1.0, ph) * data.C_plus + std::polar(1.0, -ph) * data.C_minus);
  return t;
}

// ---------------------------------------------------------------------------
// Zeta function

QuadResult numeric_zeta(const Analysis& a, const Amplitude& phi, double s, const QuadratureConfig& cfg) {
  const std::size_t n = a.f.n();
  if (phi.n() != n) throw InputError("amplitude dimension differs from the function");
  if (!std::isfinite(s)) throw DomainError("s must be finite");
  if (a.d() > 0 && !(s > -1.0 / to_double(a.d())))
    throw DomainError("s = " + std::to_string(s) + " is outside the convergence region s > -1/d = " +
                      to_string(Rational(-1) / a.d()));
  const auto R = phi.reach();
  double volume = 1;
  for (double r : R) volume *= r;

  QuadResult total;
  for (const auto& cone : a.sigma.maximal()) {
    auto chart = build_chart(a.f, cone, a.P);
    std::vector<double> E(n);
    // 1: y = u^{1/(E+1)} absorbs the weight exactly. 2: y = u^4 keeps smooth
    // factors smooth and lifts a weak weight singularity to u^{4E+3}.
    std::vector<int> sub(n);
    for (std::size_t j = 0; j < n; ++j) {
      E[j] = static_cast<double>(chart.l[j]) * s + static_cast<double>(cone.skeleton[j].sum() - 1);
      if (!(E[j] > -1.0)) throw DomainError("the chart integral diverges at this s");
      bool integral = std::abs(E[j] - std::round(E[j])) <= 1e-12;
      sub[j] = E[j] < 0 ? 1 : (!integral && E[j] < 3 ? 2 : 0);
    }
    for (const auto& theta : octants(n)) {
      ChartEvaluator ev(a.f, chart, theta, R);
      auto g = [&](std::span<const double> u) {
        std::vector<double> y(n), x(n);
        double w = volume;
        for (std::size_t j = 0; j < n; ++j) {
          if (sub[j] == 1) {
            y[j] = std::pow(u[j], 1.0 / (E[j] + 1.0));
            w /= E[j] + 1.0;
          } else if (sub[j] == 2) {
            double u2 = u[j] * u[j];
            y[j] = u2 * u2;
            w *= 4 * std::pow(u[j], 4 * E[j] + 3);
          } else {
            y[j] = u[j];
            w *= std::pow(u[j], E[j]);
          }
        }
        ev.point(y, x);
        double amp = phi(x);
        if (amp == 0.0) return 0.0;
        double F = std::abs(ev(y));
        if (F == 0.0) return 0.0;
        return w * amp * std::pow(F, s);
      };
      auto r = adaptive_cubature(g, std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), cfg);
      total.value += r.value;
      total.error += r.error;
      total.evals += r.evals;
    }
  }
  return total;
}

PoleExtrapolation extrapolate_at_pole(const Analysis& a, const Amplitude& phi, const std::vector<double>& eps,
                                      const QuadratureConfig& cfg) {
  if (eps.size() != 3) throw InputError("extrapolation uses exactly three values of epsilon");
  PoleExtrapolation out;
  out.eps = eps;
  const double inv_d = 1.0 / to_double(a.d());
  const int m = a.m();
  for (double e : eps) {
    if (!(e > 0)) throw InputError("epsilon must be positive");
    auto z = numeric_zeta(a, phi, -inv_d + e, cfg);
    double f = std::pow(e, m);
    out.scaled.push_back(f * z.value);
    out.errors.push_back(f * z.error);
  }
  // Lagrange weights at ε = 0 through all three points (order 2) and the
  // last two (order 1).
  const auto& x = eps;
  double l0 = x[1] * x[2] / ((x[0] - x[1]) * (x[0] - x[2]));
  double l1 = x[0] * x[2] / ((x[1] - x[0]) * (x[1] - x[2]));
  double l2 = x[0] * x[1] / ((x[2] - x[0]) * (x[2] - x[1]));
  out.limit = l0 * out.scaled[0] + l1 * out.scaled[1] + l2 * out.scaled[2];
  double linear = (x[2] * out.scaled[1] - x[1] * out.scaled[2]) / (x[2] - x[1]);
  out.error = std::abs(l0) * out.errors[0] + std::abs(l1) * out.errors[1] + std::abs(l2) * out.errors[2] +
              std::abs(out.limit - linear);
  return out;
}

// ---------------------------------------------------------------------------
// Oscillatory integral

namespace {

struct OscIntegrator {
  CompiledFunction F;
  const Amplitude* phi;
  double t;
  OscConfig cfg;
  std::size_t n;
  std::vector<double> tol;  // per axis
  mutable std::atomic<std::size_t> evals{0};
  mutable double top_error = 0;

  // Integral over x_0..x_k with x_{k+1}.. fixed. On outer axes the phase
  // f(0,…,0,x_k,…) is split off before the Filon rule: the inner integral
  // carries it exactly when the inner variables concentrate at 0, and
  // harmlessly otherwise.
  std::complex<double> axis(std::size_t k, const std::vector<double>& x) const {
    const double lo = phi->center()[k] - phi->radius()[k];
    const double hi = phi->center()[k] + phi->radius()[k];
    OscSample sample = [&](double xk, double& ph, std::complex<double>& amp) {
      std::vector<double> xc = x;
      xc[k] = xk;
      double a = phi->axis(k, xk);
      if (a == 0.0) {
        ph = 0.0;
        amp = 0.0;
        return;
      }
      if (k == 0) {
        ph = F(xc);
        amp = a;
        return;
      }
      std::vector<double> x0 = xc;
      for (std::size_t i = 0; i < k; ++i) x0[i] = 0.0;
      ph = F(x0);
      amp = a * axis(k - 1, xc) * std::polar(1.0, -t * ph);
    };
    auto r = oscillatory_1d(sample, t, lo, hi, tol[k], cfg.max_evals, k + 1 == n && k > 0);
    if ((evals += r.evals) > cfg.max_evals) throw BudgetError("oscillatory quadrature budget exhausted", r.error);
    if (k + 1 == n) top_error = r.error;
    return r.value;
  }
};

}  // namespace

ComplexQuadResult numeric_osc(const FunctionSpec& f, const Amplitude& phi, double t, const OscConfig& cfg) {
  const std::size_t n = f.n();
  if (phi.n() != n) throw InputError("amplitude dimension differs from the function");
  if (!std::isfinite(t)) throw DomainError("t must be finite");
  OscIntegrator I;
  I.F = CompiledFunction(f);
  I.phi = &phi;
  I.t = t;
  I.cfg = cfg;
  I.n = n;
  // An inner error e contributes at most e times the outer volume.
  I.tol.assign(n, cfg.abs_tol);
  double vol = 1;
  for (std::size_t k = n; k-- > 1;) {
    vol *= 2 * phi.radius()[k];
    I.tol[k - 1] = cfg.abs_tol / (4 * vol);
  }
  ComplexQuadResult out;
  std::vector<double> x(n, 0.0);
  out.value = phi.scale() * I.axis(n - 1, x);
  // Measured on the top axis; each inner level adds at most abs_tol/4.
  out.error = std::abs(phi.scale()) * (I.top_error + static_cast<double>(n - 1) * cfg.abs_tol / 4);
  out.evals = I.evals;
  return out;
}

// ---------------------------------------------------------------------------
// Decay fit

DecayFit fit_decay(const std::vector<std::pair<double, std::complex<double>>>& samples, std::size_t n) {
  if (samples.size() < 8) throw DomainError("decay fit needs at least 8 samples");
  double tmin = samples.front().first, tmax = tmin;
  for (const auto& [t, v] : samples) {
    if (!(t > 1)) throw DomainError("decay fit needs t > 1");
    if (!(std::abs(v) > 0)) throw DomainError("decay fit needs nonzero samples");
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  if (std::log10(tmax / tmin) < 1.5) throw DomainError("decay fit samples must span at least 1.5 decades");
  DecayFit out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t eta = 0; eta <= n; ++eta) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double N = static_cast<double>(samples.size());
    std::vector<double> xs, ys;
    for (const auto& [t, v] : samples) {
      double x = std::log(t);
      double y = std::log(std::abs(v)) - static_cast<double>(eta) * std::log(std::log(t));
      xs.push_back(x);
      ys.push_back(y);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double beta = (N * sxy - sx * sy) / (N * sxx - sx * sx);
    double b = (sy - beta * sx) / N;
    double ssr = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) ssr += std::pow(ys[i] - b - beta * xs[i], 2);
    out.ssr.push_back(ssr);
    out.betas.push_back(beta);
    if (ssr < best) {
      best = ssr;
      out.beta = beta;
      out.eta = static_cast<int>(eta);
      out.intercept = b;
    }
  }
  return out;
}

}  // namespace torasc
