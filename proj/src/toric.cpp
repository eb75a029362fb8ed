#include "torasc/toric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "torasc/errors.hpp"
#include "torasc/upoly.hpp"

namespace torasc {

namespace {

double ipow(double b, Int e) {
  double r = 1.0;
  for (Int i = 0; i < e; ++i) r *= b;
  return r;
}

std::string mono_str(const LatticeVector& q, const std::string& var) {
  std::string out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += var + std::to_string(i + 1);
    if (q[i] != 1) out += "^" + std::to_string(q[i]);
  }
  return out.empty() ? "1" : out;
}

}  // namespace

MonomialMap::MonomialMap(const Cone& sigma) : columns_(sigma.skeleton) {
  const std::size_t n = columns_.size();
  if (n == 0) throw DomainError("monomial map of the zero cone");
  for (const auto& a : columns_)
    if (a.size() != n) throw DomainError("monomial map needs a maximal cone");
  BigInt det = determinant(columns_);
  if (det == 0) throw DomainError("monomial map needs a maximal cone");
  if (det != 1 && det != -1) throw DomainError("monomial map needs a unimodular cone");
  rows_.assign(n, LatticeVector(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) rows_[k][j] = columns_[j][k];
  inverse_rows_.assign(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto col = solve_in_basis(columns_, LatticeVector::unit(n, i));
    for (std::size_t j = 0; j < n; ++j) inverse_rows_[j][i] = (*col)[j];
  }
}

void MonomialMap::apply(std::span<const double> y, std::span<double> x) const {
  for (std::size_t k = 0; k < n(); ++k) {
    double v = 1.0;
    for (std::size_t j = 0; j < n(); ++j) v *= ipow(y[j], rows_[k][j]);
    x[k] = v;
  }
}

std::vector<double> MonomialMap::inverse(std::span<const double> x) const {
  std::vector<double> y(n());
  for (std::size_t j = 0; j < n(); ++j) {
    double lg = 0;
    for (std::size_t i = 0; i < n(); ++i) {
      if (!(x[i] > 0)) throw DomainError("inverse monomial map needs a positive point");
      lg += static_cast<double>(inverse_rows_[j][i]) * std::log(x[i]);
    }
    y[j] = std::exp(lg);
  }
  return y;
}

std::vector<Int> MonomialMap::jacobian_exponents() const {
  std::vector<Int> out;
  for (const auto& a : columns_) out.push_back(a.sum() - 1);
  return out;
}

std::string MonomialMap::str() const {
  std::string out = "(";
  for (std::size_t k = 0; k < n(); ++k) {
    if (k) out += ", ";
    out += mono_str(rows_[k], "y");
  }
  return out + ")";
}

ResolutionChart build_chart(const FunctionSpec& f, const Cone& sigma, const LatticePolyhedron& P) {
  if (P.is_empty()) throw DomainError("chart of an empty polyhedron");
  ResolutionChart c;
  c.cone = sigma;
  c.map = MonomialMap(sigma);
  const std::size_t n = c.map.n();
  if (n != f.n()) throw DomainError("cone dimension differs from the function");
  for (const auto& a : sigma.skeleton) c.l.push_back(P.l_value(a));
  c.jacobian = c.map.jacobian_exponents();
  std::vector<int> plus(n, 1);
  std::vector<Term> terms;
  for (const auto& t : f.terms()) {
    LatticeVector e(n);
    for (std::size_t j = 0; j < n; ++j) {
      e[j] = sigma.skeleton[j].dot(t.exponent) - c.l[j];
      if (e[j] < 0) throw ConsistencyError("negative chart exponent: term " + t.exponent.str() + " outside P");
    }
    terms.push_back({e, t.factor.pull_back(c.map.rows(), plus)});
  }
  c.f_sigma = FunctionSpec(n, std::move(terms));
  IndexSet all(n);
  for (std::size_t j = 0; j < n; ++j) all[j] = j;
  auto vface = gamma_of(all, sigma, P);
  c.vertex = P.vertices().at(vface.vertex_ids().front());
  std::vector<double> zero(n, 0.0);
  c.f_sigma_at_0 = CompiledFunction(c.f_sigma)(zero);
  return c;
}

nlohmann::json to_json(const ResolutionChart& c) {
  nlohmann::json skel = nlohmann::json::array();
  for (const auto& a : c.cone.skeleton) skel.push_back(a.coords());
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.map.rows()) rows.push_back(r.coords());
  return {{"skeleton", skel},
          {"matrix", rows},
          {"map", c.map.str()},
          {"l", c.l},
          {"jacobian_exponents", c.jacobian},
          {"vertex", c.vertex.coords()},
          {"f_sigma", c.display()},
          {"f_sigma_at_0", c.f_sigma_at_0}};
}

ChartEvaluator::ChartEvaluator(const FunctionSpec& f, const ResolutionChart& chart, std::vector<int> theta,
                               std::vector<double> scale)
    : map_(chart.map), theta_(std::move(theta)), scale_(std::move(scale)) {
  const std::size_t n = f.n();
  if (theta_.size() != n || scale_.size() != n) throw DomainError("octant or scale has the wrong dimension");
  for (const auto& t : f.terms()) {
    Piece p;
    p.coeff = 1.0;
    for (std::size_t k = 0; k < n; ++k) p.coeff *= ipow(theta_[k] * scale_[k], t.exponent[k]);
    for (std::size_t j = 0; j < n; ++j) {
      Int e = chart.cone.skeleton[j].dot(t.exponent) - chart.l[j];
      if (e < 0) throw ConsistencyError("negative chart exponent");
      if (e > 0) p.mono.emplace_back(j, e);
    }
    p.constant = t.factor.is_constant();
    p.value = p.constant ? static_cast<double>(t.factor.value()) : 0.0;
    if (!p.constant) p.factor = CompiledExpr(t.factor);
    pieces_.push_back(std::move(p));
  }
}

void ChartEvaluator::point(std::span<const double> y, std::span<double> x) const {
  map_.apply(y, x);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] *= theta_[k] * scale_[k];
}

double ChartEvaluator::operator()(std::span<const double> y) const {
  double xbuf[16];
  std::span<double> x(xbuf, y.size());
  point(y, x);
  double acc = 0.0;
  for (const auto& p : pieces_) {
    double m = p.coeff;
    for (const auto& [j, e] : p.mono) m *= ipow(y[j], e);
    if (m == 0.0) continue;
    acc += m * (p.constant ? p.value : p.factor(x));
  }
  return acc;
}

namespace {

std::vector<double> sample_away_from_zero(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> mag(0.05, 1.0);
  std::bernoulli_distribution neg(0.5);
  std::vector<double> y(n);
  for (auto& v : y) v = mag(rng) * (neg(rng) ? -1.0 : 1.0);
  return y;
}

double prefactor(const ResolutionChart& c, std::span<const double> y) {
  double m = 1.0;
  for (std::size_t j = 0; j < y.size(); ++j) m *= ipow(y[j], c.l[j]);
  return m;
}

}  // namespace

double chart_identity_residual(const FunctionSpec& f, const ResolutionChart& chart, int samples,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CompiledFunction F(f);
  CompiledFunction Fs(chart.f_sigma);
  const std::size_t n = f.n();
  std::vector<double> x(n);
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    auto y = sample_away_from_zero(rng, n);
    chart.map.apply(y, x);
    double lhs = F(x);
    double rhs = prefactor(chart, y) * Fs(y);
    worst = std::max(worst, std::abs(lhs - rhs) / (1 + std::abs(lhs)));
  }
  return worst;
}

double gamma_pullback_residual(const FunctionSpec& f, const LatticePolyhedron& P, const ResolutionChart& chart,
                               const IndexSet& I, int samples, std::uint64_t seed) {
  auto gamma = gamma_of(I, chart.cone, P);
  CompiledFunction Fg(gamma_part(f, gamma, P));
  CompiledFunction Fs(chart.f_sigma);
  const std::size_t n = f.n();
  std::mt19937_64 rng(seed);
  std::vector<double> x(n);
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    auto y = sample_away_from_zero(rng, n);
    chart.map.apply(y, x);
    double lhs = Fg(x);
    auto yi = y;
    for (auto j : I) yi[j] = 0.0;
    double rhs = prefactor(chart, y) * Fs(yi);
    worst = std::max(worst, std::abs(lhs - rhs) / (1 + std::abs(lhs) + std::abs(rhs)));
  }
  return worst;
}

double euler_identity_residual(const FunctionSpec& f_gamma, const ValidPair& pair, int samples,
                               std::uint64_t seed) {
  const std::size_t n = f_gamma.n();
  CompiledFunction F(f_gamma);
  std::vector<CompiledFunction> grad;
  for (std::size_t k = 0; k < n; ++k) grad.emplace_back(differentiate(f_gamma, k));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> x(n);
    for (auto& v : x) v = coord(rng);
    double lf = static_cast<double>(pair.l) * F(x);
    double lhs = 0;
    double scale = 1 + std::abs(lf);
    for (std::size_t k = 0; k < n; ++k) {
      double term = static_cast<double>(pair.a[k]) * x[k] * grad[k](x);
      lhs += term;
      scale += std::abs(term);
    }
    worst = std::max(worst, std::abs(lhs - lf) / scale);
  }
  return worst;
}

double quasihomogeneity_residual(const FunctionSpec& f_gamma, const ValidPair& pair, int samples,
                                std::uint64_t seed) {
  const std::size_t n = f_gamma.n();
  CompiledFunction F(f_gamma);
  // Cancellation between terms would inflate a plain relative error, so
  // the scale is the sum of the term magnitudes.
  std::vector<CompiledFunction> parts;
  for (const auto& t : f_gamma.terms()) parts.emplace_back(FunctionSpec(n, {t}));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  std::uniform_real_distribution<double> tdist(0.05, 1.0);
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> x(n);
    for (auto& v : x) v = coord(rng);
    double t = tdist(rng);
    auto y = x;
    for (std::size_t k = 0; k < n; ++k) y[k] *= std::pow(t, static_cast<double>(pair.a[k]));
    double tl = std::pow(t, static_cast<double>(pair.l));
    double scale = 0;
    for (const auto& p : parts) scale += std::abs(p(x));
    scale *= tl;
    if (scale < 1e-280) continue;
    worst = std::max(worst, std::abs(F(y) - tl * F(x)) / scale);
  }
  return worst;
}

namespace {

double det_double(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

}  // namespace

double jacobian_residual(const MonomialMap& map, int samples, std::uint64_t seed) {
  const std::size_t n = map.n();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.2, 1.5);
  auto J = map.jacobian_exponents();
  double worst = 0;
  std::vector<double> xp(n), xm(n);
  for (int s = 0; s < samples; ++s) {
    std::vector<double> y(n);
    for (auto& v : y) v = coord(rng);
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
      double h = 1e-6 * y[j];
      auto yp = y, ym = y;
      yp[j] += h;
      ym[j] -= h;
      map.apply(yp, xp);
      map.apply(ym, xm);
      for (std::size_t k = 0; k < n; ++k) m[k][j] = (xp[k] - xm[k]) / (2 * h);
    }
    double fd = std::abs(det_double(m));
    double exact = 1.0;
    for (std::size_t j = 0; j < n; ++j) exact *= std::pow(y[j], static_cast<double>(J[j]));
    worst = std::max(worst, std::abs(fd - exact) / exact);
  }
  return worst;
}

std::string to_string(FaceStatus s) {
  switch (s) {
    case FaceStatus::Verified:
      return "verified";
    case FaceStatus::Refuted:
      return "refuted";
    case FaceStatus::Unknown:
      return "unknown";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Nondegeneracy

namespace {

struct Monomial {
  LatticeVector q;
  double c;
  Rational exact;
};

// Exact residual max(|f_γ|, |∇f_γ|) at a double point with rational data.
double exact_residual(const std::vector<Monomial>& poly, const std::vector<double>& x) {
  const std::size_t n = x.size();
  RationalVector xr;
  for (double v : x) xr.emplace_back(v);
  auto mono_val = [&](const LatticeVector& q) {
    Rational r = 1;
    for (std::size_t k = 0; k < n; ++k)
      for (Int e = 0; e < q[k]; ++e) r *= xr[k];
    return r;
  };
  Rational f = 0;
  std::vector<Rational> g(n);
  for (const auto& m : poly) {
    f += m.exact * mono_val(m.q);
    for (std::size_t k = 0; k < n; ++k) {
      if (m.q[k] == 0) continue;
      LatticeVector d = m.q;
      d[k] -= 1;
      g[k] += m.exact * m.q[k] * mono_val(d);
    }
  }
  double worst = std::abs(static_cast<double>(f));
  for (const auto& v : g) worst = std::max(worst, std::abs(static_cast<double>(v)));
  return worst;
}

double numeric_residual(const std::vector<Monomial>& poly, const std::vector<double>& x) {
  const std::size_t n = x.size();
  double f = 0;
  std::vector<double> g(n);
  for (const auto& m : poly) {
    double v = m.c;
    for (std::size_t k = 0; k < n; ++k) v *= ipow(x[k], m.q[k]);
    f += v;
    for (std::size_t k = 0; k < n; ++k) {
      if (m.q[k] == 0) continue;
      double d = m.c * static_cast<double>(m.q[k]);
      for (std::size_t i = 0; i < n; ++i) d *= ipow(x[i], m.q[i] - (i == k ? 1 : 0));
      g[k] += d;
    }
  }
  double worst = std::abs(f);
  for (double v : g) worst = std::max(worst, std::abs(v));
  return worst;
}

struct Interval {
  double lo;
  double hi;
  bool contains_zero() const { return lo <= 0.0 && hi >= 0.0; }
};

Interval widen(Interval a) {
  return {std::nextafter(a.lo, -std::numeric_limits<double>::infinity()),
          std::nextafter(a.hi, std::numeric_limits<double>::infinity())};
}

Interval mul(Interval a, Interval b) {
  double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return widen({*std::min_element(p, p + 4), *std::max_element(p, p + 4)});
}

Interval ipow(Interval a, Int e) {
  if (e == 0) return {1.0, 1.0};
  double lo = ipow(a.lo, e);
  double hi = ipow(a.hi, e);
  if (e % 2 == 1) return widen({lo, hi});
  if (a.lo >= 0) return widen({lo, hi});
  if (a.hi <= 0) return widen({hi, lo});
  return widen({0.0, std::max(lo, hi)});
}

Interval eval_interval(const std::vector<Monomial>& poly, const std::vector<Interval>& box) {
  Interval acc{0.0, 0.0};
  for (const auto& m : poly) {
    Interval t{m.c, m.c};
    for (std::size_t k = 0; k < box.size(); ++k)
      if (m.q[k] > 0) t = mul(t, ipow(box[k], m.q[k]));
    acc = widen({acc.lo + t.lo, acc.hi + t.hi});
  }
  return acc;
}

std::vector<Monomial> partial(const std::vector<Monomial>& poly, std::size_t k) {
  std::vector<Monomial> out;
  for (const auto& m : poly) {
    if (m.q[k] == 0) continue;
    Monomial d = m;
    d.c *= static_cast<double>(m.q[k]);
    d.exact *= m.q[k];
    d.q[k] -= 1;
    out.push_back(d);
  }
  return out;
}

// Gauss–Newton on (h, ∂h) with x_fixed pinned; returns a point when the
// residual drops below tol away from the coordinate planes.
std::optional<std::vector<double>> polish(const std::vector<Monomial>& h, const std::vector<std::vector<Monomial>>& grad,
                                          std::vector<double> x, std::size_t fixed) {
  const std::size_t n = x.size();
  auto residuals = [&](const std::vector<double>& p) {
    std::vector<double> r;
    double f = 0;
    for (const auto& m : h) {
      double v = m.c;
      for (std::size_t k = 0; k < n; ++k) v *= ipow(p[k], m.q[k]);
      f += v;
    }
    r.push_back(f);
    for (const auto& g : grad) {
      double v = 0;
      for (const auto& m : g) {
        double t = m.c;
        for (std::size_t k = 0; k < n; ++k) t *= ipow(p[k], m.q[k]);
        v += t;
      }
      r.push_back(v);
    }
    return r;
  };
  double lambda = 1e-3;
  for (int it = 0; it < 60; ++it) {
    auto r = residuals(x);
    double norm = 0;
    for (double v : r) norm += v * v;
    if (std::sqrt(norm) < 1e-13) break;
    // Jacobian of the residual vector by central differences.
    std::vector<std::vector<double>> J(r.size(), std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
      if (k == fixed) continue;
      double hstep = 1e-7;
      auto xp = x, xm = x;
      xp[k] += hstep;
      xm[k] -= hstep;
      auto rp = residuals(xp), rm = residuals(xm);
      for (std::size_t i = 0; i < r.size(); ++i) J[i][k] = (rp[i] - rm[i]) / (2 * hstep);
    }
    // (JᵀJ + λI) δ = −Jᵀr
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t i = 0; i < r.size(); ++i) A[a][b] += J[i][a] * J[i][b];
      A[a][a] += lambda + (a == fixed ? 1.0 : 0.0);
      for (std::size_t i = 0; i < r.size(); ++i) A[a][n] -= J[i][a] * r[i];
    }
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      for (std::size_t rr = c + 1; rr < n; ++rr)
        if (std::abs(A[rr][c]) > std::abs(A[piv][c])) piv = rr;
      std::swap(A[c], A[piv]);
      if (A[c][c] == 0) return std::nullopt;
      for (std::size_t rr = 0; rr < n; ++rr) {
        if (rr == c) continue;
        double f = A[rr][c] / A[c][c];
        for (std::size_t k = c; k <= n; ++k) A[rr][k] -= f * A[c][k];
      }
    }
    auto next = x;
    for (std::size_t k = 0; k < n; ++k)
      if (k != fixed) next[k] += A[k][n] / A[k][k];
    auto rn = residuals(next);
    double nn = 0;
    for (double v : rn) nn += v * v;
    if (nn < norm) {
      x = next;
      lambda = std::max(lambda / 10, 1e-12);
    } else {
      lambda *= 10;
    }
  }
  for (double v : x)
    if (std::abs(v) < 1e-6 || std::abs(v) > 1.5) return std::nullopt;
  if (numeric_residual(h, x) > 1e-11) return std::nullopt;
  return x;
}

FaceNondegeneracy interval_search(const std::vector<Monomial>& poly, std::size_t n, std::size_t budget) {
  FaceNondegeneracy out;
  out.method = "interval branch-and-bound on max|x| = 1";
  // Divide out the common monomial: on the torus, f = x^u h and ∇f = 0 iff
  // h = 0 and ∇h = 0.
  LatticeVector umin = poly.front().q;
  for (const auto& m : poly)
    for (std::size_t k = 0; k < n; ++k) umin[k] = std::min(umin[k], m.q[k]);
  std::vector<Monomial> h = poly;
  for (auto& m : h) m.q = m.q - umin;
  std::vector<std::vector<Monomial>> grad;
  for (std::size_t k = 0; k < n; ++k) grad.push_back(partial(h, k));

  std::size_t used = 0;
  bool open = false;
  struct Box {
    std::vector<Interval> iv;
    std::size_t fixed;
  };
  for (std::size_t k = 0; k < n; ++k) {
    for (double s : {-1.0, 1.0}) {
      std::vector<Box> stack;
      Box b{std::vector<Interval>(n, Interval{-1.0, 1.0}), k};
      b.iv[k] = {s, s};
      stack.push_back(b);
      while (!stack.empty()) {
        if (used >= budget) {
          out.status = FaceStatus::Unknown;
          return out;
        }
        ++used;
        Box box = std::move(stack.back());
        stack.pop_back();
        if (!eval_interval(h, box.iv).contains_zero()) continue;
        bool excluded = false;
        for (const auto& g : grad)
          if (!g.empty() && !eval_interval(g, box.iv).contains_zero()) {
            excluded = true;
            break;
          }
        if (excluded) continue;
        double width = 0;
        std::size_t split = 0;
        for (std::size_t i = 0; i < n; ++i) {
          double w = box.iv[i].hi - box.iv[i].lo;
          if (w > width) {
            width = w;
            split = i;
          }
        }
        if (width < 1e-2) {
          std::vector<double> center(n);
          for (std::size_t i = 0; i < n; ++i) center[i] = 0.5 * (box.iv[i].lo + box.iv[i].hi);
          if (auto w = polish(h, grad, center, box.fixed)) {
            out.status = FaceStatus::Refuted;
            out.witness = *w;
            return out;
          }
        }
        if (width < 1e-9) {
          open = true;
          continue;
        }
        double mid = 0.5 * (box.iv[split].lo + box.iv[split].hi);
        Box left = box;
        Box right = box;
        left.iv[split].hi = mid;
        right.iv[split].lo = mid;
        stack.push_back(std::move(left));
        stack.push_back(std::move(right));
      }
    }
  }
  out.status = open ? FaceStatus::Unknown : FaceStatus::Verified;
  return out;
}

}  // namespace

NondegeneracyReport nondegeneracy_check(const FunctionSpec& f, const LatticePolyhedron& P, std::size_t budget_boxes) {
  if (P.is_empty()) throw DomainError("nondegeneracy of an empty polyhedron");
  const std::size_t n = f.n();
  NondegeneracyReport report;
  for (const auto& face : P.faces()) {
    if (!face.compact()) continue;
    FaceNondegeneracy entry;
    entry.face = face.describe(P);
    entry.dim = face.dim();
    auto fg = gamma_part(f, face, P);

    std::vector<Monomial> poly;
    bool exact = true;
    for (const auto& t : fg.terms()) {
      std::vector<double> zero(n, 0.0);
      double c = CompiledExpr(t.factor)(zero);
      Rational q = 0;
      auto v = value_at_origin(t.factor);
      if (v && (v->empty() || (v->size() == 1 && v->begin()->first == 0))) {
        q = v->empty() ? Rational(0) : v->begin()->second;
      } else {
        exact = false;
      }
      if (c != 0.0 || q != 0) poly.push_back({t.exponent, c, q});
    }

    if (poly.empty()) {
      entry.status = FaceStatus::Refuted;
      entry.method = "gamma part vanishes identically";
      entry.witness.assign(n, 1.0);
    } else if (face.dim() == 0) {
      entry.method = "vertex";
      if (poly.front().q.is_zero()) {
        entry.status = FaceStatus::Refuted;
        entry.witness.assign(n, 1.0);
      } else {
        entry.status = FaceStatus::Verified;
      }
    } else if (face.dim() == 1 && exact) {
      // f_γ = x^u g(x^δ) with δ primitive: ∇f_γ vanishes on the torus iff
      // g has a repeated nonzero real root.
      entry.method = "edge reduction + Sturm";
      const auto& u = P.vertices()[face.vertex_ids()[0]];
      const auto& v = P.vertices()[face.vertex_ids()[1]];
      LatticeVector diff = v - u;
      Int g = diff.content();
      LatticeVector delta = diff.primitive();
      std::vector<Rational> coeffs(static_cast<std::size_t>(g) + 1);
      for (const auto& m : poly) {
        LatticeVector off = m.q - u;
        std::size_t i = 0;
        for (std::size_t k = 0; k < n; ++k)
          if (delta[k] != 0) {
            i = static_cast<std::size_t>(off[k] / delta[k]);
            break;
          }
        coeffs[i] += m.exact;
      }
      UPoly gz(coeffs);
      UPoly common = UPoly::gcd(gz, gz.derivative());
      SturmChain chain(common);
      int neg = common.degree() > 0 ? chain.count_negative() : 0;
      int pos = common.degree() > 0 ? chain.count_positive() : 0;
      if (neg + pos == 0) {
        entry.status = FaceStatus::Verified;
      } else {
        entry.status = FaceStatus::Refuted;
        Rational B = cauchy_bound(common);
        auto z = pos > 0 ? isolate_root(common, Rational(0), B) : isolate_root(common, -B, Rational(0));
        double zv = static_cast<double>(*z);
        std::size_t k = 0;
        while (delta[k] % 2 == 0) ++k;  // δ primitive, so some entry is odd
        std::vector<double> x(n, 1.0);
        x[k] = std::copysign(std::pow(std::abs(zv), 1.0 / static_cast<double>(delta[k])), zv);
        entry.witness = x;
      }
    } else {
      entry = interval_search(poly, n, budget_boxes);
      entry.face = face.describe(P);
      entry.dim = face.dim();
    }
    if (entry.status == FaceStatus::Refuted)
      entry.residual = exact ? exact_residual(poly, entry.witness) : numeric_residual(poly, entry.witness);
    report.faces.push_back(std::move(entry));
  }
  bool any_refuted = false;
  bool any_unknown = false;
  for (const auto& e : report.faces) {
    any_refuted |= e.status == FaceStatus::Refuted;
    any_unknown |= e.status == FaceStatus::Unknown;
  }
  report.overall = any_refuted ? FaceStatus::Refuted : (any_unknown ? FaceStatus::Unknown : FaceStatus::Verified);
  return report;
}

nlohmann::json to_json(const NondegeneracyReport& r) {
  nlohmann::json faces = nlohmann::json::array();
  for (const auto& e : r.faces) {
    nlohmann::json j{{"face", e.face}, {"dim", e.dim}, {"status", to_string(e.status)}, {"method", e.method}};
    if (e.status == FaceStatus::Refuted) {
      j["witness"] = e.witness;
      j["residual"] = e.residual;
    }
    faces.push_back(j);
  }
  return {{"overall", to_string(r.overall)}, {"faces", faces}};
}

}  // namespace torasc
