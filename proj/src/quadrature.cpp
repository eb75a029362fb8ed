#include "torasc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "torasc/errors.hpp"
#include "torasc/parallel.hpp"

namespace torasc {

namespace {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Boost stores the nonnegative half of a symmetric rule.
template <class Half>
Rule unfold(const Half& xs, const Half& ws, bool odd) {
  Rule r;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r.x.push_back(xs[i]);
    r.w.push_back(ws[i]);
    if (!(odd && i == 0)) {
      r.x.push_back(-xs[i]);
      r.w.push_back(ws[i]);
    }
  }
  return r;
}

template <unsigned N>
Rule gauss_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  return unfold(G::abscissa(), G::weights(), N % 2 == 1);
}

const Rule& gl4() {
  static const Rule r = gauss_rule<4>();
  return r;
}
const Rule& gl3() {
  static const Rule r = gauss_rule<3>();
  return r;
}
const Rule& gl8() {
  static const Rule r = gauss_rule<8>();
  return r;
}

// ---------------------------------------------------------------------------
// Cubature

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  double value = 0;
  double error = 0;
};

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

double tensor(const Integrand& g, const Rule& rule, const Box& box, std::vector<double>& x) {
  const std::size_t d = box.lo.size();
  const std::size_t k = rule.x.size();
  double vol = 1;
  for (std::size_t i = 0; i < d; ++i) vol *= 0.5 * (box.hi[i] - box.lo[i]);
  double acc = 0;
  std::size_t total = ipow(k, d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    double w = 1;
    for (std::size_t i = 0; i < d; ++i) {
      std::size_t j = rem % k;
      rem /= k;
      double mid = 0.5 * (box.lo[i] + box.hi[i]);
      double half = 0.5 * (box.hi[i] - box.lo[i]);
      x[i] = mid + half * rule.x[j];
      w *= rule.w[j];
    }
    acc += w * g(x);
  }
  return acc * vol;
}

void evaluate_box(const Integrand& g, Box& box) {
  std::vector<double> x(box.lo.size());
  double q4 = tensor(g, gl4(), box, x);
  double q3 = tensor(g, gl3(), box, x);
  if (!std::isfinite(q4) || !std::isfinite(q3)) throw DomainError("integrand is not finite on a quadrature box");
  box.value = q4;
  box.error = std::abs(q4 - q3);
}

std::vector<Box> split(const Box& box) {
  const std::size_t d = box.lo.size();
  std::vector<Box> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Box c;
    c.lo = box.lo;
    c.hi = box.hi;
    for (std::size_t i = 0; i < d; ++i) {
      double mid = 0.5 * (box.lo[i] + box.hi[i]);
      if (mask & (std::size_t{1} << i)) c.lo[i] = mid;
      else c.hi[i] = mid;
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

QuadResult adaptive_cubature(const Integrand& g, const std::vector<double>& lo, const std::vector<double>& hi,
                             const QuadratureConfig& cfg) {
  const std::size_t d = lo.size();
  if (hi.size() != d) throw DomainError("cubature bounds differ in dimension");
  QuadResult res;
  if (d == 0) {
    res.value = g({});
    res.evals = 1;
    return res;
  }
  const std::size_t per_box = ipow(4, d) + ipow(3, d);
  std::vector<Box> boxes;
  // Start from a 2^d grid (4^d in one or two dimensions) so narrow features
  // are less likely to fall between the first nodes.
  boxes.push_back(Box{lo, hi, 0, 0});
  for (int level = 0; level < (d <= 2 ? 2 : 1); ++level) {
    std::vector<Box> next;
    for (const auto& b : boxes)
      for (auto& c : split(b)) next.push_back(std::move(c));
    boxes = std::move(next);
  }
  parallel_for(boxes.size(), [&](std::size_t i) { evaluate_box(g, boxes[i]); });
  res.evals = boxes.size() * per_box;

  auto cmp = [&](std::size_t a, std::size_t b) {
    if (boxes[a].error != boxes[b].error) return boxes[a].error < boxes[b].error;
    return a > b;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
  std::vector<bool> live(boxes.size(), true);
  double value = 0, error = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    heap.push(i);
    value += boxes[i].value;
    error += boxes[i].error;
  }
  const std::size_t batch = 16;
  while (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value))) {
    if (res.evals >= cfg.max_evals)
      throw BudgetError("cubature budget of " + std::to_string(cfg.max_evals) + " evaluations exhausted", error);
    std::vector<std::size_t> parents;
    while (!heap.empty() && parents.size() < batch) {
      parents.push_back(heap.top());
      heap.pop();
    }
    std::vector<Box> children;
    for (auto p : parents) {
      live[p] = false;
      value -= boxes[p].value;
      error -= boxes[p].error;
      for (auto& c : split(boxes[p])) children.push_back(std::move(c));
    }
    parallel_for(children.size(), [&](std::size_t i) { evaluate_box(g, children[i]); });
    res.evals += children.size() * per_box;
    for (auto& c : children) {
      value += c.value;
      error += c.error;
      boxes.push_back(std::move(c));
      live.push_back(true);
      heap.push(boxes.size() - 1);
    }
    // Running sums drift; resynchronise now and then.
    if (boxes.size() % 4096 < children.size()) {
      value = error = 0;
      for (std::size_t i = 0; i < boxes.size(); ++i)
        if (live[i]) {
          value += boxes[i].value;
          error += boxes[i].error;
        }
    }
  }
  res.value = 0;
  res.error = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    if (live[i]) {
      res.value += boxes[i].value;
      res.error += boxes[i].error;
    }
  return res;
}

// ---------------------------------------------------------------------------
// Oscillatory 1-D

namespace {

struct Cell {
  double a, b;
  std::complex<double> value;
  bool resolved;  // the rule is trustworthy on this cell
};

// Filon–Legendre on one cell with 8 Gauss nodes.
Cell filon_cell(const OscSample& sample, double t, double a, double b, bool parallel) {
  const Rule& r = gl8();
  const std::size_t k = r.x.size();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::vector<double> ph(k);
  std::vector<std::complex<double>> amp(k);
  auto node = [&](std::size_t i) {
    double p;
    sample(mid + half * r.x[i], p, amp[i]);
    ph[i] = t * p;
  };
  if (parallel) parallel_for(k, node);
  else
    for (std::size_t i = 0; i < k; ++i) node(i);
  double lo = *std::min_element(ph.begin(), ph.end());
  double hi = *std::max_element(ph.begin(), ph.end());
  Cell c{a, b, {}, true};
  if (hi - lo <= 2 * std::numbers::pi) {
    std::complex<double> acc = 0;
    for (std::size_t i = 0; i < k; ++i) acc += r.w[i] * amp[i] * std::polar(1.0, ph[i]);
    c.value = acc * half;
    return c;
  }
  // Linear part c0 + c1 ξ by Legendre projection of the sampled phase.
  double c0 = 0, c1 = 0;
  for (std::size_t i = 0; i < k; ++i) {
    c0 += 0.5 * r.w[i] * ph[i];
    c1 += 1.5 * r.w[i] * ph[i] * r.x[i];
  }
  double resid = 0;
  std::vector<std::complex<double>> q(k);
  for (std::size_t i = 0; i < k; ++i) {
    double rest = ph[i] - c0 - c1 * r.x[i];
    resid = std::max(resid, std::abs(rest));
    q[i] = amp[i] * std::polar(1.0, rest);
  }
  c.resolved = resid <= std::numbers::pi;
  std::complex<double> acc = 0;
  const double kappa = std::abs(c1);
  std::complex<double> ipow{1, 0};
  for (unsigned j = 0; j < k; ++j) {
    std::complex<double> aj = 0;
    for (std::size_t i = 0; i < k; ++i) aj += r.w[i] * q[i] * boost::math::legendre_p(static_cast<int>(j), r.x[i]);
    aj *= (2.0 * j + 1) / 2;
    // ∫_{-1}^{1} P_j(ξ) e^{iκξ} dξ = 2 i^j j_j(κ), and j_j(−κ) = (−1)^j j_j(κ).
    double bes = boost::math::sph_bessel(j, kappa);
    if (c1 < 0 && j % 2 == 1) bes = -bes;
    acc += aj * 2.0 * ipow * bes;
    ipow *= std::complex<double>(0, 1);
  }
  c.value = acc * std::polar(1.0, c0) * half;
  return c;
}

}  // namespace

ComplexQuadResult oscillatory_1d(const OscSample& sample, double t, double a, double b, double abs_tol,
                                 std::size_t max_evals, bool parallel) {
  ComplexQuadResult res;
  if (!(b > a)) return res;
  const std::size_t per_cell = gl8().x.size();
  struct Item {
    Cell whole;
    double tol;
    int depth;
  };
  std::vector<Item> stack;
  const int initial = 4;
  for (int i = initial - 1; i >= 0; --i) {
    double lo = a + (b - a) * i / initial, hi = a + (b - a) * (i + 1) / initial;
    stack.push_back({filon_cell(sample, t, lo, hi, parallel), abs_tol / initial, 0});
    res.evals += per_cell;
  }
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    double m = 0.5 * (it.whole.a + it.whole.b);
    Cell left = filon_cell(sample, t, it.whole.a, m, parallel);
    Cell right = filon_cell(sample, t, m, it.whole.b, parallel);
    res.evals += 2 * per_cell;
    double diff = std::abs(left.value + right.value - it.whole.value);
    bool trusted = it.whole.resolved && left.resolved && right.resolved;
    if ((trusted && diff <= it.tol) || it.depth > 50) {
      res.value += left.value + right.value;
      res.error += diff;
      continue;
    }
    if (res.evals > max_evals)
      throw BudgetError("oscillatory quadrature budget exhausted", res.error + diff);
    stack.push_back({right, it.tol / 2, it.depth + 1});
    stack.push_back({left, it.tol / 2, it.depth + 1});
  }
  return res;
}

}  // namespace torasc
