#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace torasc {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-7;
  std::size_t max_evals = 50'000'000;
};

struct QuadResult {
  double value = 0;
  double error = 0;
  std::size_t evals = 0;
};

struct ComplexQuadResult {
  std::complex<double> value;
  double error = 0;
  std::size_t evals = 0;
};

using Integrand = std::function<double(std::span<const double>)>;

// Globally adaptive cubature on the box [lo, hi]: tensor Gauss–Legendre with
// 4 nodes per axis (degree 7), error from the embedded 3-node rule. The box
// with the largest error is bisected along every axis. Throws BudgetError
// when max_evals is reached before the tolerance.
QuadResult adaptive_cubature(const Integrand& g, const std::vector<double>& lo, const std::vector<double>& hi,
                             const QuadratureConfig& cfg);

// sample(x, phase, amp) for the oscillatory rule below.
using OscSample = std::function<void(double, double&, std::complex<double>&)>;

// ∫_a^b amp(x)·e^{i·t·phase(x)} dx. Cells on which t times the phase
// variation exceeds 2π use a Filon rule: the linear part of the phase is
// integrated exactly against the Legendre expansion of the remaining
// factor. Other cells use Gauss–Legendre. With `parallel` the nodes of a
// cell are sampled through parallel_for.
ComplexQuadResult oscillatory_1d(const OscSample& sample, double t, double a, double b, double abs_tol,
                                 std::size_t max_evals, bool parallel = false);

}  // namespace torasc
