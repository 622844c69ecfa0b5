#pragma once

#include <functional>
#include <vector>

#include "fracmix/specfun.hpp"

namespace fracmix {

// Samples of y on a strictly increasing grid over [a,b], with optional samples of y' and y''
// (leave d1/d2 empty when unknown). Derivative samples may be infinite where the derivative is
// singular; Caputo derivatives then use secant slopes on the adjacent intervals.
struct SampledFunction {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> d1;
    std::vector<double> d2;

    double a() const { return grid.front(); }
    double b() const { return grid.back(); }
    bool has_d1() const { return !d1.empty(); }
    bool has_d2() const { return !d2.empty(); }

    void validate() const;

    // Samples f (and optionally f', f'') on the given grid.
    static SampledFunction from(const std::vector<double>& grid,
                                const std::function<double(double)>& f,
                                const std::function<double(double)>& df = {},
                                const std::function<double(double)>& d2f = {});
};

// Fractional order in (0,1) or (1,2); n = floor(order) + 1.
struct FracOrder {
    double order;
    int n;
    explicit FracOrder(double order);
};

enum class Side { left, right };

// Grid on [0, length] clustered at 0: node j is length * (j/n)^grading.
std::vector<double> graded_grid(double length, int n, double grading = 2.0);

// Riemann-Liouville derivatives. Left: d^n/dx^n of the (n - order)-fold integral from a.
// Right: (-d/dx)^n of the integral from x to b.
double rl_left(const SampledFunction& f, FracOrder ord, double x);
double rl_right(const SampledFunction& f, FracOrder ord, double x);

// Caputo derivatives. Left: integral from a of (x-s)^{n-order-1} f^{(n)}(s) / Gamma(n-order).
// Right: (-1)^n times the integral from x to b of (s-x)^{n-order-1} f^{(n)}(s) / Gamma(n-order).
double caputo_left(const SampledFunction& f, FracOrder ord, double x);
double caputo_right(const SampledFunction& f, FracOrder ord, double x);

// |Caputo - (RL - sum_{k<n} f^{(k)}(end) dist^{k-order} / Gamma(k-order+1))|, with the
// endpoint derivatives taken towards the interior (signs (-1)^k on the right side).
double caputo_rl_residual(const SampledFunction& f, FracOrder ord, Side side, double x);

// RL derivative of order gamma of |t|^{alpha k + beta - 1} E^{(k)}_{alpha,beta}(lambda |t|^alpha),
// based at 0 (left side for t > 0, right side for t < 0):
//   |t|^{alpha k + beta - gamma - 1} E^{(k)}_{alpha,beta-gamma}(lambda |t|^alpha).
double ml_rl_deriv(int k, double alpha, double beta, double lambda, double gamma_ord, double t,
                   const SummationPolicy& policy = default_policy());

// Right-sided RL derivative of order gamma, based at 0, of
//   (-t)^{d1 - 1} E1(params; w1 (-t)^{a2}, w2 (-t)^{b2}),  t < 0:
//   (-t)^{d1 - gamma - 1} E1(params with d1 -> d1 - gamma; w1 (-t)^{a2}, w2 (-t)^{b2}).
double e1_rl_deriv(const E1Params& params, double omega1, double omega2, double gamma_ord, double t,
                   const SummationPolicy& policy = default_policy());

// Value at 0+ of g, given g(e) = L + sum_j c_j e^{p_j} for small e > 0 with known exponents p_j.
// g is sampled at eps, eps/2, eps/4, ... and the model is solved for L.
double limit_at_zero(const std::function<double(double)>& g, double eps,
                     const std::vector<double>& exponents);

}  // namespace fracmix
