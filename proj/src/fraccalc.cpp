#include "fracmix/fraccalc.hpp"

#include <array>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

namespace fracmix {

namespace {

// A function on [0, L] in the distance coordinate s, measured from the base point of the
// operator, stored as a piecewise polynomial over the nodes.
struct Piecewise {
    enum class Kind { constant, linear, hermite };
    const std::vector<double>* nodes = nullptr;
    Kind kind = Kind::linear;
    std::vector<double> v;  // node values, or per-interval values for constant
    std::vector<double> m;  // node slopes for hermite
    // Per-interval constant used instead where the node data is not finite (singular endpoint).
    std::vector<double> fallback;
    // Optional exact interval means for the linear kind (secants of the antiderivative samples);
    // with them each interval carries the quadratic matching both node values and the mean.
    std::vector<double> mean;

    // Coefficients in (s - s_j) on interval j.
    std::array<double, 4> coeffs(std::size_t j) const {
        const double h = (*nodes)[j + 1] - (*nodes)[j];
        if (!fallback.empty() && kind != Kind::constant) {
            const bool bad = !std::isfinite(v[j]) || !std::isfinite(v[j + 1]) ||
                             (kind == Kind::hermite && (!std::isfinite(m[j]) || !std::isfinite(m[j + 1])));
            if (bad) return {fallback[j], 0.0, 0.0, 0.0};
        }
        switch (kind) {
            case Kind::constant: return {v[j], 0.0, 0.0, 0.0};
            case Kind::linear: {
                const double slope = (v[j + 1] - v[j]) / h;
                if (mean.empty()) return {v[j], slope, 0.0, 0.0};
                // Quadratic through both node values with the exact interval mean.
                const double c2 = 6.0 * (0.5 * (v[j] + v[j + 1]) - mean[j]) / (h * h);
                return {v[j], slope - c2 * h, c2, 0.0};
            }
            case Kind::hermite: {
                const double d = (v[j + 1] - v[j]) / h;
                const double c2 = (3.0 * d - 2.0 * m[j] - m[j + 1]) / h;
                const double c3 = (m[j] + m[j + 1] - 2.0 * d) / (h * h);
                return {v[j], m[j], c2, c3};
            }
        }
        return {0, 0, 0, 0};
    }
};

// Mirror image of a sampled function in the distance coordinate from its base point.
struct Local {
    std::vector<double> s, v, d1, d2;
};

Local to_local(const SampledFunction& f, Side side) {
    Local g;
    const std::size_t n = f.grid.size();
    g.s.resize(n);
    g.v.resize(n);
    if (f.has_d1()) g.d1.resize(n);
    if (f.has_d2()) g.d2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = side == Side::left ? i : n - 1 - i;
        g.s[i] = side == Side::left ? f.grid[k] - f.a() : f.b() - f.grid[k];
        g.v[i] = f.values[k];
        if (f.has_d1()) g.d1[i] = side == Side::left ? f.d1[k] : -f.d1[k];
        if (f.has_d2()) g.d2[i] = f.d2[k];
    }
    g.s[0] = 0.0;
    return g;
}

std::vector<double> interval_slopes(const std::vector<double>& x, const std::vector<double>& y);

// Three-point derivative on a non-uniform grid; one-sided at both ends. Built from secant
// slopes so that constants give exactly zero.
std::vector<double> finite_difference(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const std::vector<double> s = interval_slopes(x, y);
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
        d[i] = (h2 * s[i - 1] + h1 * s[i]) / (h1 + h2);
    }
    {
        const double h1 = x[1] - x[0], h2 = x[2] - x[1];
        d[0] = s[0] - h1 * (s[1] - s[0]) / (h1 + h2);
    }
    {
        const std::size_t k = n - 1;
        const double h1 = x[k - 1] - x[k - 2], h2 = x[k] - x[k - 1];
        d[k] = s[k - 1] + h2 * (s[k - 1] - s[k - 2]) / (h1 + h2);
    }
    return d;
}

std::vector<double> interval_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> d(x.size() - 1);
    for (std::size_t j = 0; j + 1 < x.size(); ++j) d[j] = (y[j + 1] - y[j]) / (x[j + 1] - x[j]);
    return d;
}

// A^p - B^p for A > B >= 0 without cancellation.
double pow_diff(double A, double B, double p) {
    if (B <= 0.0) return std::pow(A, p);
    return std::pow(B, p) * std::expm1(p * std::log1p((A - B) / B));
}

// integral over [0, s] of (s - r)^{nu - 1} P(r) dr, 0 < nu < 2.
double kernel_integral(const Piecewise& P, double nu, double s) {
    const std::vector<double>& x = *P.nodes;
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < x.size() && x[j] < s; ++j) {
        const double end = std::min(x[j + 1], s);
        const double A = s - x[j];
        const double B = s - end;
        const double w = A - B;
        const std::array<double, 4> c = P.coeffs(j);
        const int deg = c[3] != 0.0 ? 3 : c[2] != 0.0 ? 2 : c[1] != 0.0 ? 1 : 0;
        if (B >= 2.0 * w) {
            const double x0 = x[j];
            auto g = [&](double r) {
                const double u = r - x0;
                return std::pow(s - r, nu - 1.0) * (c[0] + u * (c[1] + u * (c[2] + u * c[3])));
            };
            total += boost::math::quadrature::gauss<double, 8>::integrate(g, x0, end);
        } else {
            // integral_B^A u^{nu-1} (A - u)^m du, expanded binomially.
            static constexpr double binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
            double acc = 0.0;
            for (int m = 0; m <= deg; ++m) {
                if (c[m] == 0.0) continue;
                double mom = 0.0;
                for (int i = 0; i <= m; ++i) {
                    const double sign = (i & 1) ? -1.0 : 1.0;
                    mom += binom[m][i] * std::pow(A, m - i) * sign * pow_diff(A, B, nu + i) / (nu + i);
                }
                acc += c[m] * mom;
            }
            total += acc;
        }
    }
    return total;
}

double check_point(const Local& g, double tau, const char* who) {
    if (!(tau > 0.0)) throw DomainError(std::string(who) + ": point must lie strictly inside the base side");
    const double L = g.s.back();
    if (tau > L * (1.0 + 1e-14)) throw DomainError(std::string(who) + ": point outside the sampled range");
    return std::min(tau, L);
}

double caputo_local(const Local& g, FracOrder ord, double tau) {
    Piecewise P;
    P.nodes = &g.s;
    double nu;
    if (ord.n == 1) {
        nu = 1.0 - ord.order;
        if (!g.d1.empty() && !g.d2.empty()) {
            P.kind = Piecewise::Kind::hermite;
            P.v = g.d1;
            P.m = g.d2;
        } else if (!g.d1.empty()) {
            P.kind = Piecewise::Kind::linear;
            P.v = g.d1;
            P.mean = interval_slopes(g.s, g.v);
        } else {
            // Central differences at the nodes, corrected to the exact interval means.
            P.kind = Piecewise::Kind::linear;
            P.v = finite_difference(g.s, g.v);
            P.mean = interval_slopes(g.s, g.v);
        }
        P.fallback = interval_slopes(g.s, g.v);
    } else {
        nu = 2.0 - ord.order;
        if (!g.d2.empty()) {
            P.kind = Piecewise::Kind::linear;
            P.v = g.d2;
            if (!g.d1.empty()) {
                P.fallback = interval_slopes(g.s, g.d1);
                P.mean = P.fallback;
            }
        } else {
            std::vector<double> d1 = g.d1;
            if (d1.empty()) {
                if (g.s.size() < 5)
                    throw MissingDerivativeError("caputo: first derivative needed and grid has fewer than 5 points");
                d1 = finite_difference(g.s, g.v);
            }
            P.kind = Piecewise::Kind::constant;
            P.v = interval_slopes(g.s, d1);
        }
    }
    return kernel_integral(P, nu, tau) * rgamma(nu);
}

double rl_local(const Local& g, FracOrder ord, double tau) {
    Piecewise P;
    P.nodes = &g.s;
    P.kind = Piecewise::Kind::hermite;
    P.v = g.v;
    P.m = g.d1.empty() ? finite_difference(g.s, g.v) : g.d1;
    const double nu = ord.n - ord.order;
    auto J = [&](double s) { return kernel_integral(P, nu, s) * rgamma(nu); };

    // J is smooth on the scale of tau, so the step follows tau rather than the grid; steps
    // near the grid spacing lose the second difference to rounding.
    const double L = g.s.back();
    const bool central = 1.02 * tau <= L;
    const double d = (central ? 0.02 : 0.005) * tau;
    auto diff = [&](double e) {
        if (ord.n == 1) {
            if (central) return (J(tau + e) - J(tau - e)) / (2.0 * e);
            return (3.0 * J(tau) - 4.0 * J(tau - e) + J(tau - 2.0 * e)) / (2.0 * e);
        }
        if (central) return (J(tau + e) - 2.0 * J(tau) + J(tau - e)) / (e * e);
        return (2.0 * J(tau) - 5.0 * J(tau - e) + 4.0 * J(tau - 2.0 * e) - J(tau - 3.0 * e)) / (e * e);
    };
    // All stencils are second order; one Richardson step removes the leading term.
    return (4.0 * diff(0.5 * d) - diff(d)) / 3.0;
}

}  // namespace

void SampledFunction::validate() const {
    if (grid.size() < 3) throw DomainError("SampledFunction: need at least 3 grid points");
    if (values.size() != grid.size()) throw DomainError("SampledFunction: values/grid size mismatch");
    if (has_d1() && d1.size() != grid.size()) throw DomainError("SampledFunction: d1 size mismatch");
    if (has_d2() && d2.size() != grid.size()) throw DomainError("SampledFunction: d2 size mismatch");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || !std::isfinite(values[i]))
            throw DomainError("SampledFunction: non-finite sample");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw DomainError("SampledFunction: grid must be strictly increasing");
    }
}

SampledFunction SampledFunction::from(const std::vector<double>& grid,
                                      const std::function<double(double)>& f,
                                      const std::function<double(double)>& df,
                                      const std::function<double(double)>& d2f) {
    SampledFunction s;
    s.grid = grid;
    s.values.reserve(grid.size());
    for (double x : grid) s.values.push_back(f(x));
    if (df)
        for (double x : grid) s.d1.push_back(df(x));
    if (d2f)
        for (double x : grid) s.d2.push_back(d2f(x));
    return s;
}

FracOrder::FracOrder(double o) : order(o), n(static_cast<int>(std::floor(o)) + 1) {
    if (!((o > 0.0 && o < 1.0) || (o > 1.0 && o < 2.0)))
        throw DomainError("FracOrder: order must lie in (0,1) or (1,2)");
}

std::vector<double> graded_grid(double length, int n, double grading) {
    if (n < 2 || !(length > 0.0)) throw DomainError("graded_grid: need n >= 2 and length > 0");
    std::vector<double> g(n + 1);
    for (int j = 0; j <= n; ++j) g[j] = length * std::pow(static_cast<double>(j) / n, grading);
    g[n] = length;
    return g;
}

double rl_left(const SampledFunction& f, FracOrder ord, double x) {
    f.validate();
    const Local g = to_local(f, Side::left);
    return rl_local(g, ord, check_point(g, x - f.a(), "rl_left"));
}

double rl_right(const SampledFunction& f, FracOrder ord, double x) {
    f.validate();
    const Local g = to_local(f, Side::right);
    return rl_local(g, ord, check_point(g, f.b() - x, "rl_right"));
}

double caputo_left(const SampledFunction& f, FracOrder ord, double x) {
    f.validate();
    const Local g = to_local(f, Side::left);
    return caputo_local(g, ord, check_point(g, x - f.a(), "caputo_left"));
}

double caputo_right(const SampledFunction& f, FracOrder ord, double x) {
    f.validate();
    const Local g = to_local(f, Side::right);
    return caputo_local(g, ord, check_point(g, f.b() - x, "caputo_right"));
}

double caputo_rl_residual(const SampledFunction& f, FracOrder ord, Side side, double x) {
    f.validate();
    const Local g = to_local(f, side);
    const double tau = check_point(g, side == Side::left ? x - f.a() : f.b() - x, "caputo_rl_residual");
    const double c = caputo_local(g, ord, tau);
    const double r = rl_local(g, ord, tau);
    double init = g.v[0] * std::pow(tau, -ord.order) * rgamma(1.0 - ord.order);
    if (ord.n == 2) {
        const double g1 = g.d1.empty() ? finite_difference(g.s, g.v)[0] : g.d1[0];
        init += g1 * std::pow(tau, 1.0 - ord.order) * rgamma(2.0 - ord.order);
    }
    return std::fabs(c - (r - init));
}

double ml_rl_deriv(int k, double alpha, double beta, double lambda, double gamma_ord, double t,
                   const SummationPolicy& pol) {
    if (k < 0) throw DomainError("ml_rl_deriv: k must be >= 0");
    if (t == 0.0 || !std::isfinite(t)) throw DomainError("ml_rl_deriv: t must be nonzero and finite");
    const double s = std::fabs(t);
    const double power = alpha * k + beta - gamma_ord - 1.0;
    return std::pow(s, power) * ml_derivative(k, alpha, beta - gamma_ord, lambda * std::pow(s, alpha), pol);
}

double e1_rl_deriv(const E1Params& params, double omega1, double omega2, double gamma_ord, double t,
                   const SummationPolicy& pol) {
    if (!(t < 0.0)) throw DomainError("e1_rl_deriv: t must be negative");
    const double s = -t;
    E1Params q = params;
    q.delta1 = params.delta1 - gamma_ord;
    return std::pow(s, q.delta1 - 1.0) *
           e1(q, omega1 * std::pow(s, params.alpha2), omega2 * std::pow(s, params.beta2), pol);
}

double limit_at_zero(const std::function<double(double)>& g, double eps,
                     const std::vector<double>& exponents) {
    const std::size_t n = exponents.size() + 1;
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        const double e = eps * std::ldexp(1.0, -static_cast<int>(i));
        A[i][0] = 1.0;
        for (std::size_t j = 1; j < n; ++j) A[i][j] = std::pow(e / eps, exponents[j - 1]);
        A[i][n] = g(e);
    }
    // Gaussian elimination with partial pivoting.
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double fct = A[r][c] / A[c][c];
            for (std::size_t k = c; k <= n; ++k) A[r][k] -= fct * A[c][k];
        }
    }
    std::vector<double> sol(n);
    for (std::size_t r = n; r-- > 0;) {
        double acc = A[r][n];
        for (std::size_t k = r + 1; k < n; ++k) acc -= A[r][k] * sol[k];
        sol[r] = acc / A[r][r];
    }
    return sol[0];
}

}  // namespace fracmix
