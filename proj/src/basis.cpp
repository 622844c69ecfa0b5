#include "fracmix/basis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <variant>

#include <boost/math/interpolators/barycentric_rational.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "fracmix/errors.hpp"

namespace fracmix {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// int_0^1 x^m exp(i 2 pi j x) dx. For j != 0, exp(i 2 pi j) = 1 exactly.
std::complex<double> exp_moment(int m, int j) {
    if (j == 0) return 1.0 / (m + 1.0);
    const std::complex<double> iw(0.0, kTwoPi * j);
    std::complex<double> I = 0.0;
    for (int r = 1; r <= m; ++r) I = (1.0 - static_cast<double>(r) * I) / iw;
    return I;
}

// int_0^1 x^m fn(2 pi j x) dx
double trig_moment(int m, TrigAtom::Fn fn, int j) {
    const std::complex<double> I = exp_moment(m, j);
    return fn == TrigAtom::Fn::cos ? I.real() : I.imag();
}

// int_0^1 x^m fa(2 pi a x) fb(2 pi b x) dx
double product_moment(int m, TrigAtom::Fn fa, int a, TrigAtom::Fn fb, int b) {
    using F = TrigAtom::Fn;
    if (fa == F::cos && fb == F::cos) return 0.5 * (trig_moment(m, F::cos, a - b) + trig_moment(m, F::cos, a + b));
    if (fa == F::sin && fb == F::sin) return 0.5 * (trig_moment(m, F::cos, a - b) - trig_moment(m, F::cos, a + b));
    if (fa == F::sin && fb == F::cos) return 0.5 * (trig_moment(m, F::sin, a + b) + trig_moment(m, F::sin, a - b));
    return 0.5 * (trig_moment(m, F::sin, a + b) + trig_moment(m, F::sin, b - a));
}

double atom_value(const TrigAtom& t, double x) {
    const double arg = kTwoPi * t.k * x;
    const double trig = t.fn == TrigAtom::Fn::cos ? std::cos(arg) : std::sin(arg);
    return t.amp * std::pow(x, t.power) * trig;
}

// Composite Gauss-Legendre on [0,1].
double integrate01(const std::function<double(double)>& g, int panels) {
    double s = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = static_cast<double>(i) / panels, b = static_cast<double>(i + 1) / panels;
        s += boost::math::quadrature::gauss<double, 16>::integrate(g, a, b);
    }
    return s;
}

// Central differences of order 1..3 with a fixed step, one-sided near the ends.
double fd_derivative(const std::function<double(double)>& f, int order, double x) {
    if (order == 0) return f(x);
    const double h = order == 1 ? 1e-5 : order == 2 ? 1e-4 : 1e-3;
    double c = std::clamp(x, 2.0 * h, 1.0 - 2.0 * h);
    // Shift the stencil inside [0,1]; extrapolate linearly back to x for orders 1 and 2.
    auto d = [&](double y) {
        switch (order) {
            case 1: return (f(y + h) - f(y - h)) / (2.0 * h);
            case 2: return (f(y + h) - 2.0 * f(y) + f(y - h)) / (h * h);
            default: return (f(y + 2 * h) - 2.0 * f(y + h) + 2.0 * f(y - h) - f(y - 2 * h)) / (2.0 * h * h * h);
        }
    };
    if (c == x) return d(x);
    const double d0 = d(c), d1 = d(c + (x < c ? h : -h));
    return d0 + (x - c) * (d0 - d1) / (x < c ? -h : h);
}

}  // namespace

void ModeIndex::validate() const {
    if (k < 0) throw DomainError("ModeIndex: k must be >= 0");
    if ((kind == ModeKind::constant) != (k == 0))
        throw DomainError("ModeIndex: the constant kind goes with k = 0 only");
}

double eigenvalue(int k) { return kTwoPi * k; }

double root_function(ModeIndex m, double x) { return root_function_derivative(m, 0, x); }

double adjoint_function(ModeIndex m, double x) {
    m.validate();
    const double l = eigenvalue(m.k);
    switch (m.kind) {
        case ModeKind::constant: return 2.0 * (1.0 - x);
        case ModeKind::cosine: return 4.0 * (1.0 - x) * std::cos(l * x);
        case ModeKind::xsine: return 4.0 * std::sin(l * x);
    }
    return 0.0;
}

double root_function_derivative(ModeIndex m, int order, double x) {
    m.validate();
    if (order < 0 || order > 3) throw DomainError("root_function_derivative: order must be 0..3");
    const double l = eigenvalue(m.k);
    const double c = std::cos(l * x), s = std::sin(l * x);
    switch (m.kind) {
        case ModeKind::constant: return order == 0 ? 1.0 : 0.0;
        case ModeKind::cosine: {
            const double v[4] = {c, -l * s, -l * l * c, l * l * l * s};
            return v[order];
        }
        case ModeKind::xsine: {
            // d^n/dx^n [x sin(lx)] = x sin^{(n)}(lx) l^n + n l^{n-1} sin^{(n-1)}(lx)
            const double v[4] = {x * s, s + l * x * c, 2.0 * l * c - l * l * x * s,
                                 -3.0 * l * l * s - l * l * l * x * c};
            return v[order];
        }
    }
    return 0.0;
}

CoefficientSet CoefficientSet::zeros(int K) {
    if (K < 0) throw DomainError("CoefficientSet: K must be >= 0");
    CoefficientSet c;
    c.c1.assign(K, 0.0);
    c.c2.assign(K, 0.0);
    return c;
}

void CoefficientSet::validate() const {
    if (c1.size() != c2.size()) throw DomainError("CoefficientSet: c1 and c2 lengths differ");
}

CoefficientSet CoefficientSet::scaled(double s) const {
    CoefficientSet r = *this;
    r.c0 *= s;
    for (double& v : r.c1) v *= s;
    for (double& v : r.c2) v *= s;
    return r;
}

double CoefficientSet::max_abs_diff(const CoefficientSet& o) const {
    double m = std::fabs(c0 - o.c0);
    const std::size_t n = std::max(c1.size(), o.c1.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double a1 = i < c1.size() ? c1[i] : 0.0, b1 = i < o.c1.size() ? o.c1[i] : 0.0;
        const double a2 = i < c2.size() ? c2[i] : 0.0, b2 = i < o.c2.size() ? o.c2[i] : 0.0;
        m = std::max({m, std::fabs(a1 - b1), std::fabs(a2 - b2)});
    }
    return m;
}

double ExactFunction::operator()(double x) const {
    double s = 0.0;
    for (const TrigAtom& t : atoms) s += atom_value(t, x);
    return s;
}

ExactFunction ExactFunction::derivative() const {
    ExactFunction d;
    for (const TrigAtom& t : atoms) {
        if (t.power > 0) {
            TrigAtom a = t;
            a.power -= 1;
            a.amp *= t.power;
            d.atoms.push_back(a);
        }
        if (t.k != 0) {
            TrigAtom a = t;
            const double w = kTwoPi * t.k;
            a.fn = t.fn == TrigAtom::Fn::cos ? TrigAtom::Fn::sin : TrigAtom::Fn::cos;
            a.amp *= t.fn == TrigAtom::Fn::cos ? -w : w;
            d.atoms.push_back(a);
        }
    }
    return d;
}

ExactFunction ExactFunction::scaled(double s) const {
    ExactFunction r = *this;
    for (TrigAtom& t : r.atoms) t.amp *= s;
    return r;
}

ExactFunction ExactFunction::from_coefficients(const CoefficientSet& c) {
    ExactFunction f;
    if (c.c0 != 0.0) f.atoms.push_back({TrigAtom::Fn::cos, 0, 0, c.c0});
    for (int k = 1; k <= c.K(); ++k) {
        if (c.c1[k - 1] != 0.0) f.atoms.push_back({TrigAtom::Fn::cos, k, 0, c.c1[k - 1]});
        if (c.c2[k - 1] != 0.0) f.atoms.push_back({TrigAtom::Fn::sin, k, 1, c.c2[k - 1]});
    }
    return f;
}

struct SpatialFunction::Impl {
    struct Sampled {
        std::shared_ptr<boost::math::barycentric_rational<double>> interp;
        int n;
    };
    std::variant<ExactFunction, std::function<double(double)>, Sampled, CoefficientSet> data;
    double scale = 1.0;
};

SpatialFunction SpatialFunction::exact(ExactFunction f) {
    SpatialFunction s;
    s.impl_ = std::make_shared<Impl>(Impl{std::move(f), 1.0});
    return s;
}

SpatialFunction SpatialFunction::callable(std::function<double(double)> f) {
    if (!f) throw DomainError("SpatialFunction: empty callable");
    SpatialFunction s;
    s.impl_ = std::make_shared<Impl>(Impl{std::move(f), 1.0});
    return s;
}

SpatialFunction SpatialFunction::samples(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size() || x.size() < 4) throw DomainError("SpatialFunction: need >= 4 (x,y) samples");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw DomainError("SpatialFunction: sample abscissae must increase");
    if (x.front() > 1e-12 || x.back() < 1.0 - 1e-12)
        throw DomainError("SpatialFunction: samples must cover [0,1]");
    const int n = static_cast<int>(x.size());
    const std::size_t order = std::min<std::size_t>(5, x.size() - 1);
    auto interp = std::make_shared<boost::math::barycentric_rational<double>>(
        std::move(x), std::move(y), order);
    SpatialFunction s;
    s.impl_ = std::make_shared<Impl>(Impl{Impl::Sampled{interp, n}, 1.0});
    return s;
}

SpatialFunction SpatialFunction::coefficients(CoefficientSet c) {
    c.validate();
    SpatialFunction s;
    s.impl_ = std::make_shared<Impl>(Impl{std::move(c), 1.0});
    return s;
}

double SpatialFunction::operator()(double x) const { return derivative(0, x); }

double SpatialFunction::derivative(int order, double x) const {
    if (order < 0 || order > 3) throw DomainError("SpatialFunction::derivative: order must be 0..3");
    const double sc = impl_->scale;
    if (const auto* e = std::get_if<ExactFunction>(&impl_->data)) {
        ExactFunction d = *e;
        for (int i = 0; i < order; ++i) d = d.derivative();
        return sc * d(x);
    }
    if (const auto* c = std::get_if<CoefficientSet>(&impl_->data)) return sc * synthesize_derivative(*c, order, x);
    std::function<double(double)> f;
    if (const auto* g = std::get_if<std::function<double(double)>>(&impl_->data)) f = *g;
    if (const auto* s = std::get_if<Impl::Sampled>(&impl_->data)) {
        auto interp = s->interp;
        if (order == 0) return sc * (*interp)(x);
        if (order == 1) return sc * interp->prime(x);
        f = [interp](double y) { return (*interp)(y); };
    }
    return sc * fd_derivative(f, order, x);
}

bool SpatialFunction::is_exact() const {
    return std::holds_alternative<ExactFunction>(impl_->data) ||
           std::holds_alternative<CoefficientSet>(impl_->data);
}

SpatialFunction SpatialFunction::scaled(double s) const {
    if (const ExactFunction* e = exact_form()) return exact(e->scaled(s));
    if (const CoefficientSet* c = coefficient_form()) return coefficients(c->scaled(s));
    SpatialFunction r;
    auto impl = std::make_shared<Impl>(*impl_);
    impl->scale *= s;
    r.impl_ = impl;
    return r;
}

const ExactFunction* SpatialFunction::exact_form() const {
    return std::get_if<ExactFunction>(&impl_->data);
}

const CoefficientSet* SpatialFunction::coefficient_form() const {
    return std::get_if<CoefficientSet>(&impl_->data);
}

CoefficientSet project(const ExactFunction& f, int K) {
    using F = TrigAtom::Fn;
    CoefficientSet c = CoefficientSet::zeros(K);
    for (const TrigAtom& t : f.atoms) {
        // (1 - x) weight: moments of order p and p+1.
        c.c0 += 2.0 * t.amp * (trig_moment(t.power, t.fn, t.k) - trig_moment(t.power + 1, t.fn, t.k));
        for (int k = 1; k <= K; ++k) {
            c.c1[k - 1] += 4.0 * t.amp *
                           (product_moment(t.power, t.fn, t.k, F::cos, k) -
                            product_moment(t.power + 1, t.fn, t.k, F::cos, k));
            c.c2[k - 1] += 4.0 * t.amp * product_moment(t.power, t.fn, t.k, F::sin, k);
        }
    }
    return c;
}

CoefficientSet project(const SpatialFunction& f, int K) {
    if (K < 0) throw DomainError("project: K must be >= 0");
    if (const ExactFunction* e = f.exact_form()) return project(*e, K);
    if (const CoefficientSet* c = f.coefficient_form()) {
        // Bi-orthogonality makes the projection a truncation.
        CoefficientSet r = CoefficientSet::zeros(K);
        r.c0 = c->c0;
        for (int k = 1; k <= std::min(K, c->K()); ++k) {
            r.c1[k - 1] = c->c1[k - 1];
            r.c2[k - 1] = c->c2[k - 1];
        }
        return r;
    }
    const int panels = std::max(64, 8 * K);
    CoefficientSet c = CoefficientSet::zeros(K);
    c.c0 = 2.0 * integrate01([&](double x) { return f(x) * (1.0 - x); }, panels);
    for (int k = 1; k <= K; ++k) {
        const double l = eigenvalue(k);
        c.c1[k - 1] = 4.0 * integrate01([&](double x) { return f(x) * (1.0 - x) * std::cos(l * x); }, panels);
        c.c2[k - 1] = 4.0 * integrate01([&](double x) { return f(x) * std::sin(l * x); }, panels);
    }
    for (double v : c.c1)
        if (!std::isfinite(v)) throw QuadratureError("project: non-finite projection");
    return c;
}

double synthesize(const CoefficientSet& c, double x) { return synthesize_derivative(c, 0, x); }

double synthesize_derivative(const CoefficientSet& c, int order, double x) {
    c.validate();
    double s = order == 0 ? c.c0 : 0.0;
    for (int k = 1; k <= c.K(); ++k) {
        if (c.c1[k - 1] != 0.0) s += c.c1[k - 1] * root_function_derivative({k, ModeKind::cosine}, order, x);
        if (c.c2[k - 1] != 0.0) s += c.c2[k - 1] * root_function_derivative({k, ModeKind::xsine}, order, x);
    }
    return s;
}

int gram_index(ModeIndex m) {
    m.validate();
    if (m.kind == ModeKind::constant) return 0;
    return 2 * m.k - 1 + (m.kind == ModeKind::xsine ? 1 : 0);
}

std::vector<std::vector<double>> biorth_gram(int K) {
    if (K < 1) throw DomainError("biorth_gram: K must be >= 1");
    std::vector<ModeIndex> modes{{0, ModeKind::constant}};
    for (int k = 1; k <= K; ++k) {
        modes.push_back({k, ModeKind::cosine});
        modes.push_back({k, ModeKind::xsine});
    }
    const int n = static_cast<int>(modes.size());
    const int panels = 4 * K + 8;
    std::vector<std::vector<double>> G(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            G[i][j] = integrate01(
                [&](double x) { return root_function(modes[i], x) * adjoint_function(modes[j], x); }, panels);
    for (const auto& row : G)
        for (double v : row)
            if (!std::isfinite(v)) throw QuadratureError("biorth_gram: non-finite entry");
    return G;
}

}  // namespace fracmix
