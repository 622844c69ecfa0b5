#include "fracmix/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "fracmix/errors.hpp"
#include "quad.hpp"

namespace fracmix {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// One side of the time axis for mode k: order a, decay c = -lambda^2, coupling 4 k pi.
struct Branch {
    double a;
    double c;
    double kk;
};

Branch branch(const FracProblem& prob, int k, bool plus) {
    const double lam = eigenvalue(k);
    return {plus ? prob.alpha : prob.beta, -lam * lam, 4.0 * k * kPi};
}

// coef * D^nu [ s^mu E_{a,mu+1}(c s^a) ] = coef * s^{mu-nu} E_{a,mu+1-nu}(c s^a)
double pterm(const Branch& br, double coef, double mu, double nu, double s) {
    if (coef == 0.0) return 0.0;
    const double z = br.c * std::pow(s, br.a);
    const double b = mu + 1.0 - nu;
    if (nonpositive_integer(b)) {
        // E_{a,b}(z) = z E_{a,a+b}(z) when 1/Gamma(b) = 0
        return coef * br.c * std::pow(s, mu - nu + br.a) * ml(br.a, b + br.a, z);
    }
    return coef * std::pow(s, mu - nu) * ml(br.a, b, z);
}

// coef * D^nu [ s^{d-1} E1(d; c s^a, c s^a) ] = coef * s^{d-1-nu} E1(d-nu; ...)
double qterm(const Branch& br, double coef, double delta, double nu, double s) {
    if (coef == 0.0) return 0.0;
    const double z = br.c * std::pow(s, br.a);
    return coef * std::pow(s, delta - 1.0 - nu) * e1(E1Params::convolution(br.a, delta - nu), z, z);
}

struct Data {
    double u0, up, f;
};

// D^nu of u0 E_{a,1}(c s^a) + up s E_{a,2}(c s^a) + f s^a E_{a,a+1}(c s^a), nu = 0 keeps the constant.
double second_shape(const Branch& br, const Data& d, double nu, double s) {
    // u0 E_{a,1}(z) = u0 + u0 c s^a E_{a,a+1}(z)
    double r = nu == 0.0 ? d.u0 : 0.0;
    r += pterm(br, d.u0 * br.c, br.a, nu, s);
    r += pterm(br, d.up, 1.0, nu, s);
    r += pterm(br, d.f, br.a, nu, s);
    return r;
}

double first_shape(const Branch& br, const Data& d, const Data& partner, double nu, double s) {
    double r = second_shape(br, d, nu, s);
    double cross = qterm(br, partner.u0, br.a + 1.0, nu, s);
    cross += qterm(br, partner.up, br.a + 2.0, nu, s);
    cross += qterm(br, partner.f, 2.0 * br.a + 1.0, nu, s);
    return r + br.kk * cross;
}

struct Side {
    Data d;        // the component itself
    Data partner;  // x sin component feeding a cosine component
    bool coupled;
};

Side side_data(const ModeState& st, ModeIndex m, bool plus) {
    if (m.kind == ModeKind::constant) {
        return {plus ? Data{st.v0, 0.0, st.f0} : Data{st.w0, st.w0p, st.f0}, {0, 0, 0}, false};
    }
    const ModeCoefficients& c = st.at(m.k);
    const Data second = plus ? Data{c.v2, 0.0, c.f2} : Data{c.w2, c.w2p, c.f2};
    if (m.kind == ModeKind::xsine) return {second, {0, 0, 0}, false};
    const Data first = plus ? Data{c.v1, 0.0, c.f1} : Data{c.w1, c.w1p, c.f1};
    return {first, second, true};
}

double evaluate(const FracProblem& prob, const ModeState& st, ModeIndex m, double t, double nu) {
    m.validate();
    const bool plus = !std::signbit(t);
    const double s = std::fabs(t);
    const Side sd = side_data(st, m, plus);
    const Branch br = branch(prob, m.k, plus);
    return sd.coupled ? first_shape(br, sd.d, sd.partner, nu, s) : second_shape(br, sd.d, nu, s);
}

void check_mode(const ModeState& st, int k) {
    if (k < 1 || k > st.K()) throw DomainError("mode index " + std::to_string(k) + " outside 1.." + std::to_string(st.K()));
}

// int_0^t (t-z)^{a-1} E_{a,a}(c (t-z)^a) g(z) dz
double kernel_convolution(double a, double c, const std::function<double(double)>& g, double t) {
    if (t == 0.0) return 0.0;
    const double T = c != 0.0 ? std::pow(std::fabs(c), 1.0 / a) : 0.0;
    const double layer = T > 0.0 ? 1.0 / T : t;
    const double omega = a > 1.0 ? T * std::sin(kPi / a) : 0.0;
    auto kern = [&](double u) { return std::pow(u, a - 1.0) * ml(a, a, c * std::pow(u, a)); };
    const double h = 0.5 * t;
    const quad::Estimate lo = quad::graded([&](double z) { return kern(t - z) * g(z); }, h, layer, omega);
    const quad::Estimate hi = quad::graded([&](double u) { return kern(u) * g(t - u); }, h, layer, omega);
    const double err = lo.error + hi.error;
    const double val = lo.value + hi.value;
    if (!std::isfinite(val) || err > 1e-9 * std::max(1.0, lo.l1 + hi.l1)) {
        throw QuadratureError("kernel convolution: error estimate " + std::to_string(err));
    }
    return val;
}

int modes_of(const FracProblem& prob) { return prob.K; }

double entry(const std::vector<double>& v, int k) {
    return k <= static_cast<int>(v.size()) ? v[k - 1] : 0.0;
}

void check_data(const CoefficientSet& c, const char* name) {
    try {
        c.validate();
    } catch (const Error& e) {
        throw ConstraintError(std::string(name) + ": " + e.what());
    }
}

// 2x2 solve by Cramer's rule.
std::array<double, 2> solve2(double a11, double a12, double a21, double a22, double r1, double r2) {
    const double det = a11 * a22 - a12 * a21;
    return {(r1 * a22 - a12 * r2) / det, (a11 * r2 - a21 * r1) / det};
}

}  // namespace

void FracProblem::validate() const {
    auto fail = [](const std::string& msg) { throw ConstraintError(msg); };
    if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must lie in (0,1]");
    if (!(beta > 1.0 && beta <= 2.0)) fail("beta must lie in (1,2]");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0,1]");
    if (!(p > 0.0 && std::isfinite(p))) fail("p must be positive");
    if (!(q > 0.0 && std::isfinite(q))) fail("q must be positive");
    if (K < 0) fail("K must be non-negative");
    if (!(tol > 0.0)) fail("tol must be positive");
}

ModeState ModeState::zeros(int K) {
    ModeState st;
    st.modes.assign(static_cast<std::size_t>(std::max(K, 0)), ModeCoefficients{});
    return st;
}

CoefficientSet ModeState::source() const {
    CoefficientSet c = CoefficientSet::zeros(K());
    c.c0 = f0;
    for (int k = 1; k <= K(); ++k) {
        c.c1[k - 1] = at(k).f1;
        c.c2[k - 1] = at(k).f2;
    }
    return c;
}

CoefficientSet ModeState::initial() const {
    CoefficientSet c = CoefficientSet::zeros(K());
    c.c0 = v0;
    for (int k = 1; k <= K(); ++k) {
        c.c1[k - 1] = at(k).v1;
        c.c2[k - 1] = at(k).v2;
    }
    return c;
}

double ModeState::continuity_gap() const {
    double g = std::fabs(v0 - w0);
    for (const auto& m : modes) g = std::max({g, std::fabs(m.v1 - m.w1), std::fabs(m.v2 - m.w2)});
    return g;
}

double mode_profile(const FracProblem& prob, const ModeState& st, ModeIndex m, double t, int order) {
    if (order < 0 || order > 2) throw DomainError("mode_profile: order must be 0, 1 or 2");
    if (order == 2 && !std::signbit(t)) throw DomainError("mode_profile: second derivative only for t < 0");
    const double v = evaluate(prob, st, m, t, order);
    return (std::signbit(t) && order % 2 == 1) ? -v : v;
}

double v0(const FracProblem& prob, const ModeState& st, double t) {
    return mode_profile(prob, st, {0, ModeKind::constant}, std::fabs(t));
}
double v1k(const FracProblem& prob, const ModeState& st, int k, double t) {
    check_mode(st, k);
    return mode_profile(prob, st, {k, ModeKind::cosine}, std::fabs(t));
}
double v2k(const FracProblem& prob, const ModeState& st, int k, double t) {
    check_mode(st, k);
    return mode_profile(prob, st, {k, ModeKind::xsine}, std::fabs(t));
}

// W profiles at t = 0 read the W constants, so evaluate at -0 through the s variable.
double w0(const FracProblem& prob, const ModeState& st, double t) {
    const Side sd = side_data(st, {0, ModeKind::constant}, false);
    return second_shape(branch(prob, 0, false), sd.d, 0.0, std::fabs(t));
}
double w1k(const FracProblem& prob, const ModeState& st, int k, double t) {
    check_mode(st, k);
    const Side sd = side_data(st, {k, ModeKind::cosine}, false);
    return first_shape(branch(prob, k, false), sd.d, sd.partner, 0.0, std::fabs(t));
}
double w2k(const FracProblem& prob, const ModeState& st, int k, double t) {
    check_mode(st, k);
    const Side sd = side_data(st, {k, ModeKind::xsine}, false);
    return second_shape(branch(prob, k, false), sd.d, 0.0, std::fabs(t));
}

double v1k_convolution(const FracProblem& prob, const ModeState& st, int k, double t) {
    check_mode(st, k);
    const double a = prob.alpha;
    const double lam = eigenvalue(k);
    const double c = -lam * lam;
    const ModeCoefficients& m = st.at(k);
    t = std::fabs(t);
    const double z = c * std::pow(t, a);
    double r = m.v1 * ml(a, 1.0, z) + m.f1 * std::pow(t, a) * ml(a, a + 1.0, z);
    if (m.v2 != 0.0) {
        r += 4.0 * k * kPi * m.v2 * kernel_convolution(a, c, [&](double y) { return ml(a, 1.0, c * std::pow(y, a)); }, t);
    }
    if (m.f2 != 0.0) {
        r += 4.0 * k * kPi * m.f2 *
             kernel_convolution(a, c, [&](double y) { return std::pow(y, a) * ml(a, a + 1.0, c * std::pow(y, a)); }, t);
    }
    return r;
}

double w2k_convolution(const FracProblem& prob, const ModeState& st, int k, double t) {
    check_mode(st, k);
    const double b = prob.beta;
    const double lam = eigenvalue(k);
    const double c = -lam * lam;
    const ModeCoefficients& m = st.at(k);
    const double s = std::fabs(t);
    const double z = c * std::pow(s, b);
    double r = m.w2 * ml(b, 1.0, z) + s * m.w2p * ml(b, 2.0, z);
    if (m.f2 != 0.0) r += m.f2 * kernel_convolution(b, c, [](double) { return 1.0; }, s);
    return r;
}

double w1k_convolution(const FracProblem& prob, const ModeState& st, int k, double t) {
    check_mode(st, k);
    const double b = prob.beta;
    const double lam = eigenvalue(k);
    const double c = -lam * lam;
    const ModeCoefficients& m = st.at(k);
    const double s = std::fabs(t);
    const double z = c * std::pow(s, b);
    double r = m.w1 * ml(b, 1.0, z) + s * m.w1p * ml(b, 2.0, z);
    if (m.f1 != 0.0) r += m.f1 * kernel_convolution(b, c, [](double) { return 1.0; }, s);
    const double kk = 4.0 * k * kPi;
    if (m.w2 != 0.0) {
        r += kk * m.w2 * kernel_convolution(b, c, [&](double y) { return ml(b, 1.0, c * std::pow(y, b)); }, s);
    }
    if (m.w2p != 0.0) {
        r += kk * m.w2p * kernel_convolution(b, c, [&](double y) { return y * ml(b, 2.0, c * std::pow(y, b)); }, s);
    }
    if (m.f2 != 0.0) {
        r += kk * m.f2 *
             kernel_convolution(b, c, [&](double y) { return std::pow(y, b) * ml(b, b + 1.0, c * std::pow(y, b)); }, s);
    }
    return r;
}

double mode_caputo(const FracProblem& prob, const ModeState& st, ModeIndex m, double ord, double t) {
    if (!(ord > 0.0 && ord <= 1.0)) throw DomainError("mode_caputo: order must lie in (0,1]");
    return evaluate(prob, st, m, t, ord);
}

std::array<double, 3> caputo_limit_plus(const FracProblem&, const ModeState& st, int k) {
    check_mode(st, k);
    const double lam2 = eigenvalue(k) * eigenvalue(k);
    const ModeCoefficients& m = st.at(k);
    return {st.f0, m.f1 + 4.0 * k * kPi * m.v2 - lam2 * m.v1, m.f2 - lam2 * m.v2};
}

std::array<double, 3> caputo_gamma_minus(const FracProblem& prob, const ModeState& st, int k, double gamma_ord,
                                         double t) {
    check_mode(st, k);
    if (!(t < 0.0)) throw DomainError("caputo_gamma_minus: t must be negative");
    return {mode_caputo(prob, st, {0, ModeKind::constant}, gamma_ord, t),
            mode_caputo(prob, st, {k, ModeKind::cosine}, gamma_ord, t),
            mode_caputo(prob, st, {k, ModeKind::xsine}, gamma_ord, t)};
}

double solvability_delta(const FracProblem& prob, int k) {
    const double lam2 = eigenvalue(k) * eigenvalue(k);
    const double a = prob.alpha, b = prob.beta, p = prob.p, q = prob.q;
    const double zp = -lam2 * std::pow(p, b), zq = -lam2 * std::pow(q, a);
    return p * ml(b, 2.0, zp) + std::pow(p, b) * ml(b, b + 1.0, zp) - std::pow(q, a) * ml(a, a + 1.0, zq);
}

namespace {

void check_solvable(const FracProblem& prob, int k) {
    const double lam2 = eigenvalue(k) * eigenvalue(k);
    const double a = prob.alpha, b = prob.beta, p = prob.p, q = prob.q;
    const double zp = -lam2 * std::pow(p, b), zq = -lam2 * std::pow(q, a);
    const double t1 = p * ml(b, 2.0, zp);
    const double t2 = std::pow(p, b) * ml(b, b + 1.0, zp);
    const double t3 = std::pow(q, a) * ml(a, a + 1.0, zq);
    const double delta = t1 + t2 - t3;
    if (std::fabs(delta) < prob.tol * (std::fabs(t1) + std::fabs(t2) + std::fabs(t3))) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", delta);
        throw SolvabilityError("Delta_" + std::to_string(k) + " = " + buf + " vanishes", k, delta);
    }
}

}  // namespace

SolutionField solve_inverse_gamma_lt1(const CoefficientSet& phi, const CoefficientSet& psi, const FracProblem& prob) {
    prob.validate();
    if (!(prob.gamma < 1.0)) throw ConstraintError("solve_inverse_gamma_lt1 needs gamma < 1");
    check_data(phi, "phi");
    check_data(psi, "psi");
    const int K = modes_of(prob);
    const double b = prob.beta, p = prob.p;
    ModeState st = ModeState::zeros(K);
    st.f0 = 0.0;
    st.v0 = st.w0 = phi.c0;
    st.w0p = (psi.c0 - phi.c0) / p;
    for (int k = 1; k <= K; ++k) {
        const double lam2 = eigenvalue(k) * eigenvalue(k);
        const double kk = 4.0 * k * kPi;
        const double p1 = entry(phi.c1, k), p2 = entry(phi.c2, k);
        const double s1 = entry(psi.c1, k), s2 = entry(psi.c2, k);
        ModeCoefficients& m = st.at(k);
        m.v1 = m.w1 = p1;
        m.v2 = m.w2 = p2;
        m.f2 = lam2 * p2;
        m.f1 = lam2 * p1 - kk * p2;
        const double z = -lam2 * std::pow(p, b);
        const double ep = ml(b, 2.0, z);
        if (std::fabs(ep) < prob.tol * std::max(1.0, std::fabs(z * ml(b, b + 2.0, z)))) {
            throw DivisionError("E_{beta,2}(-(2k pi)^2 p^beta) vanishes for k = " + std::to_string(k), k, ep);
        }
        m.w2p = (s2 - p2) / (p * ep);
        const double cross = std::pow(p, b) * (s2 - p2) * e1(E1Params::convolution(b, b + 2.0), z, z) / ep;
        m.w1p = (s1 - p1 - kk * cross) / (p * ep);
    }
    return {prob, st, st.source()};
}

SolutionField solve_inverse_gamma_eq1(const CoefficientSet& phi, const CoefficientSet& psi, const FracProblem& prob) {
    prob.validate();
    if (prob.gamma != 1.0) throw ConstraintError("solve_inverse_gamma_eq1 needs gamma = 1");
    check_data(phi, "phi");
    check_data(psi, "psi");
    const int K = modes_of(prob);
    const double p = prob.p, q = prob.q;
    ModeState st = ModeState::zeros(K);

    // Mean mode: V0(q) = a + b q^a/G(a+1), W0(p) = a + b p + b p^b/G(b+1), f0 = W0'(0) = b.
    check_solvable(prob, 0);
    {
        ModeState unit = ModeState::zeros(0);
        auto eval = [&](double a, double bb) {
            unit.v0 = unit.w0 = a;
            unit.w0p = unit.f0 = bb;
            return std::array<double, 2>{v0(prob, unit, q), w0(prob, unit, -p)};
        };
        const auto ea = eval(1.0, 0.0), eb = eval(0.0, 1.0);
        const auto x = solve2(ea[0], eb[0], ea[1], eb[1], phi.c0, psi.c0);
        st.v0 = st.w0 = x[0];
        st.w0p = st.f0 = x[1];
    }

    for (int k = 1; k <= K; ++k) {
        check_solvable(prob, k);
        const double lam2 = eigenvalue(k) * eigenvalue(k);
        const double kk = 4.0 * k * kPi;
        ModeState one = ModeState::zeros(k);
        ModeCoefficients& m = one.at(k);
        // Unknowns a = W2(0), b = W2'(0), c = W1(0), d = W1'(0); the transmitting condition gives
        // f2 = b + l^2 a and f1 = d + l^2 c - 4 k pi a.
        auto set = [&](double a, double b, double c, double d) {
            m.v2 = m.w2 = a;
            m.w2p = b;
            m.v1 = m.w1 = c;
            m.w1p = d;
            m.f2 = b + lam2 * a;
            m.f1 = d + lam2 * c - kk * a;
        };
        auto second = [&](double a, double b) {
            set(a, b, 0.0, 0.0);
            return std::array<double, 2>{v2k(prob, one, k, q), w2k(prob, one, k, -p)};
        };
        const auto sa = second(1.0, 0.0), sb = second(0.0, 1.0);
        const auto ab = solve2(sa[0], sb[0], sa[1], sb[1], entry(phi.c2, k), entry(psi.c2, k));

        auto first = [&](double c, double d) {
            set(ab[0], ab[1], c, d);
            return std::array<double, 2>{v1k(prob, one, k, q), w1k(prob, one, k, -p)};
        };
        const auto base = first(0.0, 0.0), fc = first(1.0, 0.0), fd = first(0.0, 1.0);
        const auto cd = solve2(fc[0] - base[0], fd[0] - base[0], fc[1] - base[1], fd[1] - base[1],
                               entry(phi.c1, k) - base[0], entry(psi.c1, k) - base[1]);
        set(ab[0], ab[1], cd[0], cd[1]);
        st.at(k) = m;
    }
    return {prob, st, st.source()};
}

SolutionField solve_inverse(const CoefficientSet& phi, const CoefficientSet& psi, const FracProblem& prob) {
    prob.validate();
    return prob.gamma < 1.0 ? solve_inverse_gamma_lt1(phi, psi, prob) : solve_inverse_gamma_eq1(phi, psi, prob);
}

SolutionField solve_forward(const FracProblem& prob, const CoefficientSet& f, const CoefficientSet& initial,
                            const CoefficientSet& velocity) {
    prob.validate();
    check_data(f, "source");
    check_data(initial, "initial data");
    check_data(velocity, "initial velocity");
    const int K = modes_of(prob);
    ModeState st = ModeState::zeros(K);
    st.f0 = f.c0;
    st.v0 = st.w0 = initial.c0;
    const bool lt1 = prob.gamma < 1.0;
    if (lt1 && f.c0 != 0.0) throw ConstraintError("gamma < 1 forces f0 = 0");
    st.w0p = lt1 ? velocity.c0 : f.c0;
    for (int k = 1; k <= K; ++k) {
        const double lam2 = eigenvalue(k) * eigenvalue(k);
        const double kk = 4.0 * k * kPi;
        ModeCoefficients& m = st.at(k);
        m.f1 = entry(f.c1, k);
        m.f2 = entry(f.c2, k);
        if (lt1) {
            m.v2 = m.f2 / lam2;
            m.v1 = (m.f1 + kk * m.v2) / lam2;
            m.w1p = entry(velocity.c1, k);
            m.w2p = entry(velocity.c2, k);
        } else {
            m.v1 = entry(initial.c1, k);
            m.v2 = entry(initial.c2, k);
            m.w1p = m.f1 + kk * m.v2 - lam2 * m.v1;
            m.w2p = m.f2 - lam2 * m.v2;
        }
        m.w1 = m.v1;
        m.w2 = m.v2;
    }
    return {prob, st, st.source()};
}

CoefficientSet time_slice(const SolutionField& field, double t, int order) {
    const ModeState& st = field.modes;
    CoefficientSet c = CoefficientSet::zeros(st.K());
    c.c0 = mode_profile(field.problem, st, {0, ModeKind::constant}, t, order);
    for (int k = 1; k <= st.K(); ++k) {
        c.c1[k - 1] = mode_profile(field.problem, st, {k, ModeKind::cosine}, t, order);
        c.c2[k - 1] = mode_profile(field.problem, st, {k, ModeKind::xsine}, t, order);
    }
    return c;
}

double eval_u(const SolutionField& field, double x, double t) { return synthesize(time_slice(field, t), x); }

double eval_u_xx(const SolutionField& field, double x, double t) {
    return synthesize_derivative(time_slice(field, t), 2, x);
}

double eval_f(const SolutionField& field, double x) { return synthesize(field.source, x); }

CoefficientSet phi_of(const SolutionField& field) { return time_slice(field, field.problem.q); }

CoefficientSet psi_of(const SolutionField& field) {
    const ModeState& st = field.modes;
    const double t = -field.problem.p;
    CoefficientSet c = CoefficientSet::zeros(st.K());
    c.c0 = w0(field.problem, st, t);
    for (int k = 1; k <= st.K(); ++k) {
        c.c1[k - 1] = w1k(field.problem, st, k, t);
        c.c2[k - 1] = w2k(field.problem, st, k, t);
    }
    return c;
}

}  // namespace fracmix
