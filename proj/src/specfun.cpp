#include "fracmix/specfun.hpp"

#include <math.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <vector>

#include "mp.hpp"
#include "quad.hpp"

namespace fracmix {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
constexpr double kLn10 = std::numbers::ln10;

bool nonpositive_integer(double z) { return z <= 0.0 && z == std::floor(z); }

// sin(pi y), exactly zero at integers.
double sinpi(double y) {
    if (y == std::floor(y)) return 0.0;
    return std::sin(kPi * std::fmod(y, 2.0));
}

// Signed logarithm: value = s * exp(l), s == 0 for an exact zero.
struct LogVal {
    double l;
    int s;
};

LogVal log_rgamma(double z) {
    if (nonpositive_integer(z)) return {-std::numeric_limits<double>::infinity(), 0};
    int sg = 1;
    const double l = lgamma_signed(z, &sg);
    return {-l, sg};
}

// Pochhammer (g)_{a m} = Gamma(g + a m) / Gamma(g) in log form.
LogVal log_pochhammer(double g, double a, long m) {
    if (m == 0 || a == 0.0) return {0.0, 1};
    const double top = g + a * static_cast<double>(m);
    if (nonpositive_integer(top) || nonpositive_integer(g))
        throw ConstraintError("Pochhammer symbol hits a pole of Gamma");
    int s1 = 1, s2 = 1;
    const double l = lgamma_signed(top, &s1) - lgamma_signed(g, &s2);
    return {l, s1 * s2};
}

double log_abs(double x) { return std::log(std::fabs(x)); }

double apply(const LogVal& v) { return v.s == 0 ? 0.0 : v.s * std::exp(v.l); }

int digits_needed(double log_max_term, const SummationPolicy& pol) {
    const double d = log_max_term / kLn10 + std::log10(1.0 / pol.abs_tol) + 12.0;
    // Rounded up to a multiple of 32 so nearby arguments share cached coefficients.
    const int need = (static_cast<int>(std::ceil(d)) + 31) / 32 * 32;
    return std::max(pol.precision_digits, need);
}

// A double-precision pass is trusted when its rounding error stays well below abs_tol,
// or when there is no cancellation to speak of.
bool double_pass_ok(double sum, double sum_abs, double max_abs, const SummationPolicy& pol) {
    if (!std::isfinite(sum) || !std::isfinite(sum_abs)) return false;
    const double mag = std::fabs(sum);
    if (max_abs > pol.cancellation_guard * mag && max_abs > pol.abs_tol) return false;
    if (sum_abs * 8.0 * kEps <= 0.1 * pol.abs_tol) return true;
    return sum_abs <= 4.0 * mag;
}

struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

struct SeriesOut {
    double sum = 0.0;
    double sum_abs = 0.0;
    double max_abs = 0.0;
};

struct Peak {
    double lmax;
    long where;
    bool reachable;
};

// ---------------------------------------------------------------- Mittag-Leffler

double ml_term(double alpha, double beta, double z, long k) {
    const double arg = alpha * static_cast<double>(k) + beta;
    if (nonpositive_integer(arg)) return 0.0;
    if (k == 0) return rgamma(arg);
    const double zk = std::pow(z, static_cast<double>(k));
    if (std::isfinite(zk) && zk != 0.0 && arg < 170.0 && arg > -170.0) return zk * rgamma(arg);
    const LogVal r = log_rgamma(arg);
    const int sz = (z < 0 && (k & 1)) ? -1 : 1;
    return sz * r.s * std::exp(static_cast<double>(k) * log_abs(z) + r.l);
}

Peak ml_peak(double alpha, double beta, double ax) {
    const double lnx = std::log(ax);
    const double T = std::exp(lnx / alpha);
    if (!(T < 5000.0)) return {T, static_cast<long>(std::min(T / alpha, 1e12)), false};
    const long kmax = static_cast<long>(4.0 * T / alpha) + 64;
    double lmax = -std::numeric_limits<double>::infinity();
    long where = 0;
    for (long k = 0; k <= kmax; ++k) {
        const double arg = alpha * static_cast<double>(k) + beta;
        if (nonpositive_integer(arg)) continue;
        int sg;
        const double l = static_cast<double>(k) * lnx - lgamma_signed(arg, &sg);
        if (l > lmax) {
            lmax = l;
            where = k;
        } else if (k > where + 8 && l < lmax - 40.0 && arg > 2.0) {
            break;
        }
    }
    return {lmax, where, true};
}

SeriesOut ml_series_double(double alpha, double beta, double z, long k_peak, double tail_tol,
                           long max_terms) {
    SeriesOut out;
    Kahan acc;
    int small = 0;
    for (long k = 0;; ++k) {
        if (k > max_terms) throw ConvergenceError("ml: term budget exhausted");
        const double t = ml_term(alpha, beta, z, k);
        acc.add(t);
        const double a = std::fabs(t);
        out.sum_abs += a;
        out.max_abs = std::max(out.max_abs, a);
        const double arg = alpha * static_cast<double>(k) + beta;
        if (k > k_peak && arg > 1.0 && a < std::max(tail_tol, 1e-18 * std::fabs(acc.s))) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
    }
    out.sum = acc.s;
    return out;
}

// Large negative argument, 0 < alpha < 2:
//   E(-x) ~ -sum_k (-x)^{-k} / Gamma(beta - alpha k)
//           + (2/alpha) Re[zeta^{1-beta} exp(zeta)],  zeta = x^{1/alpha} e^{i pi/alpha}
// with the exponential part only for alpha > 1. The algebraic part is cut at the
// smallest term of its envelope x^{-k} Gamma(1 + alpha k - beta) / pi; that term
// is returned as the error estimate.
double ml_asymptotic(double alpha, double beta, double x, double* envelope) {
    const double lnx = std::log(x);
    const double lnpi = std::log(kPi);
    const double floor_log = std::log(1e-40);
    double best = std::numeric_limits<double>::infinity();
    long kb = 1;
    for (long k = 1; k < 2000000; ++k) {
        const double g = alpha * static_cast<double>(k) - beta + 1.0;
        int sg;
        const double le = (g > 1.0 ? lgamma_signed(g, &sg) : 0.0) - static_cast<double>(k) * lnx - lnpi;
        if (le < best) {
            best = le;
            kb = k;
            if (le < floor_log) break;
        } else if (le > best + 30.0) {
            break;
        }
    }
    Kahan acc;
    for (long k = 1; k <= kb; ++k) {
        const double y = beta - alpha * static_cast<double>(k);
        if (nonpositive_integer(y)) continue;
        double lr;
        int sr;
        if (y > 0.0) {
            const LogVal v = log_rgamma(y);
            lr = v.l;
            sr = v.s;
        } else {
            // 1/Gamma(y) = sin(pi y) Gamma(1 - y) / pi
            const double sp = sinpi(y);
            if (sp == 0.0) continue;
            int sg;
            lr = lgamma_signed(1.0 - y, &sg) + std::log(std::fabs(sp)) - lnpi;
            sr = sp > 0 ? 1 : -1;
        }
        const double mag = std::exp(lr - static_cast<double>(k) * lnx);
        const double sign = (k & 1) ? 1.0 : -1.0;  // -(-1)^k
        acc.add(sign * sr * mag);
    }
    double val = acc.s;
    if (alpha > 1.0) {
        const double T = std::exp(lnx / alpha);
        const std::complex<double> zeta = std::polar(T, kPi / alpha);
        val += (2.0 / alpha) * std::real(std::pow(zeta, 1.0 - beta) * std::exp(zeta));
    }
    if (envelope) *envelope = std::exp(best);
    return val;
}

double ml_high_precision(double alpha, double beta, double z, long k_peak, int digits,
                         const SummationPolicy& pol) {
    const mpfr_prec_t prec = mp::bits_for_digits(digits);
    const mp::SeriesKey key{1, {alpha, beta, 0, 0, 0, 0}, prec};
    auto coef = [alpha, beta](mpfr_ptr out, long k, mpfr_prec_t p) {
        mp::Num arg(p, alpha);
        mpfr_mul_si(arg.get(), arg.get(), k, MPFR_RNDN);
        mpfr_add_d(arg.get(), arg.get(), beta, MPFR_RNDN);
        mp::rgamma_inplace(out, arg.get());
    };
    return mp::power_series(key, coef, z, k_peak, pol.abs_tol * 1e-3, pol.max_terms);
}

// ---------------------------------------------------------------- one-variable, four parameters

struct ML4 {
    double g1, a1, a2, d1, a3, d2;

    LogVal log_coef(long m) const {
        const LogVal p = log_pochhammer(g1, a1, m);
        const LogVal r1 = log_rgamma(d1 + a2 * static_cast<double>(m));
        const LogVal r2 = log_rgamma(d2 + a3 * static_cast<double>(m));
        return {p.l + r1.l + r2.l, p.s * r1.s * r2.s};
    }

    double term(double x, long m) const {
        const LogVal c = log_coef(m);
        if (c.s == 0) return 0.0;
        if (m == 0) return apply(c);
        const double xm = std::pow(x, static_cast<double>(m));
        const double md = static_cast<double>(m);
        const double args[3] = {g1 + a1 * md, d1 + a2 * md, d2 + a3 * md};
        bool direct = std::isfinite(xm) && xm != 0.0;
        for (double a : args) direct = direct && std::fabs(a) < 170.0;
        if (direct) {
            return xm * std::tgamma(args[0]) / std::tgamma(g1) / std::tgamma(args[1]) /
                   std::tgamma(args[2]);
        }
        const int sx = (x < 0 && (m & 1)) ? -1 : 1;
        return sx * c.s * std::exp(c.l + md * log_abs(x));
    }

    bool reducible() const { return g1 == 1.0 && a1 == 1.0 && a3 == 1.0 && d2 == 1.0; }
};

Peak ml4_peak(const ML4& f, double x) {
    const double lnx = log_abs(x);
    double lmax = -std::numeric_limits<double>::infinity();
    long where = 0;
    for (long m = 0; m < 400000; ++m) {
        const LogVal c = f.log_coef(m);
        if (c.s == 0) continue;
        const double l = c.l + static_cast<double>(m) * lnx;
        if (l > lmax) {
            lmax = l;
            where = m;
            if (lmax > 2300.0) return {lmax, where, false};
        } else if (m > where + 8 && l < lmax - 40.0) {
            return {lmax, where, true};
        }
    }
    return {lmax, where, false};
}

SeriesOut ml4_series_double(const ML4& f, double x, long m_peak, double tail_tol,
                            long max_terms) {
    SeriesOut out;
    Kahan acc;
    int small = 0;
    for (long m = 0;; ++m) {
        if (m > max_terms) throw ConvergenceError("ml4: term budget exhausted");
        const double t = f.term(x, m);
        acc.add(t);
        const double a = std::fabs(t);
        out.sum_abs += a;
        out.max_abs = std::max(out.max_abs, a);
        if (m > m_peak && a < std::max(tail_tol, 1e-18 * std::fabs(acc.s))) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
    }
    out.sum = acc.s;
    return out;
}

double ml4_high_precision(const ML4& f, double x, long m_peak, int digits,
                          const SummationPolicy& pol) {
    const mpfr_prec_t prec = mp::bits_for_digits(digits);
    const mp::SeriesKey key{2, {f.g1, f.a1, f.a2, f.d1, f.a3, f.d2}, prec};
    auto coef = [f](mpfr_ptr out, long m, mpfr_prec_t p) {
        mp::Num arg(p), g(p), tmp(p);
        // (g1)_{a1 m}
        mpfr_set_d(arg.get(), f.a1, MPFR_RNDN);
        mpfr_mul_si(arg.get(), arg.get(), m, MPFR_RNDN);
        mpfr_add_d(arg.get(), arg.get(), f.g1, MPFR_RNDN);
        mpfr_gamma(out, arg.get(), MPFR_RNDN);
        mpfr_set_d(g.get(), f.g1, MPFR_RNDN);
        mpfr_gamma(g.get(), g.get(), MPFR_RNDN);
        mpfr_div(out, out, g.get(), MPFR_RNDN);
        mpfr_set_d(arg.get(), f.a2, MPFR_RNDN);
        mpfr_mul_si(arg.get(), arg.get(), m, MPFR_RNDN);
        mpfr_add_d(arg.get(), arg.get(), f.d1, MPFR_RNDN);
        mp::rgamma_inplace(tmp.get(), arg.get());
        mpfr_mul(out, out, tmp.get(), MPFR_RNDN);
        mpfr_set_d(arg.get(), f.a3, MPFR_RNDN);
        mpfr_mul_si(arg.get(), arg.get(), m, MPFR_RNDN);
        mpfr_add_d(arg.get(), arg.get(), f.d2, MPFR_RNDN);
        mp::rgamma_inplace(tmp.get(), arg.get());
        mpfr_mul(out, out, tmp.get(), MPFR_RNDN);
    };
    return mp::power_series(key, coef, x, m_peak, pol.abs_tol * 1e-3, pol.max_terms);
}

// ---------------------------------------------------------------- two variables

struct E1Eval {
    const E1Params& p;
    double x, y;

    bool x_on() const { return x != 0.0; }
    bool y_on() const { return y != 0.0; }

    LogVal log_a(long m) const {
        const LogVal poch = log_pochhammer(p.gamma1, p.alpha1, m);
        const LogVal r = log_rgamma(p.delta2 + p.alpha3 * static_cast<double>(m));
        const int sx = (x < 0 && (m & 1)) ? -1 : 1;
        const double lx = m == 0 ? 0.0 : static_cast<double>(m) * log_abs(x);
        return {poch.l + r.l + lx, poch.s * r.s * sx};
    }
    LogVal log_b(long n) const {
        const LogVal poch = log_pochhammer(p.gamma2, p.beta1, n);
        const LogVal r = log_rgamma(p.delta3 + p.beta3 * static_cast<double>(n));
        const int sy = (y < 0 && (n & 1)) ? -1 : 1;
        const double ly = n == 0 ? 0.0 : static_cast<double>(n) * log_abs(y);
        return {poch.l + r.l + ly, poch.s * r.s * sy};
    }
    LogVal log_term(long m, long n) const {
        const LogVal a = log_a(m), b = log_b(n);
        const LogVal c = log_rgamma(p.delta1 + p.alpha2 * static_cast<double>(m) +
                                    p.beta2 * static_cast<double>(n));
        return {a.l + b.l + c.l, a.s * b.s * c.s};
    }
    // Index range of m on anti-diagonal N.
    long m_lo(long N) const { return y_on() ? 0 : N; }
    long m_hi(long N) const { return x_on() ? N : 0; }
};

Peak e1_peak(const E1Eval& e) {
    double lmax = -std::numeric_limits<double>::infinity();
    long where = 0;
    for (long N = 0; N < 200000; ++N) {
        const long lo = e.m_lo(N), hi = e.m_hi(N);
        if (lo > hi) break;
        double lN = -std::numeric_limits<double>::infinity();
        const long probes[5] = {lo, lo + (hi - lo) / 4, lo + (hi - lo) / 2, lo + 3 * (hi - lo) / 4, hi};
        for (long m : probes) {
            const LogVal t = e.log_term(m, N - m);
            if (t.s != 0) lN = std::max(lN, t.l);
        }
        if (lN > lmax) {
            lmax = lN;
            where = N;
            if (lmax > 2300.0) return {lmax, where, false};
        } else if (N > where + 8 && lN < lmax - 40.0) {
            return {lmax + std::log(static_cast<double>(where) + 1.0), where, true};
        }
    }
    return {lmax, where, false};
}

SeriesOut e1_series_double(const E1Eval& e, long N_peak, double tail_tol, long max_terms) {
    SeriesOut out;
    Kahan acc;
    std::vector<LogVal> la, lb;
    long terms = 0;
    int small = 0;
    const bool same_rate = e.p.alpha2 == e.p.beta2;
    for (long N = 0;; ++N) {
        const long lo = e.m_lo(N), hi = e.m_hi(N);
        if (lo > hi) break;
        while (static_cast<long>(la.size()) <= N) la.push_back(e.log_a(static_cast<long>(la.size())));
        while (static_cast<long>(lb.size()) <= N) lb.push_back(e.log_b(static_cast<long>(lb.size())));
        LogVal diag{0.0, 1};
        if (same_rate) diag = log_rgamma(e.p.delta1 + e.p.alpha2 * static_cast<double>(N));
        double block_abs = 0.0;
        for (long m = lo; m <= hi; ++m) {
            const long n = N - m;
            const LogVal c = same_rate ? diag
                                       : log_rgamma(e.p.delta1 + e.p.alpha2 * static_cast<double>(m) +
                                                    e.p.beta2 * static_cast<double>(n));
            const int s = la[m].s * lb[n].s * c.s;
            if (s == 0) continue;
            const double t = s * std::exp(la[m].l + lb[n].l + c.l);
            acc.add(t);
            block_abs += std::fabs(t);
            out.max_abs = std::max(out.max_abs, std::fabs(t));
        }
        out.sum_abs += block_abs;
        terms += hi - lo + 1;
        if (terms > max_terms) throw ConvergenceError("e1: term budget exhausted");
        if (N > N_peak && block_abs < std::max(tail_tol, 1e-18 * std::fabs(acc.s))) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
    }
    out.sum = acc.s;
    return out;
}

void mp_pochhammer(mpfr_ptr out, double g, double a, long m, mpfr_prec_t prec) {
    mp::Num arg(prec, a), gg(prec, g);
    mpfr_mul_si(arg.get(), arg.get(), m, MPFR_RNDN);
    mpfr_add_d(arg.get(), arg.get(), g, MPFR_RNDN);
    mpfr_gamma(out, arg.get(), MPFR_RNDN);
    mpfr_gamma(gg.get(), gg.get(), MPFR_RNDN);
    mpfr_div(out, out, gg.get(), MPFR_RNDN);
}

void mp_rgamma_affine(mpfr_ptr out, double c0, double c1, long m, double c2, long n,
                      mpfr_prec_t prec) {
    mp::Num arg(prec, c1), t(prec, c2);
    mpfr_mul_si(arg.get(), arg.get(), m, MPFR_RNDN);
    mpfr_mul_si(t.get(), t.get(), n, MPFR_RNDN);
    mpfr_add(arg.get(), arg.get(), t.get(), MPFR_RNDN);
    mpfr_add_d(arg.get(), arg.get(), c0, MPFR_RNDN);
    mp::rgamma_inplace(out, arg.get());
}

double e1_high_precision(const E1Eval& e, long N_peak, int digits, const SummationPolicy& pol) {
    const mpfr_prec_t prec = mp::bits_for_digits(digits);
    const E1Params& p = e.p;
    std::vector<mp::Num> A, B, D;
    mp::Num sum(prec, 0.0), term(prec), tmp(prec);
    mp::Num xv(prec, e.x), yv(prec, e.y);
    const bool same_rate = p.alpha2 == p.beta2;
    auto grow = [&](long N) {
        while (static_cast<long>(A.size()) <= N) {
            const long m = static_cast<long>(A.size());
            A.emplace_back(prec);
            mp_pochhammer(A.back().get(), p.gamma1, p.alpha1, m, prec);
            mp_rgamma_affine(tmp.get(), p.delta2, p.alpha3, m, 0.0, 0, prec);
            mpfr_mul(A.back().get(), A.back().get(), tmp.get(), MPFR_RNDN);
            mpfr_pow_si(tmp.get(), xv.get(), m, MPFR_RNDN);
            if (m == 0) mpfr_set_ui(tmp.get(), 1, MPFR_RNDN);
            mpfr_mul(A.back().get(), A.back().get(), tmp.get(), MPFR_RNDN);
        }
        while (static_cast<long>(B.size()) <= N) {
            const long n = static_cast<long>(B.size());
            B.emplace_back(prec);
            mp_pochhammer(B.back().get(), p.gamma2, p.beta1, n, prec);
            mp_rgamma_affine(tmp.get(), p.delta3, p.beta3, n, 0.0, 0, prec);
            mpfr_mul(B.back().get(), B.back().get(), tmp.get(), MPFR_RNDN);
            mpfr_pow_si(tmp.get(), yv.get(), n, MPFR_RNDN);
            if (n == 0) mpfr_set_ui(tmp.get(), 1, MPFR_RNDN);
            mpfr_mul(B.back().get(), B.back().get(), tmp.get(), MPFR_RNDN);
        }
        if (same_rate) {
            while (static_cast<long>(D.size()) <= N) {
                const long k = static_cast<long>(D.size());
                D.emplace_back(prec);
                mp_rgamma_affine(D.back().get(), p.delta1, p.alpha2, k, 0.0, 0, prec);
            }
        }
    };
    long terms = 0;
    int small = 0;
    const double tail_tol = pol.abs_tol * 1e-3;
    for (long N = 0;; ++N) {
        const long lo = e.m_lo(N), hi = e.m_hi(N);
        if (lo > hi) break;
        grow(N);
        double block_abs = 0.0;
        for (long m = lo; m <= hi; ++m) {
            const long n = N - m;
            mpfr_mul(term.get(), A[m].get(), B[n].get(), MPFR_RNDN);
            if (same_rate) {
                mpfr_mul(term.get(), term.get(), D[N].get(), MPFR_RNDN);
            } else {
                mp_rgamma_affine(tmp.get(), p.delta1, p.alpha2, m, p.beta2, n, prec);
                mpfr_mul(term.get(), term.get(), tmp.get(), MPFR_RNDN);
            }
            mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
            block_abs += std::fabs(term.to_double());
        }
        terms += hi - lo + 1;
        if (terms > pol.max_terms) throw ConvergenceError("e1: term budget exhausted");
        if (N > N_peak && block_abs < tail_tol) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
    }
    return sum.to_double();
}

enum class E1Route { with_closed_form, series_only };

double e1_impl(const E1Params& params, double x, double y, const SummationPolicy& pol,
               E1Route route) {
    pol.validate();
    params.validate();
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("e1: non-finite argument");
    if (x == 0.0 && y == 0.0)
        return rgamma(params.delta1) * rgamma(params.delta2) * rgamma(params.delta3);
    const bool closed_ok = route == E1Route::with_closed_form && pol.allow_closed_forms &&
                           params.is_convolution_family();
    if (closed_ok && x < 0.0 && y < 0.0) {
        // Every term on anti-diagonal N has modulus r^N / G(d1 + a N) here, so one term near the
        // peak already shows whether a double pass could meet the tolerance.
        const double r = std::max(-x, -y), a = params.alpha2;
        const double N = std::max(1.0, std::floor(std::pow(r, 1.0 / a) / a));
        const double l = N * std::log(r) - std::lgamma(params.delta1 + a * N);
        if (l > std::log(0.1 * pol.abs_tol / (16.0 * kEps)))
            return e1_convolution_closed(params.alpha2, params.delta1, x, y, pol);
    }
    const E1Eval ev{params, x, y};
    const Peak pk = e1_peak(ev);
    if (pk.reachable) {
        const double est = std::exp(std::min(pk.lmax, 700.0));
        if (est * 16.0 * kEps <= 0.1 * pol.abs_tol || (x > 0 && y > 0)) {
            const SeriesOut r = e1_series_double(ev, pk.where, pol.abs_tol * 1e-3, pol.max_terms);
            if (double_pass_ok(r.sum, r.sum_abs, r.max_abs, pol)) return r.sum;
        }
    }
    if (closed_ok) return e1_convolution_closed(params.alpha2, params.delta1, x, y, pol);
    if (!pk.reachable) throw CancellationError("e1: series growth beyond the precision budget");
    const int digits = digits_needed(pk.lmax, pol);
    if (digits > pol.max_precision_digits)
        throw CancellationError("e1: required precision exceeds max_precision_digits");
    const double n = static_cast<double>(pk.where) * 3.0 + 64.0;
    if (n * n / 2.0 > static_cast<double>(pol.max_terms))
        throw ConvergenceError("e1: series needs more terms than max_terms");
    return e1_high_precision(ev, pk.where, digits, pol);
}

}  // namespace

// ---------------------------------------------------------------- public

void SummationPolicy::validate() const {
    if (!(abs_tol > 0.0)) throw DomainError("SummationPolicy: abs_tol must be > 0");
    if (max_terms < 1) throw DomainError("SummationPolicy: max_terms must be >= 1");
    if (!(cancellation_guard >= 1.0))
        throw DomainError("SummationPolicy: cancellation_guard must be >= 1");
    if (precision_digits < 17) throw DomainError("SummationPolicy: precision_digits must be >= 17");
    if (max_precision_digits < precision_digits)
        throw DomainError("SummationPolicy: max_precision_digits below precision_digits");
}

const SummationPolicy& default_policy() {
    static const SummationPolicy pol = [] {
        SummationPolicy p;
        if (const char* env = std::getenv("FRACMIX_PRECISION_DIGITS")) {
            char* end = nullptr;
            const long d = std::strtol(env, &end, 10);
            if (end != env && d >= 17 && d <= 100000) {
                p.precision_digits = static_cast<int>(d);
                p.max_precision_digits = std::max(p.max_precision_digits, p.precision_digits);
            }
        }
        return p;
    }();
    return pol;
}

E1Params E1Params::convolution(double a, double delta1) {
    E1Params p;
    p.alpha2 = a;
    p.beta2 = a;
    p.delta1 = delta1;
    return p;
}

E1Params E1Params::swapped() const {
    E1Params s = *this;
    s.gamma1 = gamma2;
    s.alpha1 = beta1;
    s.alpha2 = beta2;
    s.alpha3 = beta3;
    s.delta2 = delta3;
    s.gamma2 = gamma1;
    s.beta1 = alpha1;
    s.beta2 = alpha2;
    s.beta3 = alpha3;
    s.delta3 = delta2;
    return s;
}

bool E1Params::is_convolution_family() const {
    return gamma1 == 1 && alpha1 == 1 && gamma2 == 1 && beta1 == 1 && delta2 == 1 && alpha3 == 1 &&
           delta3 == 1 && beta3 == 1 && alpha2 == beta2;
}

void E1Params::validate() const {
    const double m = std::min({alpha1, alpha2, alpha3, beta1, beta2, beta3});
    if (!(m > 0.0)) throw ConstraintError("E1Params: alpha1..3 and beta1..3 must be positive");
}

double lgamma_signed(double z, int* sign) {
    int s = 1;
    const double l = ::lgamma_r(z, &s);
    if (sign) *sign = s;
    return l;
}

double gamma(double z) {
    if (nonpositive_integer(z)) throw PoleError("gamma: pole at non-positive integer");
    return std::tgamma(z);
}

double rgamma(double z) {
    if (nonpositive_integer(z)) return 0.0;
    if (z > 170.0) return std::exp(-lgamma_signed(z, nullptr));
    if (z < -170.0) {
        // 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
        const double sp = sinpi(z);
        return sp * std::exp(lgamma_signed(1.0 - z, nullptr)) / kPi;
    }
    return 1.0 / std::tgamma(z);
}

MLResult ml_detail(double alpha, double beta, double z, const SummationPolicy& pol) {
    pol.validate();
    if (!(alpha > 0.0)) throw DomainError("ml: alpha must be > 0");
    if (!std::isfinite(beta) || !std::isfinite(z)) throw DomainError("ml: non-finite input");
    if (z == 0.0) return {rgamma(beta), MLMethod::zero, 0};

    const double ax = std::fabs(z);
    double env = std::numeric_limits<double>::infinity();
    double asym = 0.0;
    if (z < 0.0 && alpha < 2.0 && ax > 1.0) {
        asym = ml_asymptotic(alpha, beta, ax, &env);
        if (env <= 0.01 * pol.abs_tol) return {asym, MLMethod::asymptotic, 0};
    }
    const Peak pk = ml_peak(alpha, beta, ax);
    const double tail_tol = pol.abs_tol * 1e-3;

    if (z > 0.0) {
        if (!pk.reachable) throw ConvergenceError("ml: value overflows double precision");
        const SeriesOut r = ml_series_double(alpha, beta, z, pk.where, tail_tol, pol.max_terms);
        if (!std::isfinite(r.sum)) throw ConvergenceError("ml: value overflows double precision");
        if (double_pass_ok(r.sum, r.sum_abs, r.max_abs, pol)) return {r.sum, MLMethod::series, 0};
        const int digits = digits_needed(pk.lmax, pol);
        if (digits > pol.max_precision_digits)
            throw CancellationError("ml: required precision exceeds max_precision_digits");
        return {ml_high_precision(alpha, beta, z, pk.where, digits, pol), MLMethod::high_precision,
                digits};
    }

    if (pk.reachable && std::exp(std::min(pk.lmax, 700.0)) * 16.0 * kEps <= 0.1 * pol.abs_tol) {
        const SeriesOut r = ml_series_double(alpha, beta, z, pk.where, tail_tol, pol.max_terms);
        if (double_pass_ok(r.sum, r.sum_abs, r.max_abs, pol)) return {r.sum, MLMethod::series, 0};
    }
    const int digits = pk.reachable ? digits_needed(pk.lmax, pol) : pol.max_precision_digits + 1;
    if (digits <= pol.max_precision_digits)
        return {ml_high_precision(alpha, beta, z, pk.where, digits, pol), MLMethod::high_precision,
                digits};
    if (env <= pol.abs_tol) return {asym, MLMethod::asymptotic, 0};
    throw CancellationError("ml: neither the series nor the asymptotic expansion reaches abs_tol");
}

double ml(double alpha, double beta, double z, const SummationPolicy& pol) {
    return ml_detail(alpha, beta, z, pol).value;
}

double ml(const MLArgs& a, const SummationPolicy& pol) { return ml(a.alpha, a.beta, a.z, pol); }

double ml_derivative(int k, double alpha, double beta, double z, const SummationPolicy& pol) {
    if (k < 0) throw DomainError("ml_derivative: k must be >= 0");
    if (k == 0) return ml(alpha, beta, z, pol);
    if (std::fabs(z) < 0.5) {
        // sum_j (j+1)_k z^j / Gamma(alpha (j+k) + beta)
        Kahan acc;
        for (long j = 0; j < 10000; ++j) {
            double poch = 1.0;
            for (int i = 1; i <= k; ++i) poch *= static_cast<double>(j + i);
            const double t = poch * std::pow(z, static_cast<double>(j)) *
                             rgamma(alpha * static_cast<double>(j + k) + beta);
            acc.add(t);
            if (j > 4 && std::fabs(t) < pol.abs_tol * 1e-4) break;
        }
        return acc.s;
    }
    // alpha z E^(k)_b = E^(k-1)_{b-1} - (b - 1 + alpha (k-1)) E^(k-1)_b
    const double lo = ml_derivative(k - 1, alpha, beta - 1.0, z, pol);
    const double hi = ml_derivative(k - 1, alpha, beta, z, pol);
    return (lo - (beta - 1.0 + alpha * (k - 1)) * hi) / (alpha * z);
}

double ml4(double gamma1, double alpha1, double alpha2, double delta1, double alpha3,
           double delta2, double x, const SummationPolicy& pol) {
    pol.validate();
    if (!(alpha1 > 0.0 && alpha2 > 0.0 && alpha3 > 0.0))
        throw DomainError("ml4: alpha1, alpha2, alpha3 must be > 0");
    if (!std::isfinite(x)) throw DomainError("ml4: non-finite argument");
    const ML4 f{gamma1, alpha1, alpha2, delta1, alpha3, delta2};
    if (x == 0.0) return apply(f.log_coef(0));
    const Peak pk = ml4_peak(f, x);
    if (pk.reachable &&
        (x > 0.0 || std::exp(std::min(pk.lmax, 700.0)) * 16.0 * kEps <= 0.1 * pol.abs_tol)) {
        const SeriesOut r = ml4_series_double(f, x, pk.where, pol.abs_tol * 1e-3, pol.max_terms);
        if (double_pass_ok(r.sum, r.sum_abs, r.max_abs, pol)) return r.sum;
    }
    if (pol.allow_closed_forms && f.reducible()) return ml(alpha2, delta1, x, pol);
    if (!pk.reachable) throw CancellationError("ml4: series growth beyond the precision budget");
    const int digits = digits_needed(pk.lmax, pol);
    if (digits > pol.max_precision_digits)
        throw CancellationError("ml4: required precision exceeds max_precision_digits");
    return ml4_high_precision(f, x, pk.where, digits, pol);
}

double e1(const E1Params& params, double x, double y, const SummationPolicy& pol) {
    return e1_impl(params, x, y, pol, E1Route::with_closed_form);
}

double e1_series(const E1Params& params, double x, double y, const SummationPolicy& pol) {
    return e1_impl(params, x, y, pol, E1Route::series_only);
}

double e1_convolution_closed(double a, double delta1, double x, double y,
                             const SummationPolicy& pol) {
    if (!(a > 0.0)) throw DomainError("e1_convolution_closed: a must be > 0");
    auto diagonal = [&](double w) {
        if (w == 0.0) return rgamma(delta1);
        return (ml(a, delta1 - 1.0, w, pol) + (1.0 + a - delta1) * ml(a, delta1, w, pol)) / a;
    };
    if (x == y) return diagonal(x);
    const double scale = std::max({std::fabs(x), std::fabs(y), 1.0});
    // Nearly equal arguments: the divided difference cancels, use its midpoint limit.
    if (std::fabs(x - y) <= 1e-6 * scale) return diagonal(0.5 * (x + y));
    const double gx = x == 0.0 ? 0.0 : x * ml(a, delta1, x, pol);
    const double gy = y == 0.0 ? 0.0 : y * ml(a, delta1, y, pol);
    return (gx - gy) / (x - y);
}

double e1_via_integral(const E1Params& p, double rho1, double rho2, double x, double y,
                       E1IntegralNorm norm, const SummationPolicy& pol) {
    p.validate();
    if (!(rho1 > 0.0 && rho2 > 0.0)) throw ConstraintError("e1_via_integral: rho1, rho2 must be > 0");
    if (std::fabs(rho1 + rho2 - p.delta1) > 1e-12 * std::max(1.0, std::fabs(p.delta1)))
        throw ConstraintError("e1_via_integral: rho1 + rho2 must equal delta1");

    auto left = [&](double t) {
        return ml4(p.gamma1, p.alpha1, p.alpha2, rho1, p.alpha3, p.delta2,
                   x == 0.0 ? 0.0 : x * std::pow(t, p.alpha2), pol);
    };
    auto right = [&](double s) {
        return ml4(p.gamma2, p.beta1, p.beta2, rho2, p.beta3, p.delta3,
                   y == 0.0 ? 0.0 : y * std::pow(s, p.beta2), pol);
    };
    // t in (0,1], s = 1 - t passed separately so both endpoints keep full precision.
    auto integrand = [&](double t, double s) {
        if (t <= 0.0 || s <= 0.0) {
            if ((t <= 0.0 && rho1 < 1.0) || (s <= 0.0 && rho2 < 1.0)) return 0.0;
        }
        const double w = std::pow(t, rho1 - 1.0) * std::pow(s, rho2 - 1.0);
        if (w == 0.0) return 0.0;
        return w * left(t) * right(s);
    };

    // Each factor varies on the scale 1/T near its endpoint, T = |arg|^{1/a}, and for a > 1
    // oscillates with angular frequency T sin(pi/a) in t.
    const double ox = std::fabs(x) > 1.0 ? std::pow(std::fabs(x), 1.0 / p.alpha2) : 1.0;
    const double oy = std::fabs(y) > 1.0 ? std::pow(std::fabs(y), 1.0 / p.beta2) : 1.0;
    const double wx = p.alpha2 > 1.0 ? ox * std::sin(kPi / p.alpha2) : 0.0;
    const double wy = p.beta2 > 1.0 ? oy * std::sin(kPi / p.beta2) : 0.0;

    const quad::Estimate lo = quad::graded([&](double u) { return integrand(u, 1.0 - u); }, 0.5, 1.0 / ox, wx + wy);
    const quad::Estimate hi = quad::graded([&](double u) { return integrand(1.0 - u, u); }, 0.5, 1.0 / oy, wx + wy);
    const double val = lo.value + hi.value;
    const double err = lo.error + hi.error;
    const double l1 = lo.l1 + hi.l1;
    if (!std::isfinite(val) || err > 1e-10 * std::max(1.0, l1))
        throw QuadratureError("e1_via_integral: quadrature did not converge");
    if (norm == E1IntegralNorm::with_gamma_prefactor) return val * rgamma(p.gamma1) * rgamma(p.gamma2);
    return val;
}

double e1_shift_identity_residual(double a, double w, const SummationPolicy& pol) {
    const double lhs = e1(E1Params::convolution(a, a + 1.0), w, w, pol) -
                       w * e1(E1Params::convolution(a, 2.0 * a + 1.0), w, w, pol);
    return std::fabs(lhs - ml(a, a + 1.0, w, pol));
}

std::string to_string(MLMethod m) {
    switch (m) {
        case MLMethod::zero: return "zero";
        case MLMethod::series: return "series";
        case MLMethod::asymptotic: return "asymptotic";
        case MLMethod::high_precision: return "high_precision";
    }
    return "unknown";
}

}  // namespace fracmix
