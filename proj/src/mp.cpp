#include "mp.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "fracmix/errors.hpp"

namespace fracmix::mp {

void rgamma_inplace(mpfr_ptr out, mpfr_srcptr arg) {
    if (mpfr_integer_p(arg) && mpfr_sgn(arg) <= 0) {
        mpfr_set_zero(out, 1);
        return;
    }
    mpfr_gamma(out, arg, MPFR_RNDN);
    mpfr_ui_div(out, 1, out, MPFR_RNDN);
}

bool SeriesKey::operator<(const SeriesKey& o) const {
    return std::tie(kind, params, prec) < std::tie(o.kind, o.params, o.prec);
}

namespace {

using Cache = std::map<SeriesKey, std::vector<Num>>;

std::vector<Num>& cached(const SeriesKey& key) {
    thread_local Cache cache;
    if (cache.size() > 256 && cache.find(key) == cache.end()) cache.clear();
    return cache[key];
}

}  // namespace

double power_series(const SeriesKey& key, const CoefFn& coef, double x, long m_peak,
                    double tail_tol, long max_terms) {
    const mpfr_prec_t prec = key.prec;
    std::vector<Num>& coefs = cached(key);
    Num sum(prec, 0.0), xm(prec, 1.0), xv(prec, x), term(prec);
    int small = 0;
    for (long m = 0;; ++m) {
        if (m > max_terms)
            throw ConvergenceError("power series: term budget exhausted");
        if (static_cast<long>(coefs.size()) <= m) {
            coefs.emplace_back(prec);
            coef(coefs.back().get(), m, prec);
        }
        mpfr_mul(term.get(), coefs[m].get(), xm.get(), MPFR_RNDN);
        mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
        const double mag = std::fabs(term.to_double());
        if (m > m_peak && mag < tail_tol) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
        mpfr_mul(xm.get(), xm.get(), xv.get(), MPFR_RNDN);
    }
    return sum.to_double();
}

}  // namespace fracmix::mp
