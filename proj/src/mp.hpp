#pragma once

#include <mpfr.h>

#include <array>
#include <functional>
#include <vector>

namespace fracmix::mp {

class Num {
public:
    explicit Num(mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    Num(mpfr_prec_t prec, double d) {
        mpfr_init2(v_, prec);
        mpfr_set_d(v_, d, MPFR_RNDN);
    }
    ~Num() {
        if (live_) mpfr_clear(v_);
    }
    Num(const Num&) = delete;
    Num& operator=(const Num&) = delete;
    Num(Num&& o) noexcept {
        v_[0] = o.v_[0];
        o.live_ = false;
    }
    Num& operator=(Num&&) = delete;

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

private:
    mpfr_t v_;
    bool live_ = true;
};

inline mpfr_prec_t bits_for_digits(int digits) {
    return static_cast<mpfr_prec_t>(digits * 3.3219280948873623 + 16);
}

// 1/Gamma(arg) in place; zero at the poles.
void rgamma_inplace(mpfr_ptr out, mpfr_srcptr arg);

// Coefficient c_m of a one-variable power series, written into out.
using CoefFn = std::function<void(mpfr_ptr out, long m, mpfr_prec_t prec)>;

struct SeriesKey {
    int kind;
    std::array<double, 6> params;
    mpfr_prec_t prec;
    bool operator<(const SeriesKey& o) const;
};

// Sum_m c_m x^m in working precision prec. Coefficients are cached per thread under key.
// Stops after m_peak once three consecutive terms fall below tail_tol.
double power_series(const SeriesKey& key, const CoefFn& coef, double x, long m_peak,
                    double tail_tol, long max_terms);

}  // namespace fracmix::mp
