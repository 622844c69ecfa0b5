#pragma once

#include <string>

#include "fracmix/errors.hpp"

namespace fracmix {

struct SummationPolicy {
    double abs_tol = 1e-12;
    long max_terms = 1000000;
    // Largest |term| / |sum| accepted from a double-precision pass.
    double cancellation_guard = 1e8;
    // Working precision of the software fallback, in decimal digits.
    int precision_digits = 60;
    // The fallback raises its precision as needed, up to this many digits.
    int max_precision_digits = 400;
    // Let ml4/e1 switch to their Mittag-Leffler closed forms when direct summation
    // is out of reach. Tests turn this off to exercise the raw series.
    bool allow_closed_forms = true;

    void validate() const;
};

// Defaults, with precision_digits taken from FRACMIX_PRECISION_DIGITS when set.
const SummationPolicy& default_policy();

struct MLArgs {
    double alpha;
    double beta;
    double z;
};

// Parameters of the two-variable series
//   sum_{m,n} (g1)_{a1 m} (g2)_{b1 n} x^m y^n
//             / (G(d1 + a2 m + b2 n) G(d2 + a3 m) G(d3 + b3 n)).
struct E1Params {
    double gamma1 = 1, alpha1 = 1;
    double gamma2 = 1, beta1 = 1;
    double delta1 = 1, alpha2 = 1, beta2 = 1;
    double delta2 = 1, alpha3 = 1;
    double delta3 = 1, beta3 = 1;

    // All unit parameters except alpha2 = beta2 = a and the given delta1.
    static E1Params convolution(double a, double delta1);

    // Exchange the x-block and the y-block.
    E1Params swapped() const;

    // True when the series collapses to Mittag-Leffler functions (the convolution family).
    bool is_convolution_family() const;

    void validate() const;
};

// Which normalization to use for the integral representation when gamma1 or gamma2 != 1.
enum class E1IntegralNorm {
    // Matches the double series term by term (no extra factor).
    series_consistent,
    // Extra factor 1 / (G(gamma1) G(gamma2)).
    with_gamma_prefactor,
};

double gamma(double z);
// 1/Gamma(z); zero at the poles.
double rgamma(double z);
// log|Gamma(z)|, sign returned through *sign. Thread safe.
double lgamma_signed(double z, int* sign);

// How an ml() value was obtained. Mostly for diagnostics and tests.
enum class MLMethod { zero, series, asymptotic, high_precision };

struct MLResult {
    double value;
    MLMethod method;
    int digits;  // working precision used by the fallback, 0 otherwise
};

MLResult ml_detail(double alpha, double beta, double z,
                   const SummationPolicy& policy = default_policy());
double ml(double alpha, double beta, double z,
          const SummationPolicy& policy = default_policy());
double ml(const MLArgs& args, const SummationPolicy& policy = default_policy());

// k-th derivative of E_{alpha,beta} at z.
double ml_derivative(int k, double alpha, double beta, double z,
                     const SummationPolicy& policy = default_policy());

// sum_m (g1)_{a1 m} x^m / (G(d1 + a2 m) G(d2 + a3 m))
double ml4(double gamma1, double alpha1, double alpha2, double delta1, double alpha3,
           double delta2, double x, const SummationPolicy& policy = default_policy());

// Two-variable series. Falls back to the closed Mittag-Leffler form for the convolution
// family when direct summation would need more precision than the policy allows.
double e1(const E1Params& params, double x, double y,
          const SummationPolicy& policy = default_policy());

// Direct anti-diagonal summation only (double, then software precision).
double e1_series(const E1Params& params, double x, double y,
                 const SummationPolicy& policy = default_policy());

// Closed form for the convolution family:
//   x != y : [x E_{a,d1}(x) - y E_{a,d1}(y)] / (x - y)
//   x == y : [E_{a,d1-1}(x) + (1 + a - d1) E_{a,d1}(x)] / a
double e1_convolution_closed(double a, double delta1, double x, double y,
                             const SummationPolicy& policy = default_policy());

// Beta-type integral over [0,1] of two one-variable series with rho1 + rho2 = delta1.
double e1_via_integral(const E1Params& params, double rho1, double rho2, double x, double y,
                       E1IntegralNorm norm = E1IntegralNorm::series_consistent,
                       const SummationPolicy& policy = default_policy());

// |E1(a+1; w, w) - w E1(2a+1; w, w) - E_{a,a+1}(w)| for the convolution family.
double e1_shift_identity_residual(double a, double w,
                                  const SummationPolicy& policy = default_policy());

std::string to_string(MLMethod m);

}  // namespace fracmix
