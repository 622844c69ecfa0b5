#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace fracmix {

enum class ModeKind { constant, cosine, xsine };

struct ModeIndex {
    int k;
    ModeKind kind;
    void validate() const;  // constant <=> k == 0
};

// lambda_k = 2 k pi
double eigenvalue(int k);

// 1, cos(2k pi x), x sin(2k pi x)
double root_function(ModeIndex m, double x);
// 2(1-x), 4(1-x) cos(2k pi x), 4 sin(2k pi x)
double adjoint_function(ModeIndex m, double x);
// Derivative of the root function, order 0..2.
double root_function_derivative(ModeIndex m, int order, double x);

// c0 + sum_k c1[k-1] cos(2k pi x) + sum_k c2[k-1] x sin(2k pi x)
struct CoefficientSet {
    double c0 = 0.0;
    std::vector<double> c1;
    std::vector<double> c2;

    static CoefficientSet zeros(int K);
    int K() const { return static_cast<int>(c1.size()); }
    void validate() const;
    CoefficientSet scaled(double s) const;
    double max_abs_diff(const CoefficientSet& o) const;
};

// amp * x^power * cos(2 k pi x)  or  amp * x^power * sin(2 k pi x)
struct TrigAtom {
    enum class Fn { cos, sin };
    Fn fn = Fn::cos;
    int k = 0;
    int power = 0;
    double amp = 1.0;
};

// Finite sum of atoms; integrated and differentiated in closed form.
struct ExactFunction {
    std::vector<TrigAtom> atoms;

    double operator()(double x) const;
    ExactFunction derivative() const;
    ExactFunction scaled(double s) const;

    static ExactFunction from_coefficients(const CoefficientSet& c);
};

// A function on [0,1] given exactly, as a callable, by samples, or by its coefficients.
class SpatialFunction {
public:
    static SpatialFunction exact(ExactFunction f);
    static SpatialFunction callable(std::function<double(double)> f);
    // Samples (x_i, y_i) covering [0,1]; interpolated with a barycentric rational interpolant.
    static SpatialFunction samples(std::vector<double> x, std::vector<double> y);
    static SpatialFunction coefficients(CoefficientSet c);

    double operator()(double x) const;
    // Derivative of order 0..3: closed form for exact/coefficient data, finite differences otherwise.
    double derivative(int order, double x) const;
    bool is_exact() const;
    SpatialFunction scaled(double s) const;

    const ExactFunction* exact_form() const;
    const CoefficientSet* coefficient_form() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// c0 = 2 int f (1-x), c1_k = 4 int f (1-x) cos(2k pi x), c2_k = 4 int f sin(2k pi x).
// Closed form for exact/coefficient data, composite 16-point Gauss-Legendre otherwise.
CoefficientSet project(const SpatialFunction& f, int K);
CoefficientSet project(const ExactFunction& f, int K);

double synthesize(const CoefficientSet& c, double x);
// d^order/dx^order of the synthesized series, order 0..3.
double synthesize_derivative(const CoefficientSet& c, int order, double x);

// Integrals int_0^1 X_i Y_j over the ordered family {1; cos_1, xsin_1; ...; cos_K, xsin_K}.
std::vector<std::vector<double>> biorth_gram(int K);

// Index of a mode in the biorth_gram ordering.
int gram_index(ModeIndex m);

}  // namespace fracmix
