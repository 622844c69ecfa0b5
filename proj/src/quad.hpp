#pragma once

#include <functional>

namespace fracmix::quad {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

// Integral of g over [0, L] when g may be weakly singular at 0, vary on the length scale
// `layer` near 0, and oscillate with angular frequency `omega`. Geometric panels towards 0,
// tanh-sinh on the innermost panel, Gauss-Kronrod elsewhere.
Estimate graded(const std::function<double(double)>& g, double L, double layer, double omega);

}  // namespace fracmix::quad
