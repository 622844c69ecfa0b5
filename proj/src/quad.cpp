#include "quad.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace fracmix::quad {

Estimate graded(const std::function<double(double)>& g, double L, double layer, double omega) {
    Estimate out;
    if (!(L > 0.0)) return out;
    const double max_width = std::min(0.25 * L, 2.0 / (1.0 + omega));
    std::vector<double> cuts{0.0};
    double c = std::min(0.125 * L, 0.25 * layer);
    while (c < L) {
        cuts.push_back(c);
        c *= 2.0;
    }
    cuts.push_back(L);
    std::vector<double> fine{0.0};
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double a = cuts[i - 1], b = cuts[i];
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
        for (int j = 1; j <= pieces; ++j) fine.push_back(a + (b - a) * j / pieces);
    }
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    for (std::size_t i = 1; i < fine.size(); ++i) {
        const double a = fine[i - 1], b = fine[i];
        double err = 0.0, l1 = 0.0, v = 0.0;
        if (i == 1) {
            v = ts.integrate(g, a, b, 1e-11, &err, &l1);
        } else {
            v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 3, 1e-11, &err, &l1);
        }
        out.value += v;
        out.error += err;
        out.l1 += l1;
    }
    return out;
}

}  // namespace fracmix::quad
