#include <doctest.h>

#include <cmath>
#include <random>

#include "fracmix/errors.hpp"
#include "fracmix/verify.hpp"
#include "oracles.hpp"

using namespace fracmix;

namespace {

constexpr double kPi = 3.14159265358979323846;

FracProblem problem(double alpha, double beta, double gamma, int K) {
    FracProblem pr;
    pr.alpha = alpha;
    pr.beta = beta;
    pr.gamma = gamma;
    pr.K = K;
    return pr;
}

CoefficientSet random_set(int K, unsigned seed, double decay) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CoefficientSet c = CoefficientSet::zeros(K);
    c.c0 = u(rng);
    for (int k = 1; k <= K; ++k) {
        c.c1[k - 1] = u(rng) / std::pow(k, decay);
        c.c2[k - 1] = u(rng) / std::pow(k, decay);
    }
    return c;
}

struct Case {
    SolutionField field;
    SpatialFunction phi, psi;
};

Case solved(double gamma, unsigned seed) {
    const FracProblem pr = problem(0.7, 1.5, gamma, 3);
    const CoefficientSet phi = random_set(3, seed, 2.0), psi = random_set(3, seed + 1, 2.0);
    return {solve_inverse(phi, psi, pr), SpatialFunction::coefficients(phi), SpatialFunction::coefficients(psi)};
}

}  // namespace

TEST_CASE("a solved field passes every residual check") {
    for (double gamma : {0.5, 1.0}) {
        const Case c = solved(gamma, 10u);
        const ResidualReport r = verify_field(c.field, c.phi, c.psi);
        CAPTURE(gamma);
        CHECK(r.pde_plus <= 5e-3);
        CHECK(r.pde_minus <= 5e-3);
        CHECK(r.transmit <= 1e-4);
        CHECK(r.boundary_t <= 1e-8);
        CHECK(r.boundary_x <= 1e-8);
        CHECK(r.continuity <= 1e-9);
        CHECK(passes(r));
        // Constant upper profiles make the t > 0 equation exact.
        if (gamma < 1.0) CHECK(r.pde_plus <= 1e-9);
    }
}

TEST_CASE("a perturbed source fails the equation residual") {
    Case c = solved(0.5, 20u);
    c.field.source.c1[1] += 1e-2;
    const PdeResidual r = pde_residual(c.field);
    CHECK(r.plus >= 5e-3);
    CHECK(r.minus >= 5e-3);
}

TEST_CASE("a broken transmitting condition is detected") {
    Case c = solved(0.5, 30u);
    CHECK(transmit_residual(c.field, 0.5) <= 1e-4);
    // For gamma < 1 the lower limit vanishes, so the upper limit f1 + 4 k pi v2 - l^2 v1 must too.
    c.field.modes.at(2).f1 += 0.1;
    CHECK(transmit_residual(c.field, 0.5) >= 1e-2);
    Case d = solved(1.0, 31u);
    d.field.modes.at(1).w2p -= 0.1;
    CHECK(transmit_residual(d.field, 1.0) >= 1e-2);
}

TEST_CASE("wrong boundary data is detected") {
    const Case c = solved(1.0, 40u);
    const SpatialFunction shifted_phi = SpatialFunction::callable([&](double x) { return c.phi(x) + 1e-6; });
    const SpatialFunction shifted_psi = SpatialFunction::callable([&](double x) { return c.psi(x) - 1e-6; });
    CHECK(boundary_residual(c.field, shifted_phi, c.psi).t == doctest::Approx(1e-6).epsilon(1e-3));
    CHECK(boundary_residual(c.field, c.phi, shifted_psi).t == doctest::Approx(1e-6).epsilon(1e-3));
    CHECK(boundary_residual(c.field, c.phi, c.psi).x <= 1e-12);
}

TEST_CASE("a jump across t = 0 is detected") {
    Case c = solved(0.5, 50u);
    CHECK(continuity_residual(c.field) <= 1e-12);
    c.field.modes.at(1).w1 += 1e-6;
    CHECK(continuity_residual(c.field) >= 1e-6 * (1.0 - 1e-9));
}

TEST_CASE("regularity conditions on the boundary data") {
    const SpatialFunction smooth = SpatialFunction::coefficients(random_set(4, 60u, 2.0));
    for (const RegularityCheck& r : regularity_report(smooth, smooth)) {
        CAPTURE(r.name);
        CHECK(r.passed);
    }
    // x^2 violates periodicity; x^2 - x^3 only violates the second-derivative match (2 vs -4).
    const SpatialFunction square = SpatialFunction::callable([](double x) { return x * x; });
    int failed = 0;
    for (const RegularityCheck& r : regularity_report(square, smooth)) failed += r.passed ? 0 : 1;
    CHECK(failed >= 3);
    ExactFunction cubic;
    cubic.atoms = {{TrigAtom::Fn::cos, 0, 2, 1.0}, {TrigAtom::Fn::cos, 0, 3, -1.0}};
    const SpatialFunction kink = SpatialFunction::exact(cubic);
    for (const RegularityCheck& r : regularity_report(kink, kink)) {
        CAPTURE(r.name);
        const bool second = r.name.find("''") != std::string::npos;
        CHECK(r.passed == !second);
        if (second) CHECK(r.magnitude == doctest::Approx(6.0).epsilon(1e-12));
    }
    const auto rep = regularity_report(smooth, smooth);
    int partial = 0;
    for (const RegularityCheck& r : rep) partial += r.full_set ? 0 : 1;
    CHECK(partial == 2);
}

TEST_CASE("kernel bound dominates sampled kernel values") {
    FracProblem pr = problem(0.7, 1.5, 0.5, 1);
    pr.p = 0.2;
    const double bound = kernel_bound(pr);
    CHECK(std::isfinite(bound));
    const double z = -std::pow(2.0 * kPi, 2.0) * std::pow(pr.p, pr.beta);
    for (double delta : {2.5, 3.5, 4.0}) {
        CHECK(bound >= std::fabs(oracle::e1_convolution_series(1.5, delta, z, z)) * (1.0 - 1e-12));
    }
    pr.K = 0;
    CHECK(kernel_bound(pr) == 0.0);
}

TEST_CASE("tail report separates decaying and non-decaying series") {
    const int K = 24;
    const FracProblem pr = problem(0.7, 1.5, 1.0, K);
    const SolutionField smooth = solve_inverse(random_set(K, 70u, 5.0), random_set(K, 71u, 5.0), pr);
    const SolutionField rough = solve_inverse(random_set(K, 72u, 0.5), random_set(K, 73u, 0.5), pr);
    const TailReport s = tail_report(smooth), r = tail_report(rough);
    REQUIRE(s.series.size() == 4);
    CHECK_FALSE(s.any_flagged());
    CHECK(r.any_flagged());
    double want = 0.0;
    for (int k = 1; k <= K; ++k) want += 1.0 / (k * k * kPi * kPi);
    CHECK(s.reference == doctest::Approx(want).epsilon(1e-14));
    CHECK(std::fabs(s.reference - 1.0 / 6.0) <= 1.0 / (kPi * kPi * K));
}

TEST_CASE("thresholds are inclusive") {
    ResidualReport r;
    const Thresholds th;
    r.pde_plus = r.pde_minus = th.pde;
    r.transmit = th.transmit;
    r.boundary_t = r.boundary_x = th.boundary;
    r.continuity = th.continuity;
    CHECK(passes(r, th));
    r.transmit = std::nextafter(th.transmit, 1.0);
    CHECK_FALSE(passes(r, th));
    r.transmit = th.transmit;
    r.pde_minus = NAN;
    CHECK_FALSE(passes(r, th));
}
