#pragma once

#include <string>
#include <vector>

#include "fracmix/basis.hpp"
#include "fracmix/solver.hpp"

namespace fracmix {

struct VerifyOptions {
    int nx = 20;
    int nt = 20;
    // Nodes of the graded time grids the mode profiles are sampled on for the numeric Caputo
    // derivatives.
    int quad_nodes = 1600;
    // Boundary and continuity checks use this many points per line.
    int boundary_points = 101;
};

struct PdeResidual {
    double plus = 0.0;   // max over t > 0 of |Caputo_alpha u - u_xx - f|
    double minus = 0.0;  // max over t < 0 of |Caputo_beta u - u_xx - f|
};

struct BoundaryResidual {
    double t = 0.0;  // |u(x,q) - phi|, |u(x,-p) - psi|
    double x = 0.0;  // |u(0,t) - u(1,t)|, |u_x(0,t)|
};

// Weighted partial sums of one coefficient series.
struct SeriesTail {
    std::string name;
    double partial_sum = 0.0;          // sum_{k<=K} (2k pi)^2 max_t |c_k(t)|
    double last_quartile_ratio = 0.0;  // share of the sum from k > 3K/4
    bool non_decaying = false;
};

struct TailReport {
    std::vector<SeriesTail> series;
    // sum_{k<=K} 1/(k pi)^2, tends to 1/6.
    double reference = 0.0;
    bool any_flagged() const;
};

struct RegularityCheck {
    std::string name;
    // true for the smoothness set needed by both time branches, false for the set needed by
    // the t > 0 branch alone.
    bool full_set = true;
    double magnitude = 0.0;
    bool passed = true;
};

struct ResidualReport {
    double pde_plus = 0.0;
    double pde_minus = 0.0;
    double transmit = 0.0;
    double boundary_t = 0.0;
    double boundary_x = 0.0;
    double continuity = 0.0;
    TailReport tails;
};

struct Thresholds {
    double pde = 5e-3;
    double transmit = 1e-4;
    double boundary = 1e-8;
    double continuity = 1e-9;
};

// Numeric Caputo derivatives in t (sampled mode profiles) against analytic u_xx and f on an
// nx-by-nt grid on each side of t = 0. Integer orders use the classical derivative.
PdeResidual pde_residual(const SolutionField& field, const VerifyOptions& opt = {});

// max over modes of |lim_{t->0+} Caputo_alpha - lim_{t->0-} Caputo_gamma|, both limits
// extrapolated from eps = 1e-4 min(p,q), reduced for mode k until (2k pi)^2 eps^order <= 1e-3.
double transmit_residual(const SolutionField& field, double gamma_ord);

BoundaryResidual boundary_residual(const SolutionField& field, const SpatialFunction& phi, const SpatialFunction& psi,
                                   const VerifyOptions& opt = {});

// max_x |u(x,+0) - u(x,-0)|, and the gap between the V and W constants.
double continuity_residual(const SolutionField& field, const VerifyOptions& opt = {});

// End-point conditions on phi and psi: values and second derivatives equal at 0 and 1, first
// derivative zero at 0. Entries with |defect| <= tol * max(1, sup|data|) pass.
std::vector<RegularityCheck> regularity_report(const SpatialFunction& phi, const SpatialFunction& psi,
                                               double tol = 1e-8);

// max over k <= K, delta in {b+1, b+2, 2b+1} and s in (0,p] of |E1(delta; -l^2 s^b, -l^2 s^b)|.
double kernel_bound(const FracProblem& prob, int samples = 16);

TailReport tail_report(const SolutionField& field, double flag_ratio = 0.05);

ResidualReport verify_field(const SolutionField& field, const SpatialFunction& phi, const SpatialFunction& psi,
                            const VerifyOptions& opt = {});

// Residuals equal to a threshold pass.
bool passes(const ResidualReport& r, const Thresholds& th = {});

}  // namespace fracmix
