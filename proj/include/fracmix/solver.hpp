#pragma once

#include <array>
#include <vector>

#include "fracmix/basis.hpp"
#include "fracmix/specfun.hpp"

namespace fracmix {

// Sub-diffusion of order alpha on (0,q], diffusion-wave of order beta on [-p,0), transmitting
// order gamma across t = 0.
struct FracProblem {
    double alpha = 0.5;
    double beta = 1.5;
    double gamma = 0.5;
    double p = 1.0;
    double q = 1.0;
    int K = 16;
    double tol = 1e-10;

    // Throws ConstraintError unless 0<alpha<=1, 1<beta<=2, 0<gamma<=1, p,q>0, K>=0, tol>0.
    void validate() const;
};

// Constants of one pair of modes k >= 1. W derivatives are taken in s = -t.
struct ModeCoefficients {
    double v1 = 0, v2 = 0;
    double w1 = 0, w2 = 0;
    double w1p = 0, w2p = 0;
    double f1 = 0, f2 = 0;
};

struct ModeState {
    double v0 = 0, w0 = 0, w0p = 0, f0 = 0;
    std::vector<ModeCoefficients> modes;  // modes[k-1]

    static ModeState zeros(int K);
    int K() const { return static_cast<int>(modes.size()); }
    const ModeCoefficients& at(int k) const { return modes.at(k - 1); }
    ModeCoefficients& at(int k) { return modes.at(k - 1); }

    CoefficientSet source() const;
    // u(x, 0) coefficients, from the V side.
    CoefficientSet initial() const;
    // max |V(0) - W(0)| over all modes.
    double continuity_gap() const;
};

struct SolutionField {
    FracProblem problem;
    ModeState modes;
    CoefficientSet source;
};

// Mode profiles and their t-derivatives (order 0..2; order 2 only for t < 0).
// t >= +0 uses the V constants, t <= -0 the W constants.
double mode_profile(const FracProblem& prob, const ModeState& st, ModeIndex m, double t, int order = 0);

double v0(const FracProblem& prob, const ModeState& st, double t);
double v1k(const FracProblem& prob, const ModeState& st, int k, double t);
double v2k(const FracProblem& prob, const ModeState& st, int k, double t);
double w0(const FracProblem& prob, const ModeState& st, double t);
double w1k(const FracProblem& prob, const ModeState& st, int k, double t);
double w2k(const FracProblem& prob, const ModeState& st, int k, double t);

// Same profiles from the kernel-convolution form of the mode equations, by quadrature.
double v1k_convolution(const FracProblem& prob, const ModeState& st, int k, double t);
double w1k_convolution(const FracProblem& prob, const ModeState& st, int k, double t);
double w2k_convolution(const FracProblem& prob, const ModeState& st, int k, double t);

// Caputo derivative of order `ord` in (0,1] of a mode profile: left-sided from 0 for t > 0,
// right-sided towards 0 for t < 0.
double mode_caputo(const FracProblem& prob, const ModeState& st, ModeIndex m, double ord, double t);

// Limits as t -> 0+ of the alpha-order Caputo derivatives of V0, V1k, V2k.
std::array<double, 3> caputo_limit_plus(const FracProblem& prob, const ModeState& st, int k);
// gamma-order right Caputo derivatives of W0, W1k, W2k at t < 0.
std::array<double, 3> caputo_gamma_minus(const FracProblem& prob, const ModeState& st, int k,
                                         double gamma_ord, double t);

// p E_{b,2}(-l^2 p^b) + p^b E_{b,b+1}(-l^2 p^b) - q^a E_{a,a+1}(-l^2 q^a), l = 2k pi.
double solvability_delta(const FracProblem& prob, int k);

// Recover f from u(x,q) = phi and u(x,-p) = psi.
SolutionField solve_inverse_gamma_lt1(const CoefficientSet& phi, const CoefficientSet& psi, const FracProblem& prob);
SolutionField solve_inverse_gamma_eq1(const CoefficientSet& phi, const CoefficientSet& psi, const FracProblem& prob);
// Dispatches on prob.gamma.
SolutionField solve_inverse(const CoefficientSet& phi, const CoefficientSet& psi, const FracProblem& prob);

// Field for a given source. `initial` gives u(x,0) and `velocity` gives -u_t(x,0-); the
// transmitting condition fixes whichever of them it determines (the non-constant part of u(x,0)
// when gamma < 1, the velocity when gamma = 1), and those entries are ignored.
// gamma < 1 requires f0 = 0.
SolutionField solve_forward(const FracProblem& prob, const CoefficientSet& f, const CoefficientSet& initial,
                            const CoefficientSet& velocity);

// Coefficients of d^order u / dt^order at time t.
CoefficientSet time_slice(const SolutionField& field, double t, int order = 0);

double eval_u(const SolutionField& field, double x, double t);
double eval_u_xx(const SolutionField& field, double x, double t);
double eval_f(const SolutionField& field, double x);

// Boundary snapshots u(., q) and u(., -p).
CoefficientSet phi_of(const SolutionField& field);
CoefficientSet psi_of(const SolutionField& field);

}  // namespace fracmix
