#include "fracmix/verify.hpp"

#include <algorithm>
#include <cmath>

#include "fracmix/errors.hpp"
#include "fracmix/fraccalc.hpp"

namespace fracmix {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<ModeIndex> all_modes(int K) {
    std::vector<ModeIndex> m{{0, ModeKind::constant}};
    for (int k = 1; k <= K; ++k) {
        m.push_back({k, ModeKind::cosine});
        m.push_back({k, ModeKind::xsine});
    }
    return m;
}

void put(CoefficientSet& c, ModeIndex m, double v) {
    switch (m.kind) {
        case ModeKind::constant: c.c0 = v; break;
        case ModeKind::cosine: c.c1[m.k - 1] = v; break;
        case ModeKind::xsine: c.c2[m.k - 1] = v; break;
    }
}

double get(const CoefficientSet& c, ModeIndex m) {
    switch (m.kind) {
        case ModeKind::constant: return c.c0;
        case ModeKind::cosine: return c.c1[m.k - 1];
        case ModeKind::xsine: return c.c2[m.k - 1];
    }
    return 0.0;
}

std::vector<double> unit_points(int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[i] = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    return x;
}

double max_residual(const std::vector<CoefficientSet>& D, const std::vector<double>& times, const SolutionField& field,
                    const std::vector<double>& xs) {
    double worst = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const CoefficientSet U = time_slice(field, times[j]);
        for (double x : xs) {
            const double r = synthesize(D[j], x) - synthesize_derivative(U, 2, x) - synthesize(field.source, x);
            worst = std::max(worst, std::fabs(r));
        }
    }
    return worst;
}

std::vector<double> distinct_positive(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double e : v) {
        if (e <= 1e-12) continue;
        if (!out.empty() && e - out.back() < 1e-6) continue;
        out.push_back(e);
    }
    return out;
}

}  // namespace

bool TailReport::any_flagged() const {
    return std::any_of(series.begin(), series.end(), [](const SeriesTail& s) { return s.non_decaying; });
}

PdeResidual pde_residual(const SolutionField& field, const VerifyOptions& opt) {
    const FracProblem& prob = field.problem;
    const ModeState& st = field.modes;
    if (opt.nx < 1 || opt.nt < 1 || opt.quad_nodes < 8) throw DomainError("pde_residual: grid too small");
    const std::vector<ModeIndex> modes = all_modes(st.K());
    const std::vector<double> xs = unit_points(opt.nx);
    PdeResidual out;

    std::vector<double> tp, tm;
    for (int j = 1; j <= opt.nt; ++j) {
        tp.push_back(prob.q * j / opt.nt);
        tm.push_back(-prob.p * j / opt.nt);
    }

    std::vector<CoefficientSet> D(tp.size(), CoefficientSet::zeros(st.K()));
    if (prob.alpha == 1.0) {
        for (std::size_t j = 0; j < tp.size(); ++j) D[j] = time_slice(field, tp[j], 1);
    } else {
        const double grading = std::clamp((2.0 - prob.alpha) / prob.alpha, 2.0, 4.0);
        const std::vector<double> grid = graded_grid(prob.q, opt.quad_nodes, grading);
        const FracOrder ord(prob.alpha);
        for (ModeIndex m : modes) {
            const SampledFunction f = SampledFunction::from(
                grid, [&](double t) { return mode_profile(prob, st, m, t, 0); },
                [&](double t) { return mode_profile(prob, st, m, t, 1); });
            for (std::size_t j = 0; j < tp.size(); ++j) put(D[j], m, caputo_left(f, ord, tp[j]));
        }
    }
    out.plus = max_residual(D, tp, field, xs);

    if (prob.beta == 2.0) {
        for (std::size_t j = 0; j < tm.size(); ++j) D[j] = time_slice(field, tm[j], 2);
    } else {
        const std::vector<double> s = graded_grid(prob.p, opt.quad_nodes, std::clamp(2.0 / (prob.beta - 1.0), 2.0, 6.0));
        std::vector<double> grid(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) grid[i] = -s[s.size() - 1 - i];
        const FracOrder ord(prob.beta);
        for (ModeIndex m : modes) {
            const SampledFunction f = SampledFunction::from(
                grid, [&](double t) { return mode_profile(prob, st, m, t, 0); },
                [&](double t) { return mode_profile(prob, st, m, t, 1); },
                [&](double t) { return mode_profile(prob, st, m, t, 2); });
            for (std::size_t j = 0; j < tm.size(); ++j) put(D[j], m, caputo_right(f, ord, tm[j]));
        }
    }
    out.minus = max_residual(D, tm, field, xs);
    return out;
}

double transmit_residual(const SolutionField& field, double gamma_ord) {
    const FracProblem& prob = field.problem;
    const ModeState& st = field.modes;
    const double a = prob.alpha, b = prob.beta, g = gamma_ord;
    const double base = 1e-4 * std::min(prob.p, prob.q);
    const std::vector<double> plus = distinct_positive({a, 2 * a, 3 * a});
    const std::vector<double> minus = distinct_positive({1 - g, b - g, 1 + b - g, 2 * b - g});
    double worst = 0.0;
    for (ModeIndex m : all_modes(st.K())) {
        // Sample where lambda^2 t^order is small, so the few fitted powers capture the profile.
        const double lam2 = eigenvalue(m.k) * eigenvalue(m.k);
        const double ep = lam2 > 0.0 ? std::min(base, std::pow(1e-3 / lam2, 1.0 / a)) : base;
        const double em = lam2 > 0.0 ? std::min(base, std::pow(1e-3 / lam2, 1.0 / b)) : base;
        const double left = limit_at_zero([&](double e) { return mode_caputo(prob, st, m, a, e); }, ep, plus);
        const double right = limit_at_zero([&](double e) { return mode_caputo(prob, st, m, g, -e); }, em, minus);
        worst = std::max(worst, std::fabs(left - right));
    }
    return worst;
}

BoundaryResidual boundary_residual(const SolutionField& field, const SpatialFunction& phi, const SpatialFunction& psi,
                                   const VerifyOptions& opt) {
    const FracProblem& prob = field.problem;
    const int n = std::max(opt.boundary_points, 2);
    BoundaryResidual out;
    const CoefficientSet uq = time_slice(field, prob.q);
    const CoefficientSet up = time_slice(field, -prob.p);
    for (double x : unit_points(n)) {
        out.t = std::max({out.t, std::fabs(synthesize(uq, x) - phi(x)), std::fabs(synthesize(up, x) - psi(x))});
    }
    for (int i = 0; i < n; ++i) {
        const double t = -prob.p + (prob.p + prob.q) * i / (n - 1);
        const CoefficientSet u = time_slice(field, t);
        out.x = std::max({out.x, std::fabs(synthesize(u, 0.0) - synthesize(u, 1.0)),
                          std::fabs(synthesize_derivative(u, 1, 0.0))});
    }
    return out;
}

double continuity_residual(const SolutionField& field, const VerifyOptions& opt) {
    const CoefficientSet plus = time_slice(field, 0.0);
    const CoefficientSet minus = time_slice(field, -0.0);
    double worst = field.modes.continuity_gap();
    for (double x : unit_points(std::max(opt.boundary_points, 2))) {
        worst = std::max(worst, std::fabs(synthesize(plus, x) - synthesize(minus, x)));
    }
    return worst;
}

std::vector<RegularityCheck> regularity_report(const SpatialFunction& phi, const SpatialFunction& psi, double tol) {
    std::vector<RegularityCheck> out;
    auto sup = [](const SpatialFunction& f) {
        double s = 0.0;
        for (double x : unit_points(201)) s = std::max(s, std::fabs(f(x)));
        return s;
    };
    auto add = [&](const std::string& name, bool full, double defect, double scale) {
        out.push_back({name, full, std::fabs(defect), std::fabs(defect) <= tol * std::max(1.0, scale)});
    };
    auto conditions = [&](const SpatialFunction& f, const std::string& n, bool full) {
        const double s = sup(f);
        add(n + "(0)=" + n + "(1)", full, f(0.0) - f(1.0), s);
        add(n + "'(0)=0", full, f.derivative(1, 0.0), s);
        if (full) add(n + "''(0)=" + n + "''(1)", full, f.derivative(2, 0.0) - f.derivative(2, 1.0), s);
    };
    conditions(phi, "phi", false);
    conditions(phi, "phi", true);
    conditions(psi, "psi", true);
    return out;
}

double kernel_bound(const FracProblem& prob, int samples) {
    prob.validate();
    const double b = prob.beta;
    double worst = 0.0;
    for (int k = 1; k <= prob.K; ++k) {
        const double lam2 = eigenvalue(k) * eigenvalue(k);
        for (double delta : {b + 1.0, b + 2.0, 2.0 * b + 1.0}) {
            const E1Params par = E1Params::convolution(b, delta);
            for (int i = 1; i <= samples; ++i) {
                const double z = -lam2 * std::pow(prob.p * i / samples, b);
                worst = std::max(worst, std::fabs(e1(par, z, z)));
            }
        }
    }
    return worst;
}

TailReport tail_report(const SolutionField& field, double flag_ratio) {
    const FracProblem& prob = field.problem;
    const int K = field.modes.K();
    TailReport out;
    for (int k = 1; k <= K; ++k) out.reference += 1.0 / ((k * kPi) * (k * kPi));

    std::vector<CoefficientSet> plus, minus;
    for (int i = 1; i <= 4; ++i) {
        plus.push_back(time_slice(field, prob.q * i / 4.0));
        minus.push_back(time_slice(field, -prob.p * i / 4.0));
    }
    auto series = [&](const std::string& name, const std::vector<CoefficientSet>& slices, ModeKind kind) {
        SeriesTail s;
        s.name = name;
        double last = 0.0;
        for (int k = 1; k <= K; ++k) {
            double c = 0.0;
            for (const auto& u : slices) c = std::max(c, std::fabs(get(u, {k, kind})));
            const double w = eigenvalue(k) * eigenvalue(k) * c;
            s.partial_sum += w;
            if (4 * k > 3 * K) last += w;
        }
        s.last_quartile_ratio = s.partial_sum > 0.0 ? last / s.partial_sum : 0.0;
        s.non_decaying = s.last_quartile_ratio > flag_ratio;
        out.series.push_back(s);
    };
    series("V1", plus, ModeKind::cosine);
    series("V2", plus, ModeKind::xsine);
    series("W1", minus, ModeKind::cosine);
    series("W2", minus, ModeKind::xsine);
    return out;
}

ResidualReport verify_field(const SolutionField& field, const SpatialFunction& phi, const SpatialFunction& psi,
                            const VerifyOptions& opt) {
    ResidualReport r;
    const PdeResidual pde = pde_residual(field, opt);
    r.pde_plus = pde.plus;
    r.pde_minus = pde.minus;
    r.transmit = transmit_residual(field, field.problem.gamma);
    const BoundaryResidual b = boundary_residual(field, phi, psi, opt);
    r.boundary_t = b.t;
    r.boundary_x = b.x;
    r.continuity = continuity_residual(field, opt);
    r.tails = tail_report(field);
    return r;
}

bool passes(const ResidualReport& r, const Thresholds& th) {
    return r.pde_plus <= th.pde && r.pde_minus <= th.pde && r.transmit <= th.transmit &&
           r.boundary_t <= th.boundary && r.boundary_x <= th.boundary && r.continuity <= th.continuity;
}

}  // namespace fracmix
