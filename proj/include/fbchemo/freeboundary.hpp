#pragma once

// Boundary dynamics h'(t) = k(h,t) + vr(h,t): RK4 stepping against either the
// closed-form radial gradient of the constant-density regime or a frozen
// numeric signal solve; membership test for the admissible curve set (correct
// start, Lipschitz quotient <= m0, graph confined to (0,1)); and the Picard
// iteration g(t) = b + int_0^t [k(g,s) + vr(g,s)] ds with the PDE re-solved
// along each frozen curve, each iterate rejected as soon as it leaves the set.

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "parabolic.hpp"
#include "params.hpp"
#include "state.hpp"

namespace fbchemo {

struct ExactGrad {
    double M = 1.0;
    int n = 3;
};
struct NumericGrad {
    const VState* vs = nullptr;
};
using GradSource = std::variant<ExactGrad, NumericGrad>;

inline double boundary_gradient(const GradSource& g, double h) {
    if (const auto* e = std::get_if<ExactGrad>(&g)) {
        if (h <= 0.0) throw LeftDomain(false);
        return e->M * h - e->M * std::pow(h, 1 - e->n);
    }
    const auto& ng = std::get<NumericGrad>(g);
    if (h <= 0.0) throw LeftDomain(false);
    if (h > 1.0) throw LeftDomain(true);
    return vr_at(*ng.vs, h);
}

inline double step_h(double h, double t, const GradSource& g, const Params& p, double dt) {
    auto f = [&](double hh, double tt) { return k_eval(p.k_law, hh, tt) + boundary_gradient(g, hh); };
    const double k1 = f(h, t);
    const double k2 = f(h + 0.5 * dt * k1, t + 0.5 * dt);
    const double k3 = f(h + 0.5 * dt * k2, t + 0.5 * dt);
    const double k4 = f(h + dt * k3, t + dt);
    const double hn = h + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // h = 1 itself is admissible (the filled ball is stationary when k(1) = 0);
    // only a strict crossing leaves the domain.
    if (!(hn > 0.0 && hn <= 1.0)) throw LeftDomain(hn > 1.0);
    return hn;
}

struct BReport {
    bool pass = false;
    bool start_ok = false;
    bool quotient_ok = false;
    bool bounds_ok = false;
    double worst_quotient = 0.0;
    double worst_t0 = 0.0, worst_t1 = 0.0;
    double h_min = 0.0, h_max = 0.0;
};

inline BReport check_in_B(const BoundaryCurve& curve, const Params& p, double horizon) {
    BReport rep;
    const auto& ts = curve.times;
    const auto& hs = curve.values;
    if (ts.size() < 2 || hs.size() != ts.size()) return rep;

    rep.start_ok = std::abs(hs.front() - p.b) <= 1e-12 * std::max(1.0, std::abs(p.b));
    rep.h_min = hs[0];
    rep.h_max = hs[0];
    rep.worst_quotient = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        rep.h_min = std::min(rep.h_min, hs[i]);
        rep.h_max = std::max(rep.h_max, hs[i]);
        const double dt = ts[i] - ts[i - 1];
        if (dt <= 0.0) continue;
        const double q = std::abs(hs[i] - hs[i - 1]) / dt;
        if (q > rep.worst_quotient) {
            rep.worst_quotient = q;
            rep.worst_t0 = ts[i - 1];
            rep.worst_t1 = ts[i];
        }
    }
    rep.quotient_ok = rep.worst_quotient <= curve.m0 * (1.0 + 1e-12);
    const double lo = p.b - curve.m0 * horizon;
    const double hi = p.b + curve.m0 * horizon;
    rep.bounds_ok = lo > 0.0 && hi < 1.0 && rep.h_min >= lo - 1e-12 && rep.h_max <= hi + 1e-12;
    rep.pass = rep.start_ok && rep.quotient_ok && rep.bounds_ok;
    return rep;
}

struct PicardResult {
    BoundaryCurve curve;
    std::vector<double> contraction; // d_m / d_{m-1}, m >= 2
    int iterations = 0;
};

inline PicardResult picard_solve(const Params& p, double horizon, double m0) {
    if (!(horizon > 0.0)) throw ParamError("picard horizon must be positive");
    if (!(m0 > 0.0) || m0 * horizon >= 0.5 * std::min(p.b, 1.0 - p.b))
        throw BViolation("horizon too large for Lipschitz bound m0 = " + std::to_string(m0));

    int K = static_cast<int>(std::ceil(horizon / p.dt));
    K = std::max(64, std::min(K, 200000));
    std::vector<double> times(K + 1);
    for (int i = 0; i <= K; ++i) times[i] = horizon * i / K;

    const double lo = p.b - m0 * horizon;
    const double hi = p.b + m0 * horizon;
    std::vector<double> h_prev(K + 1, p.b);
    std::vector<double> factors;
    double d_prev = 0.0;
    for (int m = 1; m <= 50; ++m) {
        // Sweep and integrate in one pass, rejecting the iterate the moment it
        // leaves the admissible set: past that point the curve is discarded
        // anyway, and on an escaping iterate the mismatch h' != k + vr feeds
        // the density exponentially, so finishing the sweep can cost
        // unboundedly many CFL substeps.
        std::vector<double> g(K + 1, p.b);
        {
            UState state = initial_state(p);
            state.h = h_prev[0];
            EllipticSolve es = solve_signal(state, p);
            double psi_prev = k_eval(p.k_law, h_prev[0], times[0]) + vr_at(es.v, h_prev[0]);
            for (int i = 1; i <= K; ++i) {
                es = advance_density_along(state, times[i], h_prev[i], p,
                                           p.renormalize_mass ? total_mass(initial_state(p), p) : 0.0);
                const double psi = k_eval(p.k_law, h_prev[i], times[i]) + vr_at(es.v, h_prev[i]);
                const double dt = times[i] - times[i - 1];
                g[i] = g[i - 1] + 0.5 * dt * (psi_prev + psi);
                psi_prev = psi;
                const double q = std::abs(g[i] - g[i - 1]) / dt;
                if (q > m0 * (1.0 + 1e-12) || g[i] < lo - 1e-12 || g[i] > hi + 1e-12)
                    throw BViolation("iterate " + std::to_string(m) + " left the admissible set at t = " +
                                     std::to_string(times[i]) + " (quotient " + std::to_string(q) +
                                     ", h " + std::to_string(g[i]) + ")");
            }
        }

        double d = 0.0;
        for (int i = 0; i <= K; ++i) d = std::max(d, std::abs(g[i] - h_prev[i]));
        if (m >= 2 && d_prev > 0.0) factors.push_back(d / d_prev);

        BoundaryCurve curve{times, g, m0};
        const BReport rep = check_in_B(curve, p, horizon);
        if (!rep.pass)
            throw BViolation("iterate " + std::to_string(m) + " left the admissible set (quotient " +
                             std::to_string(rep.worst_quotient) + ", range [" +
                             std::to_string(rep.h_min) + ", " + std::to_string(rep.h_max) + "])");
        if (d <= p.tol_picard) return PicardResult{std::move(curve), std::move(factors), m};
        h_prev = std::move(g);
        d_prev = d;
    }
    throw NoConvergence("picard iteration did not contract below tolerance in 50 sweeps" +
                        (factors.empty() ? std::string()
                                         : ", last factor " + std::to_string(factors.back())));
}

} // namespace fbchemo
