#pragma once

// One IMEX step of the front-fixed density equation
//   u_t = (1/h^2) y^{1-n}(y^{n-1} u_y)_y  -  y^{1-n}(y^{n-1} u W)_y  +  (h'/h) y u_y
// with W(y) = vr(h y)/h the chemotactic transport speed in y. Diffusion is
// implicit (tridiagonal, conservative form, origin limit n*u_yy); the
// chemotaxis flux is explicit with upwinded face values; the grid-motion term
// is split as (h'/h)y^{1-n}(y^n u)_y - n(h'/h)u. The flux half rides the
// explicit faces and telescopes in the discrete mass budget; the diagonal
// half is applied as the exact factor (h/(h + dt h'))^n, so a step moves
// mass only through the boundary face, where the swept flux cancels the
// Robin absorption whenever h' = k + vr(h).
// Robin closure at y=1: u_y + k h u = 0.

#include <cmath>
#include <functional>
#include <vector>

#include "elliptic.hpp"
#include "errors.hpp"
#include "params.hpp"
#include "state.hpp"

namespace fbchemo {

struct StepContext {
    double h = 0.0;
    double h_dot = 0.0;
    std::function<double(double)> vr_fixed; // accessor for vr(r) on [0,1]
    double k_at_boundary = 0.0;             // k(h,t)
    double dt = 0.0;
};

// Hard stability bound for the explicit transport terms (forward-Euler
// positivity of the flux update). Callers should step well below it.
inline double cfl_limit(const UState& state, const StepContext& ctx, const Params& p) {
    const int N = state.n_cells();
    const double dy = state.dy();
    const double h = ctx.h, hd = ctx.h_dot;

    auto speed_at = [&](double y) {
        const double W = ctx.vr_fixed(h * y) / h;
        return std::abs(W) + std::abs(hd / h) * y;
    };

    double max_rate = 0.0;
    // interior/outer nodes: sum of face (area*speed) over node volume
    double a_lo = std::pow(0.5 * dy, p.n - 1);
    double s_lo = speed_at(0.5 * dy);
    for (int j = 1; j <= N; ++j) {
        const bool outer = (j == N);
        const double a_hi = outer ? 1.0 : std::pow((j + 0.5) * dy, p.n - 1);
        const double s_hi = speed_at(outer ? 1.0 : (j + 0.5) * dy);
        const double vol = outer ? 0.5 * dy : std::pow(j * dy, p.n - 1) * dy;
        const double rate = (a_lo * s_lo + a_hi * s_hi) / vol;
        if (rate > max_rate) max_rate = rate;
        a_lo = a_hi;
        s_lo = s_hi;
    }
    // origin node: one-sided stencil over the half cell
    const double rate0 = p.n * speed_at(0.5 * dy) / (0.5 * dy);
    if (rate0 > max_rate) max_rate = rate0;

    return max_rate > 0.0 ? 1.0 / max_rate : 1e300;
}

inline UState step_u(const UState& state, const StepContext& ctx, const Params& p) {
    const int N = state.n_cells();
    const double dy = state.dy();
    const double h = ctx.h, hd = ctx.h_dot, dt = ctx.dt, k = ctx.k_at_boundary;
    const auto& u = state.u;

    if (dt > 0.95 * cfl_limit(state, ctx, p)) throw CflViolation();

    // --- explicit transport: chemotaxis + grid-motion flux, upwinded faces ---
    // face f between nodes j and j+1 (f = j), plus the boundary face at y=1
    std::vector<double> flux(N + 1, 0.0);
    for (int j = 0; j < N; ++j) {
        const double yf = (j + 0.5) * dy;
        const double af = std::pow(yf, p.n - 1);
        const double Wc = ctx.vr_fixed(h * yf) / h; // chemotaxis speed
        const double Wa = -(hd / h) * yf;           // grid-motion speed
        const double uc = (Wc >= 0.0) ? u[j] : u[j + 1];
        const double ua = (Wa >= 0.0) ? u[j] : u[j + 1];
        flux[j] = af * (uc * Wc + ua * Wa);
    }
    flux[N] = u[N] * (ctx.vr_fixed(h) / h - hd / h); // boundary trace carries both speeds

    std::vector<double> expl(N + 1, 0.0);
    for (int j = 1; j <= N; ++j) {
        const double vol = (j == N) ? 0.5 * dy : std::pow(j * dy, p.n - 1) * dy;
        expl[j] = -(flux[j] - flux[j - 1]) / vol;
    }
    // origin: -n d/dy(u W + u Wa)|_0 one-sided over the half cell; both
    // products vanish at y=0, so the half-cell face carries the stencil
    {
        const double yf = 0.5 * dy;
        const double Wc = ctx.vr_fixed(h * yf) / h;
        const double Wa = -(hd / h) * yf;
        const double uc = (Wc >= 0.0) ? u[0] : u[1];
        const double ua = (Wa >= 0.0) ? u[0] : u[1];
        expl[0] = -p.n * (uc * Wc + ua * Wa) / yf;
    }

    // --- implicit radial diffusion (backward Euler, conservative) ---
    std::vector<double> lo(N + 1, 0.0), di(N + 1, 0.0), up(N + 1, 0.0), rhs(N + 1, 0.0);
    const double ih2 = 1.0 / (h * h);
    {
        const double c0 = 2.0 * p.n * ih2 / (dy * dy); // n*u_yy with u_y(0)=0 ghost
        di[0] = 1.0 + dt * c0;
        up[0] = -dt * c0;
    }
    for (int j = 1; j < N; ++j) {
        const double am = std::pow((j - 0.5) * dy, p.n - 1);
        const double ap = std::pow((j + 0.5) * dy, p.n - 1);
        const double vol = std::pow(j * dy, p.n - 1) * dy;
        lo[j] = -dt * am * ih2 / (dy * vol);
        up[j] = -dt * ap * ih2 / (dy * vol);
        di[j] = 1.0 + dt * (am + ap) * ih2 / (dy * vol);
    }
    {
        const double am = std::pow((N - 0.5) * dy, p.n - 1);
        const double vol = 0.5 * dy;
        lo[N] = -dt * am * ih2 / (dy * vol);
        // boundary diffusive flux u_y(1)/h^2 = -k h u_N / h^2 = -k u_N / h
        di[N] = 1.0 + dt * (am * ih2 / (dy * vol) + k / (h * vol));
    }
    for (int j = 0; j <= N; ++j) rhs[j] = u[j] + dt * expl[j];

    UState out;
    out.h = state.h;
    out.t = state.t + dt;
    out.u = detail::tridiag_solve(lo, di, up, rhs);

    // diagonal grid-motion part, integrated exactly: d(ln u)/dt = -n h'/h
    // gives the factor (h0/h1)^n over the substep for any boundary path
    const double relabel = std::pow(h / (h + dt * hd), p.n);
    for (auto& x : out.u) x *= relabel;

    double umin = out.u[0], umax = out.u[0];
    for (double x : out.u) {
        if (x < umin) umin = x;
        if (x > umax) umax = x;
    }
    if (umin < -p.tol_mass * std::max(umax, 0.0))
        throw NegativeDensity("min(u) = " + std::to_string(umin));
    return out;
}

// Discrete defect of the boundary bookkeeping identity
//   D = [u_y/h - u*vr(h)] h^{n-1} + h^{n-1} u(1) h',
// zero in the continuum when the Robin condition and the boundary ODE hold.
inline double boundary_flux_audit(const UState& state, const StepContext& ctx, const Params& p) {
    const int N = state.n_cells();
    const double dy = state.dy();
    const double uy = (3.0 * state.u[N] - 4.0 * state.u[N - 1] + state.u[N - 2]) / (2.0 * dy);
    const double hn1 = std::pow(ctx.h, p.n - 1);
    return (uy / ctx.h - state.u[N] * ctx.vr_fixed(ctx.h)) * hn1 + hn1 * state.u[N] * ctx.h_dot;
}

// Advance the density from (state.t, state.h) to (t_target, h_target) along a
// linear-in-time prescribed boundary, re-solving the signal each substep and
// substepping under the live CFL bound. renorm_target > 0 rescales the density
// to that mass after every substep. Returns the signal solve at arrival.
struct EllipticSolve {
    VState v;
    double defect_rel = 0.0;
    double correction = 0.0;
};

inline EllipticSolve solve_signal(const UState& state, const Params& p) {
    SourceField src = restrict_to_fixed_grid(state, p);
    EllipticSolve out;
    out.defect_rel = src.defect_rel;
    out.correction = src.correction;
    out.v = solve_v(src, p);
    return out;
}

inline EllipticSolve advance_density_along(UState& state, double t_target, double h_target,
                                           const Params& p, double renorm_target = 0.0) {
    const double t0 = state.t, h0 = state.h;
    const double hd = (t_target > t0) ? (h_target - h0) / (t_target - t0) : 0.0;
    while (state.t < t_target - 1e-18) {
        EllipticSolve es = solve_signal(state, p);
        const double tk = state.t;
        StepContext ctx;
        ctx.h = state.h;
        ctx.h_dot = hd;
        ctx.vr_fixed = [&es](double r) { return vr_at(es.v, r); };
        ctx.k_at_boundary = k_eval(p.k_law, state.h, tk);
        ctx.dt = std::min(t_target - tk, 0.45 * cfl_limit(state, ctx, p));

        UState base = state;
        UState stepped = step_u(base, ctx, p);
        for (int it = 1; it < p.elliptic_subiters; ++it) {
            EllipticSolve es2 = solve_signal(stepped, p);
            ctx.vr_fixed = [&es2](double r) { return vr_at(es2.v, r); };
            stepped = step_u(base, ctx, p);
        }
        state = std::move(stepped);
        state.t = tk + ctx.dt;
        state.h = h0 + (state.t - t0) * hd;
        if (renorm_target > 0.0) {
            const double m = total_mass(state, p);
            if (m > 0.0) {
                const double scale = renorm_target / m;
                for (auto& x : state.u) x *= scale;
            }
        }
    }
    state.t = t_target;
    state.h = h_target;
    return solve_signal(state, p);
}

} // namespace fbchemo
