#pragma once

// Signal equation on the fixed unit ball: 0 = (r^{n-1} vr)_r + r^{n-1}(u - c)
// with vr(0) = vr(1) = 0 and the zero-mean gauge on v. The primary solver
// integrates the exact first integral by cumulative trapezoid; a conservative
// finite-difference solve exists as an independent cross-check.

#include <cmath>
#include <vector>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "params.hpp"
#include "state.hpp"

namespace fbchemo {

namespace detail_elliptic {

// Exact moments of the weight rho^{n-1} against the linear shape functions on
// one cell [a, b]: i0 = int rho^{n-1}, i1 = int (rho - a) rho^{n-1}. Piecewise
// linear data s then integrates cellwise as s_a i0 + (s_b - s_a) i1 / (b - a).
inline void cell_moments(double a, double b, int n, double& i0, double& i1) {
    i0 = (std::pow(b, n) - std::pow(a, n)) / n;
    i1 = (std::pow(b, n + 1) - std::pow(a, n + 1)) / (n + 1) - a * i0;
}

// Nodal dual weights of that rule: sum_i w_i s_i = int rho^{n-1} s for any
// piecewise-linear s on the uniform grid.
inline std::vector<double> dual_weights(int N, int n) {
    const double dr = 1.0 / N;
    std::vector<double> w(N + 1, 0.0);
    for (int i = 1; i <= N; ++i) {
        double i0 = 0.0, i1 = 0.0;
        cell_moments((i - 1) * dr, i * dr, n, i0, i1);
        w[i - 1] += i0 - i1 / dr;
        w[i] += i1 / dr;
    }
    return w;
}

} // namespace detail_elliptic

// s_i = c - u(r_i) on the fixed grid, mean-corrected so the discrete
// compatibility integral vanishes exactly under the same exact-moment rule
// the quadrature solve integrates with (the cumulative then telescopes to an
// exact zero at r = 1). correction is the added constant; defect_rel the
// pre-correction defect relative to the L1 weight of s.
struct SourceField {
    std::vector<double> s;
    double correction = 0.0;
    double defect_rel = 0.0;
};

// Map the moving-grid density onto the fixed grid (u = 0 beyond r = h) and
// form the source. The source constant is c = n * (current discrete mass), so
// compatibility holds up to interpolation error by construction.
inline SourceField restrict_to_fixed_grid(const UState& state, const Params& p) {
    const int N = p.grid_n;
    const double dr = 1.0 / N;
    const double mass = total_mass(state, p);
    const double c = p.n * mass;

    std::vector<double> udens(N + 1, 0.0);
    for (int i = 0; i <= N; ++i) {
        const double r = i * dr;
        udens[i] = (r <= state.h) ? detail::interp_uniform(state.u, state.dy(), r / state.h) : 0.0;
    }
    // The density support ends mid-cell at r = h. Re-weight the last interior
    // node so the cumulative trapezoid of r^{n-1} u carries the full discrete
    // mass; plain nodal sampling misplaces O(dr/h) of it, which the boundary
    // gradient inherits.
    const int j = static_cast<int>(state.h / dr);
    if (j >= 2 && j + 1 <= N) {
        double cum = 0.0, f_prev = 0.0;
        for (int i = 1; i <= j - 1; ++i) {
            const double f = std::pow(i * dr, p.n - 1) * udens[i];
            cum += 0.5 * dr * (f_prev + f);
            f_prev = f;
        }
        const double budget = mass - cum - 0.5 * dr * f_prev;
        udens[j] = std::max(0.0, budget / (dr * std::pow(j * dr, p.n - 1)));
        for (int i = j + 1; i <= N; ++i) udens[i] = 0.0;
    }

    SourceField src;
    src.s.resize(N + 1);
    for (int i = 0; i <= N; ++i) src.s[i] = c - udens[i];

    const std::vector<double> wq = detail_elliptic::dual_weights(N, p.n);
    double integral = 0.0, l1 = 0.0, wsum = 0.0;
    for (int i = 0; i <= N; ++i) {
        integral += wq[i] * src.s[i];
        l1 += wq[i] * std::abs(src.s[i]);
        wsum += wq[i];
    }
    src.defect_rel = std::abs(integral) / (l1 + 1e-300);
    src.correction = -integral / wsum;
    for (auto& v : src.s) v += src.correction;
    return src;
}

namespace detail_elliptic {

// Shift v to zero ball-average under the trapezoid measure.
inline void shift_zero_mean(std::vector<double>& v, int n) {
    const int N = static_cast<int>(v.size()) - 1;
    const double dr = 1.0 / N;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double wr = fbchemo::detail::trap_weight(i, N, dr) * std::pow(i * dr, n - 1);
        num += wr * v[i];
        den += wr;
    }
    const double shift = num / den;
    for (auto& x : v) x -= shift;
}

} // namespace detail_elliptic

// Quadrature solve: vr(r) = r^{1-n} * int_0^r rho^{n-1} s drho cumulatively,
// cell by cell with the trapezoid data s_i, s_{i+1} taken piecewise linear
// and the rho^{n-1} moment integrated exactly (a plain product trapezoid is
// O(dr) wrong in vr at the first node, where the weight has no linear part);
// vr(0) = 0 by the removable singularity. v follows by a second cumulative
// trapezoid and the zero-mean shift.
inline VState solve_v(const SourceField& src, const Params& p) {
    if (src.defect_rel > 10.0 * p.tol_elliptic)
        throw IncompatibleSource("pre-correction compatibility defect " + std::to_string(src.defect_rel));
    const int N = static_cast<int>(src.s.size()) - 1;
    const double dr = 1.0 / N;

    VState vs;
    vs.vr.assign(N + 1, 0.0);
    vs.v.assign(N + 1, 0.0);
    double acc = 0.0;
    for (int i = 1; i <= N; ++i) {
        double i0 = 0.0, i1 = 0.0;
        detail_elliptic::cell_moments((i - 1) * dr, i * dr, p.n, i0, i1);
        acc += src.s[i - 1] * i0 + (src.s[i] - src.s[i - 1]) * i1 / dr;
        vs.vr[i] = acc * std::pow(i * dr, 1 - p.n);
    }
    for (int i = 1; i <= N; ++i) vs.v[i] = vs.v[i - 1] + 0.5 * dr * (vs.vr[i - 1] + vs.vr[i]);
    detail_elliptic::shift_zero_mean(vs.v, p.n);
    return vs;
}

// Independent cross-check: second-order conservative finite differences on
// (r^{n-1} v_r)_r = r^{n-1} s with ghost-node Neumann closures at both ends.
// The origin keeps its own conservation row (zero flux through r = 0 by the
// vanishing face area; dropping that row injects the singular homogeneous
// mode r^{2-n} at O(dr) amplitude). The pure-Neumann system is singular, so
// the source is projected onto the discretely compatible subspace, the
// redundant outer row pins the gauge, and v is re-shifted to zero mean; the
// dropped row then holds identically by the telescoping flux sum.
inline VState solve_v_fd(const SourceField& src, const Params& p) {
    if (src.defect_rel > 10.0 * p.tol_elliptic)
        throw IncompatibleSource("pre-correction compatibility defect " + std::to_string(src.defect_rel));
    const int N = static_cast<int>(src.s.size()) - 1;
    const double dr = 1.0 / N;

    // exact cell moments int r^{n-1} dr between the faces; the midpoint
    // shortcut r_i^{n-1} dr is 8% short on the first cell for n = 3, an O(1)
    // local inconsistency that costs an order in vr near the origin
    auto mom = [&](double a, double b) {
        double i0 = 0.0, i1 = 0.0;
        detail_elliptic::cell_moments(a, b, p.n, i0, i1);
        return i0;
    };
    std::vector<double> volw(N + 1);
    volw[0] = mom(0.0, 0.5 * dr);
    for (int i = 1; i < N; ++i) volw[i] = mom((i - 0.5) * dr, (i + 0.5) * dr);
    volw[N] = mom(1.0 - 0.5 * dr, 1.0);
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= N; ++i) {
        num += volw[i] * src.s[i];
        den += volw[i];
    }
    const double sigma = num / den;

    std::vector<double> lo(N + 1, 0.0), di(N + 1, 0.0), up(N + 1, 0.0), rhs(N + 1, 0.0);
    {
        const double ap = std::pow(0.5 * dr, p.n - 1);
        up[0] = ap / (volw[0] * dr);
        di[0] = -up[0];
        rhs[0] = src.s[0] - sigma;
    }
    for (int i = 1; i < N; ++i) {
        const double am = std::pow((i - 0.5) * dr, p.n - 1);
        const double ap = std::pow((i + 0.5) * dr, p.n - 1);
        lo[i] = am / (volw[i] * dr);
        up[i] = ap / (volw[i] * dr);
        di[i] = -(am + ap) / (volw[i] * dr);
        rhs[i] = src.s[i] - sigma;
    }
    di[N] = 1.0; // gauge row in the redundant slot
    rhs[N] = 0.0;

    VState vs;
    vs.v = detail::tridiag_solve(lo, di, up, rhs);
    detail_elliptic::shift_zero_mean(vs.v, p.n);

    vs.vr.assign(N + 1, 0.0);
    for (int i = 1; i < N; ++i) vs.vr[i] = (vs.v[i + 1] - vs.v[i - 1]) / (2.0 * dr);
    vs.vr[0] = 0.0; // both ends carry the Neumann data exactly
    vs.vr[N] = 0.0;
    return vs;
}

inline double vr_at(const VState& vs, double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw OutOfDomain();
    return detail::interp_uniform(vs.vr, vs.dr(), r);
}

} // namespace fbchemo
