#pragma once

// Problem specification and validation. Params carries the physical setup
// (dimension, initial radius, boundary coefficient law, initial profile) and
// the numerics knobs shared by every solver module.

#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

#include "detail.hpp"
#include "errors.hpp"

namespace fbchemo {

// Boundary coefficient k in the Robin flux law u_r + k*u = 0 and in the
// boundary ODE h' = k(h,t) + vr(h,t).
struct LinearK {
    double a = 1.0; // k(x,t) = a*|x|
};
struct TabulatedK {
    // Piecewise-linear samples in the radial coordinate, constant in time.
    // lipschitz and bound are the declared constants the data must respect.
    std::vector<double> r;
    std::vector<double> v;
    double lipschitz = 0.0;
    double bound = 0.0;
};
using KLaw = std::variant<LinearK, TabulatedK>;

inline double k_eval(const KLaw& law, double x, double /*t*/) {
    if (const auto* lin = std::get_if<LinearK>(&law)) return lin->a * std::abs(x);
    const auto& tab = std::get<TabulatedK>(law);
    return detail::interp_table(tab.r, tab.v, x);
}

// Initial radial profile on [0,b].
struct ConstantProfile {
    double value = 1.0;
};
struct BumpProfile {
    double peak = 1.0;  // peak*(1-(r/b)^2) + floor
    double floor = 0.1; // keeps the trace at r=b strictly positive
};
struct TableProfile {
    std::vector<double> r; // ascending, spanning [0,b]
    std::vector<double> v;
};
using InitialProfile = std::variant<ConstantProfile, BumpProfile, TableProfile>;

inline double u0_eval(const InitialProfile& prof, double r, double b) {
    if (const auto* c = std::get_if<ConstantProfile>(&prof)) return c->value;
    if (const auto* p = std::get_if<BumpProfile>(&prof)) {
        const double s = r / b;
        return p->peak * (1.0 - s * s) + p->floor;
    }
    const auto& tab = std::get<TableProfile>(prof);
    return detail::interp_table(tab.r, tab.v, r);
}

struct Params {
    int n = 3;                    // spatial dimension, integer >= 2
    double b = 0.5;               // initial boundary radius, 0 < b < 1
    KLaw k_law = LinearK{1.0};
    InitialProfile u0 = ConstantProfile{24.0};

    int grid_n = 256;             // cells on y in [0,1], >= 16
    double dt = 0.0;              // <= 0 means Auto; validate() resolves it
    double t_end = 0.05;
    double tol_mass = 1e-6;
    double tol_elliptic = 5e-2;   // compatibility-defect scale for the elliptic guard
    double tol_picard = 1e-8;
    double eps_collapse = 1e-3;
    double eps_fill = 1e-3;
    bool renormalize_mass = false;
    int elliptic_subiters = 1;    // elliptic re-solves per parabolic step

    double dy() const { return 1.0 / grid_n; }
};

// M = integral on [0,b] of r^{n-1} u0(r) dr (per-solid-angle mass). The
// source constant of the signal equation is c = n*M.
inline double initial_mass(const Params& p, int panels = 4096) {
    auto f = [&](double r) { return std::pow(r, p.n - 1) * u0_eval(p.u0, r, p.b); };
    return detail::simpson(f, 0.0, p.b, panels);
}

// Full validation; resolves Auto dt to a concrete value. Returns the cleaned
// parameter set, throws one of the Rejects* errors otherwise.
inline Params validate(const Params& raw) {
    Params p = raw;
    if (p.n < 2) throw RejectsDimension();
    if (!(p.b > 0.0 && p.b < 1.0)) throw RejectsRadius();
    if (p.grid_n < 16) throw ParamError("grid_n must be at least 16");
    if (!(p.t_end > 0.0)) throw ParamError("t_end must be positive");
    if (!(p.tol_mass > 0.0 && p.tol_elliptic > 0.0 && p.tol_picard > 0.0))
        throw ParamError("tolerances must be positive");
    if (!(p.eps_collapse > 0.0 && p.eps_collapse < 0.5) || !(p.eps_fill > 0.0 && p.eps_fill < 0.5))
        throw ParamError("event thresholds must lie in (0, 0.5)");
    if (p.elliptic_subiters < 1) throw ParamError("elliptic_subiters must be >= 1");

    // Initial profile must be strictly positive; spot-check on a fine grid
    // (kinks of the table variant land on sample points for any sane table).
    for (int i = 0; i <= 2048; ++i) {
        const double r = p.b * i / 2048.0;
        if (!(u0_eval(p.u0, r, p.b) > 0.0)) throw RejectsNonPositiveProfile();
    }
    if (const auto* tab = std::get_if<TableProfile>(&p.u0)) {
        if (tab->r.size() != tab->v.size() || tab->r.size() < 2 || !std::is_sorted(tab->r.begin(), tab->r.end()))
            throw ParamError("u0 table needs >= 2 ascending samples");
    }

    if (const auto* lin = std::get_if<LinearK>(&p.k_law)) {
        if (lin->a < 0.0) throw ParamError("linear k rate must be nonnegative");
    } else {
        const auto& tab = std::get<TabulatedK>(p.k_law);
        if (tab.r.size() != tab.v.size() || tab.r.size() < 2 || !std::is_sorted(tab.r.begin(), tab.r.end()))
            throw ParamError("k table needs >= 2 ascending samples");
        const double slack = 1.0 + 1e-9;
        for (std::size_t i = 0; i < tab.v.size(); ++i) {
            if (tab.v[i] < 0.0) throw ParamError("k table values must be nonnegative");
            if (std::abs(tab.v[i]) > tab.bound * slack + 1e-300) throw RejectsLipschitz("tabulated k exceeds its declared bound");
            if (i > 0) {
                const double slope = std::abs(tab.v[i] - tab.v[i - 1]) / (tab.r[i] - tab.r[i - 1]);
                if (slope > tab.lipschitz * slack + 1e-300) throw RejectsLipschitz();
            }
        }
    }

    if (!(p.dt > 0.0)) {
        // Auto dt: advective CFL estimate at t=0. The boundary-gradient scale
        // is |vr| <= M*(b + b^{1-n}) (exact at r=h, h=b), transport speeds in
        // the front-fixed frame divide by h ~ b. The 2e-5 cap keeps the
        // elliptic/ODE splitting error at event-time-tolerance level; the
        // driver still enforces the live CFL bound every step.
        const double M = initial_mass(p);
        const double w = (k_eval(p.k_law, p.b, 0.0) + M * (p.b + std::pow(p.b, 1.0 - p.n))) / p.b;
        p.dt = std::min({0.45 * p.dy() / std::max(w, 1e-12), 2e-5, p.t_end / 200.0});
    }
    return p;
}

} // namespace fbchemo
