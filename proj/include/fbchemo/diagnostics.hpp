#pragma once

// Run-level audits: discrete mass on the moving grid and collapse/fill
// threshold detection. (The convergence study lives in convergence.hpp since
// it re-runs whole simulations.)

#include <cmath>
#include <variant>

#include "params.hpp"
#include "state.hpp"

namespace fbchemo {

// m = h^n * sum_j w_j y_j^{n-1} u_j, the trapezoid discretization of
// int_0^h r^{n-1} u dr under r = h*y.
inline double total_mass(const UState& state, const Params& p) {
    const int N = state.n_cells();
    const double dy = state.dy();
    double s = 0.0;
    for (int j = 1; j <= N; ++j) { // y_0^{n-1} = 0 drops node 0
        const double w = detail::trap_weight(j, N, dy);
        s += w * std::pow(j * dy, p.n - 1) * state.u[j];
    }
    return std::pow(state.h, p.n) * s;
}

enum class EventKind { None, Collapse, Fill };

inline const char* event_name(EventKind e) {
    switch (e) {
        case EventKind::Collapse: return "Collapse";
        case EventKind::Fill: return "Fill";
        default: return "None";
    }
}

inline EventKind detect_event(const UState& state, const Params& p) {
    if (state.h <= p.eps_collapse) return EventKind::Collapse;
    if (state.h >= 1.0 - p.eps_fill) return EventKind::Fill;
    return EventKind::None;
}

} // namespace fbchemo
