#pragma once

// Solver state value types: cell density on the front-fixed grid, signal on
// the fixed unit-ball grid, sampled boundary trajectories, per-step records.

#include <vector>

#include "params.hpp"

namespace fbchemo {

// Cell density in front-fixed coordinates: u[j] at y_j = j*dy on [0,1], the
// moving domain being r = h*y.
struct UState {
    double h = 0.0;
    double t = 0.0;
    std::vector<double> u;

    int n_cells() const { return static_cast<int>(u.size()) - 1; }
    double dy() const { return 1.0 / n_cells(); }
};

inline UState initial_state(const Params& p) {
    UState s;
    s.h = p.b;
    s.t = 0.0;
    s.u.resize(p.grid_n + 1);
    for (int j = 0; j <= p.grid_n; ++j) s.u[j] = u0_eval(p.u0, p.b * j / p.grid_n, p.b);
    return s;
}

// Signal concentration on the fixed radial grid r_i = i*dr of the unit ball,
// zero-mean normalized, with its radial derivative.
struct VState {
    std::vector<double> v;
    std::vector<double> vr;

    double dr() const { return 1.0 / (static_cast<int>(v.size()) - 1); }
};

// Time-sampled boundary trajectory with its declared Lipschitz bound.
struct BoundaryCurve {
    std::vector<double> times;
    std::vector<double> values;
    double m0 = 0.0;
};

// One diagnostics row per accepted step.
struct RunRecord {
    double t = 0.0;
    double h = 0.0;
    double mass = 0.0;
    double u_max = 0.0;
    double vr_h = 0.0;
    double elliptic_residual = 0.0; // pre-correction compatibility defect, relative
    double mass_drift = 0.0;        // |mass - mass(0)| / mass(0)
};

} // namespace fbchemo
