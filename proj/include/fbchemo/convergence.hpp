#pragma once

// Grid/step refinement study against the closed-form radius of the
// constant-density regime. Each level doubles grid_n and halves dt; errors are
// measured at the final recorded time and the boundary-gradient defect is
// normalized by 1 + |M h^{1-n}| so shrinking runs do not drown the metric.

#include <cmath>
#include <vector>

#include "analytic.hpp"
#include "driver.hpp"
#include "errors.hpp"
#include "params.hpp"

namespace fbchemo {

enum class StudyMode { Coupled, Ode };

struct ConvergenceRow {
    int grid_n = 0;
    double dt = 0.0;
    double final_h = 0.0;
    double err_h = 0.0;
    double max_drift = 0.0;
    double max_vr_defect = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::vector<double> order_h;  // log2(err_l / err_{l+1})
    std::vector<double> order_vr; // same for the gradient defect
};

inline ConvergenceTable convergence_study(const Params& p, int levels, StudyMode mode = StudyMode::Coupled) {
    const auto* lin = std::get_if<LinearK>(&p.k_law);
    if (!lin) throw ConfigError("refinement study requires the linear absorption law");
    if (levels < 1) throw ParamError("refinement study needs at least one level");
    const double M = initial_mass(p);

    ConvergenceTable table;
    for (int l = 0; l < levels; ++l) {
        Params q = p;
        q.grid_n = p.grid_n << l;
        q.dt = p.dt / static_cast<double>(1 << l);
        const RunResult res = (mode == StudyMode::Coupled) ? run_simulate(q) : run_ode(q);

        ConvergenceRow row;
        row.grid_n = q.grid_n;
        row.dt = q.dt;
        row.final_h = res.records.back().h;
        const double t_fin = res.records.back().t;
        row.err_h = std::abs(row.final_h - h_exact(t_fin, lin->a, p.b, p.n, M));
        for (const auto& r : res.records) {
            row.max_drift = std::max(row.max_drift, r.mass_drift);
            const double ref = M * r.h - M * std::pow(r.h, 1 - p.n);
            row.max_vr_defect = std::max(row.max_vr_defect, std::abs(r.vr_h - ref) / (1.0 + std::abs(M * std::pow(r.h, 1 - p.n))));
        }
        table.rows.push_back(row);
    }
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
        const auto& c = table.rows[i];
        const auto& f = table.rows[i + 1];
        table.order_h.push_back((c.err_h > 0.0 && f.err_h > 0.0) ? std::log2(c.err_h / f.err_h) : 0.0);
        table.order_vr.push_back((c.max_vr_defect > 0.0 && f.max_vr_defect > 0.0)
                                     ? std::log2(c.max_vr_defect / f.max_vr_defect)
                                     : 0.0);
    }
    return table;
}

} // namespace fbchemo
