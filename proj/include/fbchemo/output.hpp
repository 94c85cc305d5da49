#pragma once

// Deterministic file outputs: fixed 17-significant-digit float formatting, no
// wall-clock values in data files (timestamps go to the run.log sidecar only).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "analytic.hpp"
#include "config.hpp"
#include "convergence.hpp"
#include "diagnostics.hpp"
#include "driver.hpp"
#include "params.hpp"
#include "state.hpp"

namespace fbchemo {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_series_csv(const std::filesystem::path& path, const std::vector<RunRecord>& recs) {
    std::ofstream f(path);
    f << "t,h,mass,u_max,vr_h,elliptic_residual,mass_drift\n";
    for (const auto& r : recs)
        f << fmt17(r.t) << ',' << fmt17(r.h) << ',' << fmt17(r.mass) << ',' << fmt17(r.u_max) << ','
          << fmt17(r.vr_h) << ',' << fmt17(r.elliptic_residual) << ',' << fmt17(r.mass_drift) << '\n';
}

// simulated vs closed-form radius; only meaningful under the linear law
inline void write_overlay_csv(const std::filesystem::path& path, const std::vector<RunRecord>& recs,
                              double a, double b, int n, double M) {
    std::ofstream f(path);
    f << "t,h_sim,h_exact\n";
    for (const auto& r : recs) {
        double he;
        try {
            he = h_exact(r.t, a, b, n, M);
        } catch (const PastCollapse&) {
            he = 0.0;
        }
        f << fmt17(r.t) << ',' << fmt17(r.h) << ',' << fmt17(he) << '\n';
    }
}

inline void write_profile_csv(const std::filesystem::path& path, double t, const UState& s) {
    std::ofstream f(path);
    f << "t,y,r,u\n";
    const double dy = s.dy();
    for (std::size_t j = 0; j < s.u.size(); ++j) {
        const double y = static_cast<double>(j) * dy;
        f << fmt17(t) << ',' << fmt17(y) << ',' << fmt17(s.h * y) << ',' << fmt17(s.u[j]) << '\n';
    }
}

struct SummaryInfo {
    Params params;
    std::optional<Regime> regime;        // empty for tabulated absorption
    std::optional<double> critical_mass; // likewise
    EventKind event = EventKind::None;
    std::optional<double> event_time;
    std::optional<double> oracle_event_time;
    double max_mass_drift = 0.0;
    int picard_iterations = 0;
    std::vector<double> contraction_factors;
};

inline nlohmann::ordered_json summary_to_json(const SummaryInfo& s) {
    nlohmann::ordered_json j;
    j["params"] = params_to_json(s.params);
    j["regime"] = s.regime ? nlohmann::ordered_json(regime_name(*s.regime)) : nlohmann::ordered_json(nullptr);
    j["critical_mass"] = s.critical_mass ? nlohmann::ordered_json(*s.critical_mass) : nlohmann::ordered_json(nullptr);
    j["event"] = event_name(s.event);
    j["event_time"] = s.event_time ? nlohmann::ordered_json(*s.event_time) : nlohmann::ordered_json(nullptr);
    j["oracle_event_time"] =
        s.oracle_event_time ? nlohmann::ordered_json(*s.oracle_event_time) : nlohmann::ordered_json(nullptr);
    j["max_mass_drift"] = s.max_mass_drift;
    j["picard_iterations"] = s.picard_iterations;
    j["contraction_factors"] = s.contraction_factors;
    return j;
}

inline void write_summary_json(const std::filesystem::path& path, const SummaryInfo& s) {
    std::ofstream f(path);
    f << summary_to_json(s).dump(2) << '\n';
}

inline void write_error_json(const std::filesystem::path& path, const std::string& message,
                             const Params* params = nullptr) {
    nlohmann::ordered_json j;
    if (params) j["params"] = params_to_json(*params);
    j["error"] = message;
    std::ofstream f(path);
    f << j.dump(2) << '\n';
}

struct SweepRow {
    int n = 0;
    double a = 0.0, b = 0.0, M = 0.0;
    std::optional<double> critical_mass;
    std::optional<Regime> regime;
    EventKind event = EventKind::None;
    std::optional<double> event_time;
    std::optional<double> oracle_event_time;
};

inline void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    std::ofstream f(path);
    f << "n,a,b,M,critical_mass,regime,event,event_time,oracle_event_time\n";
    for (const auto& r : rows) {
        f << r.n << ',' << fmt17(r.a) << ',' << fmt17(r.b) << ',' << fmt17(r.M) << ','
          << (r.critical_mass ? fmt17(*r.critical_mass) : "") << ','
          << (r.regime ? regime_name(*r.regime) : "") << ',' << event_name(r.event) << ','
          << (r.event_time ? fmt17(*r.event_time) : "") << ','
          << (r.oracle_event_time ? fmt17(*r.oracle_event_time) : "") << '\n';
    }
}

inline void write_converge_csv(const std::filesystem::path& path, const ConvergenceTable& table) {
    std::ofstream f(path);
    f << "level,grid_n,dt,final_h,err_h,max_mass_drift,max_vr_defect,order_h,order_vr\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        f << i << ',' << r.grid_n << ',' << fmt17(r.dt) << ',' << fmt17(r.final_h) << ','
          << fmt17(r.err_h) << ',' << fmt17(r.max_drift) << ',' << fmt17(r.max_vr_defect) << ','
          << (i > 0 ? fmt17(table.order_h[i - 1]) : "") << ','
          << (i > 0 ? fmt17(table.order_vr[i - 1]) : "") << '\n';
    }
}

} // namespace fbchemo
