// Acceptance gate: one pass/fail line per criterion, exit code = failures.
// Reference trajectories and event times are frozen here in closed form,
// independent of the library's own analytic module.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fbchemo/fbchemo.hpp>

using namespace fbchemo;
namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

namespace {

// collapse time of the n=3, a=1, b=1/2, M=1 configuration: (1/6) ln(4/3)
constexpr double kCollapseTime = 0.047947012075296821;
// fill time of the n=2, a=1, b=4/5, M=1/2 configuration: (1/3) ln(1/0.46)
constexpr double kFillTime = 0.258842929832998789;

// boundary radius of the shrinking configuration: [-0.375 e^{6t} + 0.5]^{1/3}
double shrink3_h(double t) {
    const double bracket = -0.375 * std::exp(6.0 * t) + 0.5;
    return bracket > 0.0 ? std::cbrt(bracket) : 0.0;
}

// squared boundary radius of the growing configuration, capped at the fill
double grow2_h(double t) {
    if (t >= kFillTime) return 1.0;
    const double bracket = (0.64 - 1.0 / 3.0) * std::exp(3.0 * t) + 1.0 / 3.0;
    return std::sqrt(bracket);
}

Params make(int n, double b, double u0c, int grid, double t_end, double dt) {
    Params p;
    p.n = n;
    p.b = b;
    p.k_law = LinearK{1.0};
    p.u0 = ConstantProfile{u0c};
    p.grid_n = grid;
    p.t_end = t_end;
    p.dt = dt;
    return validate(p);
}

struct Check {
    int fails = 0;

    void run(int idx, const std::string& what, const std::function<std::string()>& body) {
        const auto t0 = clk::now();
        std::string detail;
        bool ok = true;
        try {
            detail = body();
            if (!detail.empty() && detail[0] == '!') {
                ok = false;
                detail = detail.substr(1);
            }
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(clk::now() - t0).count();
        std::printf("[%s] %d %s (%s; %.2fs)\n", ok ? "PASS" : "FAIL", idx, what.c_str(), detail.c_str(), secs);
        std::fflush(stdout);
        if (!ok) ++fails;
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// manufactured elliptic problem: v*(r) = cos(pi r), s* = v*'' + (n-1) v*'/r
SourceField star_source(int N, int n) {
    const double pi = 3.14159265358979323846;
    SourceField src;
    src.s.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        const double r = static_cast<double>(i) / N;
        src.s[i] = (i == 0) ? -static_cast<double>(n) * pi * pi
                            : -pi * pi * std::cos(pi * r) - (n - 1) * pi * std::sin(pi * r) / r;
    }
    return src;
}

double star_err(int N, int n, bool fd) {
    const double pi = 3.14159265358979323846;
    Params p;
    p.n = n;
    p.grid_n = N;
    const VState vs = fd ? solve_v_fd(star_source(N, n), p) : solve_v(star_source(N, n), p);
    const double dr = 1.0 / N;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double w = ((i == 0 || i == N) ? 0.5 * dr : dr) * std::pow(i * dr, n - 1);
        num += w * std::cos(pi * i * dr);
        den += w;
    }
    const double mean = num / den;
    double err = 0.0;
    for (int i = 0; i <= N; ++i)
        err = std::max(err, std::abs(vs.v[i] - (std::cos(pi * i * dr) - mean)));
    return err;
}

double star_gap(int N, int n) {
    Params p;
    p.n = n;
    p.grid_n = N;
    const VState a = solve_v(star_source(N, n), p);
    const VState b = solve_v_fd(star_source(N, n), p);
    double gap = 0.0;
    for (int i = 0; i <= N; ++i) gap = std::max(gap, std::abs(a.v[i] - b.v[i]));
    return gap;
}

SummaryInfo summarize(const Params& p, const RunResult& res) {
    SummaryInfo info;
    info.params = p;
    const auto* lin = std::get_if<LinearK>(&p.k_law);
    if (lin) {
        const double M = initial_mass(p);
        const Regime reg = classify(lin->a, p.b, p.n, M);
        info.regime = reg;
        info.critical_mass = critical_mass(lin->a, p.b, p.n);
        info.oracle_event_time = regime_event_time(reg);
    }
    info.event = res.event;
    info.event_time = res.event_time;
    info.max_mass_drift = res.max_mass_drift;
    return info;
}

} // namespace

int main() {
    const auto suite_start = clk::now();
    Check chk;

    std::optional<Params> sim_params;
    std::optional<RunResult> sim_result; // canonical coupled collapse run, reused below
    std::optional<PicardResult> picard_result;
    Params picard_params;

    chk.run(1, "closed-form shrinking trajectory, ode mode", [&] {
        const auto t0 = clk::now();
        const Params p = make(3, 0.5, 24.0, 64, 0.045, 1e-4);
        const RunResult res = run_ode(p);
        double worst = 0.0;
        for (const auto& r : res.records) worst = std::max(worst, std::abs(r.h - shrink3_h(r.t)));
        const double secs = std::chrono::duration<double>(clk::now() - t0).count();
        if (worst > 1e-8) return fmt("!max err %.3e > 1e-8", worst);
        if (secs >= 1.0) return fmt("!runtime %.2fs >= 1s", secs);
        return fmt("max err %.3e over %.0f records", worst, static_cast<double>(res.records.size()));
    });

    chk.run(2, "collapse time, ode and coupled modes", [&] {
        const auto t0 = clk::now();
        const Params po = make(3, 0.5, 24.0, 64, 0.06, 1e-4);
        const RunResult ro = run_ode(po);
        const double eo = std::abs(ro.event_time.value_or(-1.0) - kCollapseTime);
        if (ro.event != EventKind::Collapse || eo > 1e-6)
            return fmt("!ode err %.3e > 1e-6", eo);

        Params ps = make(3, 0.5, 24.0, 256, 0.06, 0.0);
        RunResult rs = run_simulate(ps, {0.01, 0.02, 0.04});
        const double es = std::abs(rs.event_time.value_or(-1.0) - kCollapseTime);
        const double secs = std::chrono::duration<double>(clk::now() - t0).count();
        const bool ok = rs.event == EventKind::Collapse && es <= 5e-3 && secs < 60.0;
        sim_params = ps;
        sim_result = std::move(rs);
        if (!ok) return fmt("!coupled err %.3e (tol 5e-3), runtime %.1fs (< 60s)", es, secs);
        return fmt("ode err %.3e, coupled err %.3e at grid 256", eo, es);
    });

    chk.run(3, "fill time, ode and coupled modes", [&] {
        const Params po = make(2, 0.8, 1.5625, 64, 0.30, 1e-4);
        const RunResult ro = run_ode(po);
        const double eo = std::abs(ro.event_time.value_or(-1.0) - kFillTime);
        if (ro.event != EventKind::Fill || eo > 1e-6) return fmt("!ode err %.3e > 1e-6", eo);

        const Params ps = make(2, 0.8, 1.5625, 256, 0.30, 0.0);
        const RunResult rs = run_simulate(ps);
        const double es = std::abs(rs.event_time.value_or(-1.0) - kFillTime);
        if (rs.event != EventKind::Fill || es > 5e-3) return fmt("!coupled err %.3e > 5e-3", es);
        return fmt("ode err %.3e, coupled err %.3e", eo, es);
    });

    chk.run(4, "stationary balance holds in both modes", [&] {
        const Params po = make(2, 0.5, 8.0 / 3.0, 64, 0.1, 1e-4);
        const RunResult ro = run_ode(po);
        double wo = 0.0;
        for (const auto& r : ro.records) wo = std::max(wo, std::abs(r.h - 0.5));
        if (wo > 1e-10) return fmt("!ode max|h-b| %.3e > 1e-10", wo);

        const Params ps = make(2, 0.5, 8.0 / 3.0, 256, 0.1, 0.0);
        const RunResult rs = run_simulate(ps);
        double ws = 0.0;
        for (const auto& r : rs.records) ws = std::max(ws, std::abs(r.h - 0.5));
        if (ws > 1e-3) return fmt("!coupled max|h-b| %.3e > 1e-3", ws);
        return fmt("ode %.3e, coupled %.3e", wo, ws);
    });

    chk.run(5, "mass conservation, raw and renormalized", [&] {
        if (!sim_result) return std::string("!no coupled collapse run available");
        const double raw = sim_result->max_mass_drift;
        if (raw > 1e-3) return fmt("!raw drift %.3e > 1e-3", raw);

        Params p = *sim_params;
        p.renormalize_mass = true;
        const RunResult rn = run_simulate(p);
        if (rn.max_mass_drift > 1e-12) return fmt("!renormalized drift %.3e > 1e-12", rn.max_mass_drift);
        return fmt("raw %.3e, renormalized %.3e", raw, rn.max_mass_drift);
    });

    chk.run(6, "boundary gradient accuracy and refinement order", [&] {
        if (!sim_result) return std::string("!no coupled collapse run available");
        const double M = initial_mass(*sim_params);
        double worst = 0.0;
        for (const auto& r : sim_result->records) {
            const double ref = M * r.h - M * std::pow(r.h, 1 - sim_params->n);
            const double d = std::abs(r.vr_h - ref) / (1.0 + std::abs(M * std::pow(r.h, 1 - sim_params->n)));
            worst = std::max(worst, d);
        }
        if (worst > 5e-2) return fmt("!worst weighted defect %.3e > 5e-2", worst);

        const Params p = make(3, 0.5, 24.0, 128, 0.04, 4e-5);
        const ConvergenceTable tab = convergence_study(p, 3, StudyMode::Coupled);
        double omin = 1e300;
        for (double o : tab.order_vr) omin = std::min(omin, o);
        if (omin < 0.9) return fmt("!observed gradient order %.2f < 0.9", omin);
        return fmt("worst defect %.3e, refinement orders >= %.2f", worst, omin);
    });

    chk.run(7, "elliptic manufactured-solution order, both solvers", [&] {
        double omin = 1e300, gmin = 1e300;
        for (int n : {2, 3}) {
            for (bool fd : {false, true}) {
                const double e0 = star_err(64, n, fd), e1 = star_err(128, n, fd), e2 = star_err(256, n, fd);
                omin = std::min({omin, std::log2(e0 / e1), std::log2(e1 / e2)});
            }
            const double g0 = star_gap(64, n), g1 = star_gap(128, n), g2 = star_gap(256, n);
            gmin = std::min({gmin, g0 / g1, g1 / g2});
        }
        if (omin < 1.9) return fmt("!observed order %.2f < 1.9", omin);
        if (gmin < 2.5) return fmt("!solver-agreement ratio %.2f per halving < 2.5", gmin);
        return fmt("orders >= %.2f, solver gap shrinks >= %.2fx per halving", omin, gmin);
    });

    chk.run(8, "contraction of the boundary fixed-point iteration", [&] {
        picard_params = make(3, 0.5, 24.0, 256, 0.05, 0.0);
        const double horizon = 0.02;
        const double m0 = 0.49 * 0.5 / horizon;
        PicardResult pr = picard_solve(picard_params, horizon, m0);
        double sup = 0.0;
        for (std::size_t i = 0; i < pr.curve.times.size(); ++i)
            sup = std::max(sup, std::abs(pr.curve.values[i] - shrink3_h(pr.curve.times[i])));
        double fmax = 0.0;
        for (double f : pr.contraction) fmax = std::max(fmax, f);
        const int iters = pr.iterations;
        const bool ok = iters <= 50 && sup <= 1e-3 && !pr.contraction.empty() && fmax < 1.0;
        picard_result = std::move(pr);
        if (!ok) return fmt("!iters %.0f, sup %.3e, max factor %.3f", static_cast<double>(iters), sup, fmax);
        return fmt("%.0f iterations, sup distance %.3e, factors <= %.3f", static_cast<double>(iters), sup, fmax);
    });

    chk.run(9, "invariant suite", [&] {
        if (!sim_result || !picard_result) return std::string("!upstream runs unavailable");

        // positivity floor on every stored profile
        auto floor_ok = [&](const UState& s) {
            double lo = s.u[0], hi = s.u[0];
            for (double v : s.u) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            return lo >= -sim_params->tol_mass * std::max(hi, 0.0);
        };
        for (const auto& [t, s] : sim_result->snapshots)
            if (!floor_ok(s)) return fmt("!negative density in snapshot at t=%.4f", t);
        if (!floor_ok(sim_result->final_state)) return std::string("!negative density in final state");

        // signal gauge: zero ball mean, symmetric origin, Neumann closure
        {
            const Params p = make(3, 0.5, 24.0, 256, 0.05, 0.0);
            const EllipticSolve es = solve_signal(initial_state(p), p);
            const int N = static_cast<int>(es.v.v.size()) - 1;
            const double dr = 1.0 / N;
            double num = 0.0, den = 0.0, scale = 0.0;
            for (int i = 0; i <= N; ++i) {
                const double w = ((i == 0 || i == N) ? 0.5 * dr : dr) * std::pow(i * dr, p.n - 1);
                num += w * es.v.v[i];
                den += w;
                scale = std::max(scale, std::abs(es.v.v[i]));
            }
            if (std::abs(num / den) > 1e-10 * std::max(scale, 1.0)) return std::string("!signal mean off gauge");
            if (es.v.vr[0] != 0.0) return std::string("!vr(0) != 0");
            if (std::abs(es.v.vr[N]) > p.tol_elliptic) return std::string("!outer Neumann closure violated");
        }

        // admissible-set membership of produced boundary curves
        {
            const BReport rep = check_in_B(picard_result->curve, picard_params, 0.02);
            if (!rep.pass) return std::string("!fixed-point curve left the admissible set");
            for (const RunResult* rr : {&*sim_result}) {
                if (rr->curve.values.empty() || rr->curve.values.front() != sim_params->b)
                    return std::string("!run curve does not start at b");
                double q = 0.0;
                for (std::size_t i = 1; i < rr->curve.times.size(); ++i) {
                    const double dt = rr->curve.times[i] - rr->curve.times[i - 1];
                    if (dt > 0.0)
                        q = std::max(q, std::abs(rr->curve.values[i] - rr->curve.values[i - 1]) / dt);
                }
                if (q > rr->curve.m0 * (1.0 + 1e-12))
                    return std::string("!run curve exceeds its declared quotient bound");
            }
        }

        // the closed form and its n-th power solve the same linear bracket
        {
            for (int i = 0; i <= 40; ++i) {
                const double t = 0.045 * i / 40.0;
                const double s = -0.375 * std::exp(6.0 * t) + 0.5;
                if (std::abs(std::pow(h_exact(t, 1.0, 0.5, 3, 1.0), 3) - s) > 1e-10)
                    return std::string("!shrinking bracket equivalence broken");
            }
            for (int i = 0; i <= 40; ++i) {
                const double t = 0.25 * i / 40.0;
                const double s = (0.64 - 1.0 / 3.0) * std::exp(3.0 * t) + 1.0 / 3.0;
                if (std::abs(std::pow(h_exact(t, 1.0, 0.8, 2, 0.5), 2) - s) > 1e-10)
                    return std::string("!growing bracket equivalence broken");
            }
        }

        // determinism: identical runs produce byte-identical artifacts
        {
            const Params p = make(3, 0.5, 24.0, 96, 0.02, 0.0);
            const RunResult r1 = run_simulate(p);
            const RunResult r2 = run_simulate(p);
            const fs::path dir = fs::temp_directory_path() / "fbchemo_accept";
            fs::create_directories(dir);
            write_series_csv(dir / "a.csv", r1.records);
            write_series_csv(dir / "b.csv", r2.records);
            write_summary_json(dir / "a.json", summarize(p, r1));
            write_summary_json(dir / "b.json", summarize(p, r2));
            if (slurp(dir / "a.csv") != slurp(dir / "b.csv")) return std::string("!series output not deterministic");
            if (slurp(dir / "a.json") != slurp(dir / "b.json")) return std::string("!summary output not deterministic");
        }

        const double total = std::chrono::duration<double>(clk::now() - suite_start).count();
        if (total > 300.0) return fmt("!suite runtime %.1fs > 300s", total);
        return fmt("positivity, gauge, admissible set, bracket, determinism; %.1fs total", total);
    });

    std::printf("%d of 9 criteria passed\n", 9 - chk.fails);
    return chk.fails;
}
