// Command-line driver: single runs (coupled, boundary-only, closed-form),
// Picard mode, Cartesian parameter sweeps, and refinement studies. All data
// files are deterministic; wall-clock timing goes to run.log only.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fbchemo/fbchemo.hpp>

namespace fs = std::filesystem;
using namespace fbchemo;

namespace {

struct CliOptions {
    std::string config_path;
    std::string mode = "simulate";
    std::string out_dir = "out";
    int grid = 0;          // 0: keep config
    std::string dt;        // empty: keep config; "auto" or number
    bool renormalize = false;
    std::string snapshots; // comma list
};

std::string now_string() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::tm tm{};
    localtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S", &tm);
    return buf;
}

void apply_overrides(ConfigData& cfg, const CliOptions& opt) {
    if (opt.grid > 0) cfg.grid_n = opt.grid;
    if (!opt.dt.empty())
        cfg.dt = (opt.dt == "auto") ? 0.0 : detail_config::to_double(opt.dt, "dt");
    if (opt.renormalize) cfg.renormalize_mass = true;
    if (!opt.snapshots.empty())
        cfg.snapshots = detail_config::to_double_list(opt.snapshots, "snapshots");
}

std::optional<double> oracle_time_for(const Params& p, double& mass_out, std::optional<Regime>& regime_out,
                                      std::optional<double>& mc_out) {
    mass_out = initial_mass(p);
    if (const auto* lin = std::get_if<LinearK>(&p.k_law)) {
        const Regime reg = classify(lin->a, p.b, p.n, mass_out);
        regime_out = reg;
        mc_out = critical_mass(lin->a, p.b, p.n);
        return regime_event_time(reg);
    }
    regime_out.reset();
    mc_out.reset();
    return std::nullopt;
}

int sweep_thread_cap() {
    if (const char* env = std::getenv("FBCHEMO_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return v;
        } catch (...) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void run_single(const CliOptions& opt, const ConfigData& cfg, std::ofstream& log) {
    const Params p = single_params(cfg);
    SummaryInfo info;
    info.params = p;
    double M = 0.0;
    info.oracle_event_time = oracle_time_for(p, M, info.regime, info.critical_mass);

    RunResult res;
    if (opt.mode == "simulate") res = run_simulate(p, cfg.snapshots);
    else if (opt.mode == "ode") res = run_ode(p);
    else res = run_oracle(p);

    info.event = res.event;
    info.event_time = res.event_time;
    info.max_mass_drift = res.max_mass_drift;

    const fs::path out(opt.out_dir);
    write_series_csv(out / "series.csv", res.records);
    write_summary_json(out / "summary.json", info);
    if (const auto* lin = std::get_if<LinearK>(&p.k_law))
        write_overlay_csv(out / "h_overlay.csv", res.records, lin->a, p.b, p.n, M);
    for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "profile_%03zu.csv", i);
        write_profile_csv(out / name, res.snapshots[i].first, res.snapshots[i].second);
    }
    log << "steps=" << res.total_steps << " event=" << event_name(res.event);
    if (res.event_time) log << " event_time=" << fmt17(*res.event_time);
    log << "\n";
}

void run_picard(const CliOptions& opt, const ConfigData& cfg, std::ofstream& log) {
    const Params p = single_params(cfg);
    const double horizon = p.t_end;
    const double m0 = 0.49 * std::min(p.b, 1.0 - p.b) / horizon;
    const PicardResult pr = picard_solve(p, horizon, m0);

    SummaryInfo info;
    info.params = p;
    double M = 0.0;
    info.oracle_event_time = oracle_time_for(p, M, info.regime, info.critical_mass);
    info.picard_iterations = pr.iterations;
    info.contraction_factors = pr.contraction;

    std::vector<RunRecord> recs;
    recs.reserve(pr.curve.times.size());
    for (std::size_t i = 0; i < pr.curve.times.size(); ++i)
        recs.push_back({pr.curve.times[i], pr.curve.values[i], M, 0.0, 0.0, 0.0, 0.0});

    const fs::path out(opt.out_dir);
    write_series_csv(out / "series.csv", recs);
    write_summary_json(out / "summary.json", info);
    if (const auto* lin = std::get_if<LinearK>(&p.k_law))
        write_overlay_csv(out / "h_overlay.csv", recs, lin->a, p.b, p.n, M);
    log << "picard iterations=" << pr.iterations << "\n";
}

void run_sweep(const CliOptions& opt, const ConfigData& cfg, std::ofstream& log) {
    const std::vector<SweepPoint> pts = sweep_points(cfg);
    const int cap = sweep_thread_cap();
    std::vector<SweepRow> rows(pts.size());
    std::vector<SummaryInfo> infos(pts.size());
    std::vector<std::vector<RunRecord>> series(pts.size());

    auto work = [&](std::size_t i) {
        const Params& p = pts[i].params;
        SummaryInfo info;
        info.params = p;
        double M = 0.0;
        info.oracle_event_time = oracle_time_for(p, M, info.regime, info.critical_mass);
        const RunResult res = run_simulate(p);
        info.event = res.event;
        info.event_time = res.event_time;
        info.max_mass_drift = res.max_mass_drift;
        infos[i] = info;
        series[i] = res.records;
        rows[i] = {p.n,
                   pts[i].a,
                   p.b,
                   M,
                   info.critical_mass,
                   info.regime,
                   res.event,
                   res.event_time,
                   info.oracle_event_time};
    };

    std::size_t next = 0;
    while (next < pts.size()) {
        std::vector<std::future<void>> batch;
        for (int c = 0; c < cap && next < pts.size(); ++c, ++next)
            batch.push_back(std::async(std::launch::async, work, next));
        for (auto& f : batch) f.get();
    }

    const fs::path out(opt.out_dir);
    write_sweep_csv(out / "sweep.csv", rows);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "point_%03zu", i);
        const fs::path pdir = out / name;
        fs::create_directories(pdir);
        write_series_csv(pdir / "series.csv", series[i]);
        write_summary_json(pdir / "summary.json", infos[i]);
    }
    log << "sweep points=" << pts.size() << "\n";
}

void run_converge(const CliOptions& opt, const ConfigData& cfg, std::ofstream& log) {
    const Params p = single_params(cfg);
    const ConvergenceTable table = convergence_study(p, 3, StudyMode::Coupled);
    const fs::path out(opt.out_dir);
    write_converge_csv(out / "converge.csv", table);

    SummaryInfo info;
    info.params = p;
    double M = 0.0;
    info.oracle_event_time = oracle_time_for(p, M, info.regime, info.critical_mass);
    for (const auto& r : table.rows) info.max_mass_drift = std::max(info.max_mass_drift, r.max_drift);
    write_summary_json(out / "summary.json", info);
    log << "converge levels=" << table.rows.size() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CliOptions opt;
    CLI::App app{"radially symmetric free-boundary chemotaxis simulator"};
    app.add_option("--config", opt.config_path, "config file (sectioned text or JSON)")->required();
    app.add_option("--mode", opt.mode, "simulate|ode|picard|oracle|sweep|converge")
        ->check(CLI::IsMember({"simulate", "ode", "picard", "oracle", "sweep", "converge"}));
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--grid", opt.grid, "override grid_n");
    app.add_option("--dt", opt.dt, "override dt (number or 'auto')");
    app.add_flag("--renormalize-mass", opt.renormalize, "rescale density to the initial mass each step");
    app.add_option("--snapshots", opt.snapshots, "comma-separated snapshot times");
    CLI11_PARSE(app, argc, argv);

    fs::path out(opt.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << out << "\n";
        return 1;
    }
    std::ofstream log(out / "run.log");
    log << "start " << now_string() << "\n";
    log << "mode=" << opt.mode << " config=" << opt.config_path << "\n";
    const auto t0 = std::chrono::steady_clock::now();

    ConfigData cfg;
    try {
        cfg = load_config(opt.config_path);
        apply_overrides(cfg, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        write_error_json(out / "summary.json", e.what());
        log << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (opt.mode == "sweep") run_sweep(opt, cfg, log);
        else if (opt.mode == "picard") run_picard(opt, cfg, log);
        else if (opt.mode == "converge") run_converge(opt, cfg, log);
        else run_single(opt, cfg, log);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        write_error_json(out / "summary.json", e.what());
        log << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ParamError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        write_error_json(out / "summary.json", e.what());
        log << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        write_error_json(out / "summary.json", e.what());
        log << "solver error: " << e.what() << "\n";
        return 2;
    }

    const auto dt_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    log << "end " << now_string() << " elapsed_ms=" << dt_ms.count() << "\n";
    return 0;
}
