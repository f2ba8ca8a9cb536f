// experiments.hpp — Named parameter scans and their CSV tables
//
// Each experiment turns an ExperimentConfig into one or more Tables. A point that fails
// numerically still produces its rows, with NaN cells and the error tag in `status`.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qslab/bound_state.hpp"
#include "qslab/errors.hpp"
#include "qslab/kernel_solver.hpp"
#include "qslab/markov.hpp"
#include "qslab/parallel.hpp"
#include "qslab/qsl.hpp"
#include "qslab/spectral.hpp"
#include "qslab/spin_boson.hpp"

namespace qslab {

// ---------------------------------------------------------------------------
// Grids and config

struct Grid {
    double first{0.0};
    double last{0.0};
    std::size_t count{1};

    std::vector<double> values() const {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i)
            v[i] = count == 1 ? first
                              : first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
        if (count > 1) v.back() = last;
        return v;
    }
};

inline double parse_double(const std::string& text, const std::string& field) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) throw ConfigError(field + ": cannot parse '" + text + "' as a number");
    return value;
}

inline std::uint64_t parse_unsigned(const std::string& text, const std::string& field) {
    std::uint64_t value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) throw ConfigError(field + ": cannot parse '" + text + "' as a count");
    return value;
}

// "a:b:n" → n uniform points from a to b inclusive.
inline Grid parse_grid(const std::string& text, const std::string& field) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos)
        throw ConfigError(field + ": expected a:b:n, got '" + text + "'");
    Grid g{parse_double(text.substr(0, c1), field), parse_double(text.substr(c1 + 1, c2 - c1 - 1), field),
           static_cast<std::size_t>(parse_unsigned(text.substr(c2 + 1), field))};
    if (g.count == 0) throw ConfigError(field + ": n must be >= 1");
    if (g.count == 1 && g.first != g.last) throw ConfigError(field + ": a single point needs a == b");
    if (g.count > 1 && !(g.last > g.first)) throw ConfigError(field + ": grid must be strictly increasing");
    return g;
}

inline std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string format_grid(const Grid& g) {
    return format_number(g.first) + ":" + format_number(g.last) + ":" + std::to_string(g.count);
}

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"fig1", "fig2", "fig3", "sm1", "sm2", "sm3", "sweep"};
    return names;
}

struct ExperimentConfig {
    std::string experiment{"sweep"};
    double eta{0.05};
    double s{1.0};
    double omega_c{10.0};
    double tau_max{50.0};
    double dt{default_dt};
    std::optional<Grid> eta_grid;
    std::optional<Grid> omega_c_grid;
    std::optional<Grid> tau_grid;
    std::size_t n_modes{2000};
    std::size_t n_traj{10000};
    std::uint64_t seed{20240611};
    std::size_t jobs{1};
    std::string out_path;

    SpectralDensity density() const { return {eta, s, omega_c}; }
};

// Raw key → value assignments, in the order they should be applied (file first, then flags).
using ConfigAssignments = std::map<std::string, std::string>;

inline std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "out_path") key = "out";
    return key;
}

inline ConfigAssignments parse_config_text(const std::string& text) {
    ConfigAssignments out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string v) {
        const auto b = v.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string{};
        const auto e = v.find_last_not_of(" \t\r");
        return v.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        out[key] = value;
    }
    return out;
}

inline ConfigAssignments read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// Caption defaults per experiment; explicit assignments win.
inline ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    if (experiment == "fig1") {
        cfg.tau_max = 50.0;
        cfg.tau_grid = Grid{0.2, 50.0, 250};
    } else if (experiment == "fig2") {
        cfg.eta_grid = Grid{0.02, 0.2, 10};
        cfg.tau_max = 50.0;
        cfg.tau_grid = Grid{0.5, 50.0, 100};
        cfg.n_modes = 400;
    } else if (experiment == "fig3") {
        cfg.tau_max = 800.0;
        cfg.eta_grid = Grid{0.02, 0.3, 15};
        cfg.omega_c_grid = Grid{2.0, 30.0, 15};
    } else if (experiment == "sm1") {
        cfg.eta = 0.1;
        cfg.omega_c = 13.0;
        cfg.tau_max = 100.0;
        cfg.tau_grid = Grid{0.5, 100.0, 200};
    } else if (experiment == "sm2") {
        cfg.s = 0.6;
        cfg.omega_c = 30.0;
        cfg.eta_grid = Grid{0.1, 0.25, 2};
        cfg.tau_max = 1000.0;
        cfg.tau_grid = Grid{5.0, 1000.0, 200};
    } else if (experiment == "sm3") {
        cfg.s = 0.6;
        cfg.omega_c = 30.0;
        cfg.eta = 0.2;
        cfg.eta_grid = Grid{0.04, 0.28, 7};
        cfg.omega_c_grid = Grid{10.0, 50.0, 5};
        cfg.tau_max = 1000.0;
    } else if (experiment == "sweep") {
        cfg.tau_max = 50.0;
    } else {
        throw ConfigError("experiment: unknown name '" + experiment + "'");
    }
    return cfg;
}

inline void apply_assignment(ExperimentConfig& cfg, const std::string& raw_key, const std::string& value) {
    const std::string key = normalize_key(raw_key);
    if (key == "eta") cfg.eta = parse_double(value, key);
    else if (key == "s") cfg.s = parse_double(value, key);
    else if (key == "omega_c") cfg.omega_c = parse_double(value, key);
    else if (key == "tau_max") {
        cfg.tau_max = parse_double(value, key);
        cfg.tau_grid.reset(); // a new horizon invalidates the caption τ grid
    } else if (key == "dt") cfg.dt = parse_double(value, key);
    else if (key == "eta_grid") cfg.eta_grid = parse_grid(value, key);
    else if (key == "omega_c_grid") cfg.omega_c_grid = parse_grid(value, key);
    else if (key == "tau_grid") cfg.tau_grid = parse_grid(value, key);
    else if (key == "n_modes") cfg.n_modes = parse_unsigned(value, key);
    else if (key == "n_traj") cfg.n_traj = parse_unsigned(value, key);
    else if (key == "seed") cfg.seed = parse_unsigned(value, key);
    else if (key == "jobs") cfg.jobs = parse_unsigned(value, key);
    else if (key == "out") cfg.out_path = value;
    else if (key == "experiment") {
        if (value != cfg.experiment) throw ConfigError("experiment: config file names '" + value + "'");
    } else throw ConfigError("unknown config key '" + raw_key + "'");
}

inline void validate_config(const ExperimentConfig& cfg) {
    auto require = [](bool ok, const std::string& field, const std::string& what) {
        if (!ok) throw ConfigError(field + ": " + what);
    };
    require(cfg.eta >= 0.0, "eta", "must be >= 0");
    require(cfg.s > 0.0, "s", "must be > 0");
    require(cfg.omega_c > 0.0, "omega_c", "must be > 0");
    require(cfg.tau_max > 0.0, "tau_max", "must be > 0");
    require(cfg.dt > 0.0, "dt", "must be > 0");
    require(cfg.dt <= cfg.tau_max, "dt", "must not exceed tau_max");
    require(cfg.n_modes >= 100, "n_modes", "must be >= 100");
    require(cfg.n_traj >= 100, "n_traj", "must be >= 100");
    require(cfg.jobs >= 1, "jobs", "must be >= 1");
    if (cfg.eta_grid) require(cfg.eta_grid->first >= 0.0, "eta_grid", "values must be >= 0");
    if (cfg.omega_c_grid) require(cfg.omega_c_grid->first > 0.0, "omega_c_grid", "values must be > 0");
    if (cfg.tau_grid) {
        require(cfg.tau_grid->first > 0.0, "tau_grid", "values must be > 0");
        require(cfg.tau_grid->last <= cfg.tau_max + 1e-12, "tau_grid", "must not exceed tau_max");
    }
}

inline ExperimentConfig resolve_config(const std::string& experiment, const ConfigAssignments& file,
                                       const std::vector<std::pair<std::string, std::string>>& flags) {
    ExperimentConfig cfg = default_config(experiment);
    // tau_max first so an explicit tau_grid in the same layer survives the reset
    auto apply_layer = [&](const std::vector<std::pair<std::string, std::string>>& layer) {
        for (const auto& [k, v] : layer)
            if (normalize_key(k) == "tau_max") apply_assignment(cfg, k, v);
        for (const auto& [k, v] : layer)
            if (normalize_key(k) != "tau_max") apply_assignment(cfg, k, v);
    };
    apply_layer({file.begin(), file.end()});
    apply_layer(flags);
    validate_config(cfg);
    return cfg;
}

// Canonical key=value list for the CSV header; omits jobs and out so output bytes do not
// depend on scheduling or destination.
inline std::string canonical_config(const ExperimentConfig& cfg) {
    std::string s = "experiment=" + cfg.experiment;
    s += " eta=" + format_number(cfg.eta);
    s += " s=" + format_number(cfg.s);
    s += " omega_c=" + format_number(cfg.omega_c);
    s += " tau_max=" + format_number(cfg.tau_max);
    s += " dt=" + format_number(cfg.dt);
    s += " eta_grid=" + (cfg.eta_grid ? format_grid(*cfg.eta_grid) : std::string("none"));
    s += " omega_c_grid=" + (cfg.omega_c_grid ? format_grid(*cfg.omega_c_grid) : std::string("none"));
    s += " tau_grid=" + (cfg.tau_grid ? format_grid(*cfg.tau_grid) : std::string("none"));
    s += " n_modes=" + std::to_string(cfg.n_modes);
    s += " n_traj=" + std::to_string(cfg.n_traj);
    s += " seed=" + std::to_string(cfg.seed);
    return s;
}

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<double, long long, std::string>;

inline constexpr double nan_cell = std::numeric_limits<double>::quiet_NaN();

struct Table {
    std::string name; // file suffix, empty for the main table
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::size_t failures{0};

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw InvariantError("table " + name + ": row width mismatch");
        rows.push_back(std::move(row));
    }
};

inline std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (std::isnan(*d)) return "nan";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.8e", *d);
        return buf;
    }
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

inline std::string render_csv(const Table& t, const std::string& config_line) {
    std::string out = "# config: " + config_line + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
        out += "\n";
    }
    return out;
}

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<Table> tables; // tables[0] is the main output

    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& t : tables) n += t.failures;
        return n;
    }
};

inline std::filesystem::path table_path(const std::filesystem::path& main, const Table& t) {
    if (t.name.empty()) return main;
    std::filesystem::path p = main;
    p.replace_filename(main.stem().string() + "_" + t.name + main.extension().string());
    return p;
}

inline std::vector<std::filesystem::path> write_result(const ExperimentResult& res) {
    const std::filesystem::path main = res.config.out_path.empty() ? res.config.experiment + ".csv" : res.config.out_path;
    if (main.has_parent_path()) std::filesystem::create_directories(main.parent_path());
    const std::string cfg = canonical_config(res.config);
    std::vector<std::filesystem::path> written;
    for (const auto& t : res.tables) {
        const auto path = table_path(main, t);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("out: cannot write '" + path.string() + "'");
        out << render_csv(t, cfg);
        written.push_back(path);
    }
    return written;
}

// ---------------------------------------------------------------------------
// Pipelines shared by the experiments

inline constexpr double omega0_unit = 1.0;

inline std::vector<double> snap_to_grid(const std::vector<double>& taus, double dt) {
    std::vector<double> out;
    out.reserve(taus.size());
    for (double t : taus) out.push_back(std::max(1.0, std::round(t / dt)) * dt);
    return out;
}

inline std::vector<double> tau_values(const ExperimentConfig& cfg, std::size_t default_points) {
    const Grid g = cfg.tau_grid ? *cfg.tau_grid : Grid{cfg.tau_max / static_cast<double>(default_points), cfg.tau_max,
                                                       default_points};
    return snap_to_grid(g.values(), cfg.dt);
}

struct PointOutcome {
    std::string status{"ok"};
    BoundStateInfo bound;
    double alpha0{nan_cell};
    double omega0{omega0_unit};
    std::vector<QslReport> reports;
    double theta{nan_cell};
};

template <class Fn>
PointOutcome guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        PointOutcome p;
        p.status = e.code();
        return p;
    }
}

inline PointOutcome two_level_point(const SpectralDensity& sd, const std::vector<double>& taus, double dt) {
    return guarded([&] {
        PointOutcome p;
        p.alpha0 = alpha_zero(sd);
        p.bound = find_bound_state(sd, omega0_unit);
        const double t_max = *std::max_element(taus.begin(), taus.end());
        const AmplitudeGrid grid = solve_u(sd, omega0_unit, t_max, dt);
        p.reports = qsl_series(grid, taus);
        return p;
    });
}

inline PointOutcome spin_boson_point(const SpectralDensity& sd, const std::vector<double>& taus, double dt) {
    return guarded([&] {
        const SbmResult r = sbm_qsl_pipeline(sd, omega0_unit, taus, dt);
        PointOutcome p;
        p.alpha0 = r.alpha0;
        p.omega0 = r.polaron.effective_gap;
        p.bound = r.bound;
        p.reports = r.reports;
        p.theta = r.polaron.theta;
        return p;
    });
}

inline double safe_asymptotic_speed(const PointOutcome& p) {
    if (!p.bound.exists) return nan_cell;
    try {
        return asymptotic_speed(p.bound, p.alpha0, p.omega0);
    } catch (const Error&) {
        return nan_cell;
    }
}

inline double safe_asymptotic_ratio(const PointOutcome& p, double tau) {
    if (!p.bound.exists) return nan_cell;
    try {
        return asymptotic_ratio(p.bound, p.alpha0, p.omega0, tau);
    } catch (const Error&) {
        return nan_cell;
    }
}

inline const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols{"vbar",    "tau_qsl_ratio", "L_B",       "ell",
                                               "L_B_red", "ell_red",       "ratio_red", "ratio_hybrid"};
    return cols;
}

inline void append_report(std::vector<Cell>& row, const QslReport* r) {
    if (!r) {
        for (std::size_t i = 0; i < report_columns().size(); ++i) row.emplace_back(nan_cell);
        return;
    }
    for (double v : {r->vbar, r->ratio, r->L_B, r->ell, r->L_B_red, r->ell_red, r->ratio_red, r->ratio_hybrid})
        row.emplace_back(v);
}

inline void append_bound(std::vector<Cell>& row, const PointOutcome& p) {
    const bool ok = p.status == "ok";
    row.emplace_back(ok ? (p.bound.exists ? 1LL : 0LL) : -1LL);
    row.emplace_back(ok ? p.bound.y0 : nan_cell);
    row.emplace_back(ok && p.bound.exists ? p.bound.E_b : nan_cell);
    row.emplace_back(ok && p.bound.exists ? p.bound.Z : nan_cell);
}

inline std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline const std::vector<std::string>& bound_columns() {
    static const std::vector<std::string> cols{"exists", "y0", "E_b", "Z"};
    return cols;
}

// ---------------------------------------------------------------------------
// Experiments

inline ExperimentResult run_fig1(const ExperimentConfig& cfg) {
    ExperimentResult res{cfg, {}};
    Table t;
    t.columns = {"tau",      "vbar_ideal", "ratio_ideal", "L_B_ideal", "vbar_bma",
                 "ratio_bma", "L_B_bma",   "ratio_bma_asymptote", "status"};
    std::string status = "ok";
    MarkovParams mp;
    try {
        mp = markov_params(cfg.density(), omega0_unit);
    } catch (const Error& e) {
        status = e.code();
    }
    for (double tau : tau_values(cfg, 250)) {
        const IdealReference ideal = ideal_reference(omega0_unit, tau);
        const bool ok = status == "ok";
        t.add({tau, ideal.vbar, ideal.ratio, ideal.L_B, ok ? vbar_markov(mp, tau) : nan_cell,
               ok ? markov_ratio(mp, omega0_unit, tau) : nan_cell,
               ok ? bures_angle_markov(mp, omega0_unit, tau) : nan_cell, ok ? qsl_markov_asymptote(mp) : nan_cell,
               status});
        if (!ok) ++t.failures;
    }
    res.tables.push_back(std::move(t));
    return res;
}

inline Table spectrum_table(const ExperimentConfig& cfg, const std::vector<double>& etas) {
    Table t;
    t.name = "spectrum";
    t.columns = {"eta", "index", "eigenvalue", "kind", "delta_omega", "status"};
    auto slices = parallel_map(etas.size(), cfg.jobs, [&](std::size_t i) -> std::pair<std::string, SpectrumSlice> {
        try {
            SpectralDensity sd = cfg.density();
            return {"ok", energy_spectrum(sd, omega0_unit, {etas[i]}, cfg.n_modes).front()};
        } catch (const Error& e) {
            SpectrumSlice empty;
            empty.eta = etas[i];
            return {e.code(), empty};
        }
    });
    for (const auto& [status, slice] : slices) {
        if (status != "ok") {
            t.add({slice.eta, -1LL, nan_cell, std::string("none"), nan_cell, status});
            ++t.failures;
            continue;
        }
        long long index = 0;
        if (slice.bound_branch) t.add({slice.eta, index++, *slice.bound_branch, std::string("bound"), slice.delta_omega, status});
        for (double e : slice.band) t.add({slice.eta, index++, e, std::string("band"), slice.delta_omega, status});
    }
    return t;
}

inline ExperimentResult run_fig2(const ExperimentConfig& cfg) {
    ExperimentResult res{cfg, {}};
    const auto etas = cfg.eta_grid ? cfg.eta_grid->values() : std::vector<double>{cfg.eta};
    const auto taus = tau_values(cfg, 100);
    auto points = parallel_map(etas.size(), cfg.jobs, [&](std::size_t i) {
        SpectralDensity sd = cfg.density();
        sd.eta = etas[i];
        return two_level_point(sd, taus, cfg.dt);
    });
    Table t;
    t.columns = concat(concat({"eta", "tau"}, report_columns()), concat(bound_columns(), {"status"}));
    for (std::size_t i = 0; i < etas.size(); ++i) {
        const auto& p = points[i];
        for (std::size_t j = 0; j < taus.size(); ++j) {
            std::vector<Cell> row{etas[i], taus[j]};
            append_report(row, p.status == "ok" ? &p.reports[j] : nullptr);
            append_bound(row, p);
            row.emplace_back(p.status);
            t.add(std::move(row));
            if (p.status != "ok") ++t.failures;
        }
    }
    res.tables.push_back(std::move(t));
    res.tables.push_back(spectrum_table(cfg, etas));
    return res;
}

// Steady-state scans at τ = tau_max against η (ωc fixed) and against ωc (η fixed).
template <class PointFn>
Table steady_state_table(const ExperimentConfig& cfg, PointFn&& point) {
    const std::vector<double> taus = snap_to_grid({cfg.tau_max}, cfg.dt);
    struct Job {
        std::string scan;
        SpectralDensity sd;
    };
    std::vector<Job> jobs;
    for (double eta : cfg.eta_grid ? cfg.eta_grid->values() : std::vector<double>{cfg.eta})
        jobs.push_back({"eta", {eta, cfg.s, cfg.omega_c}});
    for (double wc : cfg.omega_c_grid ? cfg.omega_c_grid->values() : std::vector<double>{})
        jobs.push_back({"omega_c", {cfg.eta, cfg.s, wc}});
    auto points = parallel_map(jobs.size(), cfg.jobs, [&](std::size_t i) { return point(jobs[i].sd, taus, cfg.dt); });
    Table t;
    t.columns = concat(concat({"scan", "eta", "omega_c", "tau"}, report_columns()),
                       concat(bound_columns(), {"theta", "vbar_asymptotic", "ratio_asymptotic", "status"}));
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& p = points[i];
        std::vector<Cell> row{jobs[i].scan, jobs[i].sd.eta, jobs[i].sd.omega_c, taus[0]};
        append_report(row, p.status == "ok" ? &p.reports[0] : nullptr);
        append_bound(row, p);
        row.emplace_back(p.theta);
        row.emplace_back(safe_asymptotic_speed(p));
        row.emplace_back(safe_asymptotic_ratio(p, taus[0]));
        row.emplace_back(p.status);
        t.add(std::move(row));
        if (p.status != "ok") ++t.failures;
    }
    return t;
}

inline ExperimentResult run_fig3(const ExperimentConfig& cfg) {
    ExperimentResult res{cfg, {}};
    res.tables.push_back(steady_state_table(cfg, two_level_point));
    return res;
}

// τ scans with the bound-state asymptotic overlay, one block per η.
template <class PointFn>
Table tau_scan_table(const ExperimentConfig& cfg, const std::vector<double>& etas, std::size_t default_points,
                     PointFn&& point) {
    const auto taus = tau_values(cfg, default_points);
    auto points = parallel_map(etas.size(), cfg.jobs, [&](std::size_t i) {
        SpectralDensity sd = cfg.density();
        sd.eta = etas[i];
        return point(sd, taus, cfg.dt);
    });
    Table t;
    t.columns = concat(concat({"eta", "tau"}, report_columns()),
                       concat(bound_columns(), {"theta", "vbar_asymptotic", "ratio_asymptotic", "status"}));
    for (std::size_t i = 0; i < etas.size(); ++i) {
        const auto& p = points[i];
        const double c = safe_asymptotic_speed(p);
        for (std::size_t j = 0; j < taus.size(); ++j) {
            std::vector<Cell> row{etas[i], taus[j]};
            append_report(row, p.status == "ok" ? &p.reports[j] : nullptr);
            append_bound(row, p);
            row.emplace_back(p.theta);
            row.emplace_back(c);
            row.emplace_back(safe_asymptotic_ratio(p, taus[j]));
            row.emplace_back(p.status);
            t.add(std::move(row));
            if (p.status != "ok") ++t.failures;
        }
    }
    return t;
}

inline ExperimentResult run_sm1(const ExperimentConfig& cfg) {
    ExperimentResult res{cfg, {}};
    res.tables.push_back(tau_scan_table(cfg, {cfg.eta}, 200, two_level_point));
    return res;
}

inline ExperimentResult run_sm2(const ExperimentConfig& cfg) {
    ExperimentResult res{cfg, {}};
    const auto etas = cfg.eta_grid ? cfg.eta_grid->values() : std::vector<double>{cfg.eta};
    res.tables.push_back(tau_scan_table(cfg, etas, 200, spin_boson_point));
    return res;
}

inline ExperimentResult run_sm3(const ExperimentConfig& cfg) {
    ExperimentResult res{cfg, {}};
    res.tables.push_back(steady_state_table(cfg, spin_boson_point));
    return res;
}

// Free-form (η, ωc, τ) grid for the two-level model with the closed-system reference alongside.
inline ExperimentResult run_sweep(const ExperimentConfig& cfg) {
    ExperimentResult res{cfg, {}};
    const auto etas = cfg.eta_grid ? cfg.eta_grid->values() : std::vector<double>{cfg.eta};
    const auto wcs = cfg.omega_c_grid ? cfg.omega_c_grid->values() : std::vector<double>{cfg.omega_c};
    const auto taus = tau_values(cfg, 50);
    auto points = parallel_map(etas.size() * wcs.size(), cfg.jobs, [&](std::size_t i) {
        return two_level_point({etas[i / wcs.size()], cfg.s, wcs[i % wcs.size()]}, taus, cfg.dt);
    });
    Table t;
    t.columns = concat(concat({"eta", "omega_c", "tau"}, report_columns()),
                       concat(bound_columns(), {"vbar_ideal", "ratio_ideal", "status"}));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        for (std::size_t j = 0; j < taus.size(); ++j) {
            std::vector<Cell> row{etas[i / wcs.size()], wcs[i % wcs.size()], taus[j]};
            append_report(row, p.status == "ok" ? &p.reports[j] : nullptr);
            append_bound(row, p);
            const IdealReference ideal = ideal_reference(omega0_unit, taus[j]);
            row.emplace_back(ideal.vbar);
            row.emplace_back(ideal.ratio);
            row.emplace_back(p.status);
            t.add(std::move(row));
            if (p.status != "ok") ++t.failures;
        }
    }
    res.tables.push_back(std::move(t));
    return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.experiment == "fig1") return run_fig1(cfg);
    if (cfg.experiment == "fig2") return run_fig2(cfg);
    if (cfg.experiment == "fig3") return run_fig3(cfg);
    if (cfg.experiment == "sm1") return run_sm1(cfg);
    if (cfg.experiment == "sm2") return run_sm2(cfg);
    if (cfg.experiment == "sm3") return run_sm3(cfg);
    if (cfg.experiment == "sweep") return run_sweep(cfg);
    throw ConfigError("experiment: unknown name '" + cfg.experiment + "'");
}

} // namespace qslab
