// acceptance.hpp — End-to-end checks of the physics claims, one named check per claim
//
// Each check prints a single PASS/FAIL line with the measured values, the expected values,
// the tolerance, and the wall time against its budget. Exceptions count as failures.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qslab/bound_state.hpp"
#include "qslab/experiments.hpp"
#include "qslab/kernel_solver.hpp"
#include "qslab/markov.hpp"
#include "qslab/qsl.hpp"
#include "qslab/spin_boson.hpp"
#include "qslab/trajectory.hpp"

namespace qslab::acceptance {

struct Options {
    std::size_t jobs{1};
    std::optional<double> dt; // overrides the solver step in every check
    std::uint64_t seed{20240611};

    double step() const { return dt.value_or(default_dt); }
};

struct Outcome {
    bool passed{false};
    std::string detail;
};

struct Check {
    std::string name;
    double budget_seconds;
    std::function<Outcome(const Options&)> run;
};

struct Result {
    std::string name;
    bool passed{false};
    double seconds{0.0};
    double budget{0.0};
    std::string detail;
};

// Accumulates "label=measured (expected ..., tol ...)" fragments and the overall verdict.
class Verdict {
public:
    void within(const std::string& label, double measured, double expected, double tol, bool relative = false) {
        const double err = relative ? std::abs(measured - expected) / std::abs(expected) : std::abs(measured - expected);
        const bool ok = err <= tol;
        add(ok, label + "=" + sci(measured) + " (expected " + sci(expected) + (relative ? ", rel tol " : ", tol ") +
                    sci(tol) + ")");
    }
    void below(const std::string& label, double measured, double limit) {
        add(measured < limit, label + "=" + sci(measured) + " (limit " + sci(limit) + ")");
    }
    void holds(const std::string& label, bool ok) { add(ok, label + (ok ? " holds" : " violated")); }
    void note(const std::string& text) { parts_.push_back(text); }

    Outcome outcome() const {
        std::string d;
        for (std::size_t i = 0; i < parts_.size(); ++i) d += (i ? "; " : "") + parts_[i];
        return {ok_, d};
    }

    static std::string sci(double v) {
        std::ostringstream s;
        s.precision(4);
        s << std::scientific << v;
        return s.str();
    }

private:
    void add(bool ok, std::string text) {
        ok_ = ok_ && ok;
        parts_.push_back(std::move(text));
    }
    bool ok_{true};
    std::vector<std::string> parts_;
};

inline constexpr double w0 = 1.0;

inline Outcome ideal_limit(const Options& o) {
    const SpectralDensity sd{1e-6, 1.0, 10.0};
    const AmplitudeGrid grid = solve_u(sd, w0, 20.0, o.step());
    const PathLengths paths = path_lengths(grid);
    double ratio_err = 0.0, vbar_err = 0.0;
    for (std::size_t n = grid.index_of(0.1); n < grid.size(); ++n) {
        const QslReport r = qsl_report(grid, paths, n);
        const IdealReference ideal = ideal_reference(w0, r.tau);
        ratio_err = std::max(ratio_err, std::abs(r.ratio - ideal.ratio));
        vbar_err = std::max(vbar_err, std::abs(r.vbar - 0.5 * w0));
    }
    Verdict v;
    v.within("max|ratio-ideal|", ratio_err, 0.0, 1e-3);
    v.within("max|vbar-w0/2|", vbar_err, 0.0, 1e-4);
    return v.outcome();
}

inline Outcome markov_asymptote(const Options&) {
    const MarkovParams p = markov_params({0.05, 1.0, 10.0}, w0);
    Verdict v;
    v.within("ratio_bma(200)", markov_ratio(p, w0, 200.0), qsl_markov_asymptote(p), 0.01, true);
    double worst = 0.0;
    for (double tau : {0.5, 1.0, 10.0, 50.0, 100.0, 200.0}) {
        const double direct =
            quad::integrate([&](double t) { return std::sqrt(gtt_markov_simplified(p, t)); }, 0.0, tau, {1e-13, 1e-14, 2000})
                .value /
            tau;
        worst = std::max(worst, std::abs(vbar_markov(p, tau) - direct));
    }
    v.within("max|vbar_bma-quadrature|", worst, 0.0, 1e-9);
    return v.outcome();
}

inline Outcome bound_threshold(const Options&) {
    auto y0 = [](double eta) { return find_bound_state(SpectralDensity{eta, 1.0, 10.0}, w0).y0; };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (y0(mid) > 0.0 ? lo : hi) = mid;
    }
    Verdict v;
    v.within("eta_threshold", 0.5 * (lo + hi), 0.1, 1e-6);
    v.holds("no bound state at eta=0.1-1e-6", !find_bound_state(SpectralDensity{0.1 - 1e-6, 1.0, 10.0}, w0).exists);
    v.holds("bound state at eta=0.1+1e-6", find_bound_state(SpectralDensity{0.1 + 1e-6, 1.0, 10.0}, w0).exists);
    return v.outcome();
}

// Least-squares slope of log(ratio) against log(tau) over grid points in [a, b].
inline double loglog_slope(const AmplitudeGrid& grid, const PathLengths& paths, double a, double b, double spacing) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(spacing / grid.dt)));
    for (std::size_t n = grid.index_of(a); n <= grid.index_of(b); n += stride) {
        const QslReport r = qsl_report(grid, paths, n);
        const double x = std::log(r.tau), y = std::log(r.ratio);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    const double mm = static_cast<double>(m);
    return (mm * sxy - sx * sy) / (mm * sxx - sx * sx);
}

inline Outcome bound_asymptotics(const Options& o) {
    const SpectralDensity sd{0.2, 1.0, 10.0};
    const BoundStateInfo info = find_bound_state(sd, w0);
    const AmplitudeGrid grid = solve_u(sd, w0, 800.0, o.step());
    const PathLengths paths = path_lengths(grid);
    const QslReport r = qsl_report(grid, paths, grid.index_of(800.0));
    Verdict v;
    v.holds("bound state exists", info.exists);
    v.within("|u(800)|", std::abs(grid.u[grid.index_of(800.0)]), info.Z, 0.02, true);
    v.within("vbar(800)", r.vbar, asymptotic_speed(info, alpha_zero(sd), w0), 0.05, true);
    v.within("loglog slope [200,800]", loglog_slope(grid, paths, 200.0, 800.0, 0.1), -1.0, 0.1);
    return v.outcome();
}

inline Outcome no_bound_state(const Options& o) {
    const SpectralDensity sd{0.05, 1.0, 10.0};
    const AmplitudeGrid grid = solve_u(sd, w0, 800.0, o.step());
    const QslReport r = qsl_report(grid, 800.0);
    const MarkovParams p = markov_params(sd, w0);
    Verdict v;
    v.holds("no bound state", !find_bound_state(sd, w0).exists);
    v.below("vbar(800)", r.vbar, 0.02 * w0 / 2.0);
    v.within("ratio(800)", r.ratio, qsl_markov_asymptote(p), 0.25, true);
    return v.outcome();
}

inline Outcome oracle_unitary(const Options& o) {
    const SpectralDensity sd{0.05, 1.0, 10.0};
    const double t_max = 50.0;
    const DiscreteBath bath = build_bath(sd, 2000, t_max);
    const AmplitudeGrid grid = solve_u(sd, w0, t_max, o.step());
    const TotalStateEvolution ev = evolve_single_excitation(bath, w0, t_max, grid.dt);
    double amp = 0.0, angle = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        amp = std::max(amp, std::abs(std::numbers::sqrt2 * ev.c_e[n] - grid.u[n]));
        angle = std::max(angle, std::abs(ev.bures_angle(n) - bures_angle(grid.u[n])));
    }
    Verdict v;
    v.within("max|sqrt2*c_e-u|", amp, 0.0, 1e-3);
    v.within("max|L_B(total)-L_B(u)|", angle, 0.0, 1e-3);
    return v.outcome();
}

inline Outcome oracle_stochastic(const Options& o) {
    const SpectralDensity sd{0.05, 1.0, 10.0};
    const std::size_t n_traj = 10000;
    const double tol = 5.0 / std::sqrt(static_cast<double>(n_traj));
    const DiscreteBath bath = build_bath(sd, 2000, 50.0);
    const AmplitudeGrid grid = solve_u(sd, w0, 20.0, o.step());
    const std::vector<double> times{5.0, 10.0, 20.0};
    const EnsembleAverage avg = ensemble_average(bath, grid, times, n_traj, o.seed, o.jobs);
    double ee = 0.0, eg = 0.0;
    for (std::size_t r = 0; r < times.size(); ++r) {
        const DensityMatrix ref = reduced_state_from_u(grid, times[r]);
        ee = std::max(ee, std::abs(avg.rho[r].ee - ref.ee));
        eg = std::max(eg, std::abs(avg.rho[r].eg - ref.eg));
    }
    const std::vector<double> noise_times{0.0, 0.5, 1.0, 5.0, 10.0, 20.0};
    const NoiseStatistics stats = noise_statistics(bath, noise_times, n_traj, o.seed, o.jobs);
    const double a0 = alpha_zero(sd);
    double cov = 0.0, pseudo = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < noise_times.size(); ++i) {
        mean = std::max(mean, std::abs(stats.mean[i]));
        for (std::size_t j = 0; j < noise_times.size(); ++j) {
            const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
            cov = std::max(cov, std::abs(stats.cov(a, b) - alpha_closed(sd, noise_times[i] - noise_times[j])));
            pseudo = std::max(pseudo, std::abs(stats.pseudo(a, b)));
        }
    }
    Verdict v;
    v.within("max|rho_ee-|u|^2/2|", ee, 0.0, tol);
    v.within("max|rho_eg-u/2|", eg, 0.0, tol);
    v.within("max|M{z_t zbar_s}-alpha(t-s)|/alpha0", cov / a0, 0.0, tol);
    v.within("max|M{z_t z_s}|/alpha0", pseudo / a0, 0.0, tol);
    v.within("max|M{z_t}|/sqrt(alpha0)", mean / std::sqrt(a0), 0.0, tol);
    return v.outcome();
}

inline Outcome hierarchy(const Options& o) {
    ExperimentConfig cfg = default_config("fig2");
    cfg.jobs = o.jobs;
    if (o.dt) cfg.dt = *o.dt;
    const ExperimentResult res = run_experiment(cfg);
    const Table& t = res.tables.front();
    auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(t.columns.begin(), t.columns.end(), name) - t.columns.begin());
    };
    const std::size_t c_ell = col("ell"), c_ell_red = col("ell_red"), c_lb = col("L_B"), c_lb_red = col("L_B_red"),
                      c_ratio = col("tau_qsl_ratio"), c_ratio_red = col("ratio_red"), c_hyb = col("ratio_hybrid");
    const double slack = 1e-9;
    std::size_t bad_ell = 0, bad_lb = 0, bad_hyb = 0;
    double worst_ell = 0.0, worst_lb = 0.0, worst_hyb = 0.0;
    for (const auto& row : t.rows) {
        auto d = [&](std::size_t c) { return std::get<double>(row[c]); };
        const double e1 = d(c_ell_red) - d(c_ell), e2 = d(c_lb_red) - d(c_lb),
                     e3 = std::max(d(c_ratio), d(c_ratio_red)) - d(c_hyb);
        worst_ell = std::max(worst_ell, e1);
        worst_lb = std::max(worst_lb, e2);
        worst_hyb = std::max(worst_hyb, e3);
        bad_ell += !(e1 <= slack);
        bad_lb += !(e2 <= slack);
        bad_hyb += !(e3 <= slack);
    }
    Verdict v;
    v.note("rows=" + std::to_string(t.rows.size()));
    v.below("failed rows", static_cast<double>(res.failures()), 0.5);
    v.below("max(ell_red-ell)", worst_ell, slack);
    v.below("max(L_B_red-L_B)", worst_lb, slack);
    v.below("max(max(ratio,ratio_red)-ratio_hybrid)", worst_hyb, slack);
    v.below("violations", static_cast<double>(bad_ell + bad_lb + bad_hyb), 0.5);
    return v.outcome();
}

inline Outcome spin_boson(const Options& o) {
    Verdict v;
    const double tau = 1000.0;
    for (double eta : {0.25, 0.1}) {
        const SpectralDensity sd{eta, 0.6, 30.0};
        const SbmResult r = sbm_qsl_pipeline(sd, 1.0, {tau}, o.step(), {MemoryRule::product_trapezoid, o.jobs});
        const std::string tag = "eta=" + format_number(eta);
        v.below(tag + " theta residual", r.polaron.residual, 1e-12);
        if (eta > 0.2) {
            v.holds(tag + " bound state exists", r.bound.exists);
            if (r.bound.exists)
                v.within(tag + " vbar(1000)", r.reports[0].vbar,
                         asymptotic_speed(r.bound, r.alpha0, r.polaron.effective_gap), 0.05, true);
        } else {
            v.holds(tag + " no bound state", !r.bound.exists);
            v.below(tag + " vbar(1000)", r.reports[0].vbar, 0.02 * 1.0 / 2.0);
        }
    }
    return v.outcome();
}

inline Outcome convergence(const Options& o) {
    Verdict v;
    const ConvergenceReport ohmic = convergence_order({0.05, 1.0, 10.0}, w0, 10.0, o.step());
    const ConvergenceReport sub = convergence_order({0.25, 0.6, 30.0}, w0, 10.0, o.step());
    v.within("order ohmic", ohmic.order, 2.0, 0.3);
    v.within("order sub-ohmic", sub.order, 2.0, 0.3);
    return v.outcome();
}

inline const std::vector<Check>& checks() {
    static const std::vector<Check> all{
        {"ideal_limit", 10.0, ideal_limit},
        {"markov_asymptote", 5.0, markov_asymptote},
        {"bound_threshold", 5.0, bound_threshold},
        {"bound_asymptotics", 120.0, bound_asymptotics},
        {"no_bound_state", 120.0, no_bound_state},
        {"oracle_unitary", 120.0, oracle_unitary},
        {"oracle_stochastic", 300.0, oracle_stochastic},
        {"hierarchy", 300.0, hierarchy},
        {"spin_boson", 300.0, spin_boson},
        {"convergence", 60.0, convergence},
    };
    return all;
}

inline Result run_check(const Check& c, const Options& o) {
    Result r{c.name, false, 0.0, c.budget_seconds, {}};
    const auto start = std::chrono::steady_clock::now();
    try {
        const Outcome out = c.run(o);
        r.passed = out.passed;
        r.detail = out.detail;
    } catch (const std::exception& e) {
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > r.budget) {
        r.passed = false;
        r.detail += "; over time budget";
    }
    return r;
}

inline std::string format_result(const Result& r) {
    std::ostringstream s;
    s.precision(1);
    s << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " [" << std::fixed << r.seconds
      << " s of " << r.budget << " s]";
    return s.str();
}

// Runs the named checks (all when `only` is empty). Unknown names throw ConfigError.
inline std::vector<Result> run(const std::vector<std::string>& only, const Options& o, std::ostream& log) {
    for (const auto& name : only) {
        const bool known = std::any_of(checks().begin(), checks().end(), [&](const Check& c) { return c.name == name; });
        if (!known) throw ConfigError("unknown acceptance check '" + name + "'");
    }
    std::vector<Result> results;
    for (const auto& c : checks()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
        results.push_back(run_check(c, o));
        log << format_result(results.back()) << std::endl;
    }
    return results;
}

} // namespace qslab::acceptance
