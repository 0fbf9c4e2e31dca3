#include "matrixtx/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "matrixtx/channel.hpp"
#include "matrixtx/csv.hpp"
#include "matrixtx/fdm.hpp"
#include "matrixtx/pbs.hpp"
#include "matrixtx/release_models.hpp"
#include "matrixtx/runner.hpp"
#include "matrixtx/scenario.hpp"

namespace matrixtx {

namespace {

// Reference desk-scale parameters shared by every criterion.
constexpr double kRadius = 1e-6;
constexpr double kRxRadius = 1e-6;
constexpr double kDiffusivity = 1e-9;
constexpr double kMolecules = 1e4;
constexpr double kTimeStep = 1e-6;
constexpr int kRealizations = 100;
const double kRatios[] = {1.0, 25.0, 100.0, 400.0};
const double kDistances[] = {2e-6, 5e-6};

MatrixParams params_for(double ratio) {
    return MatrixParams::from_molecule_count(kMolecules, ratio, kRadius,
                                             kDiffusivity);
}

ChannelGeometry geometry_for(double d) { return {kRadius, kRxRadius, d}; }

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// Test-side adaptive Simpson, independent of the library quadrature.
double simpson_adaptive(const std::function<double(double)>& f, double a,
                        double b, double tol, int depth = 0) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    const double whole = (fa + 4.0 * fc + fb) * (b - a) / 6.0;
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fhi, double fmid, double acc,
            int dep) -> double {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (flo + 4.0 * flm + fmid) * (mid - lo) / 6.0;
        const double right = (fmid + 4.0 * frm + fhi) * (hi - mid) / 6.0;
        if (std::abs(left + right - acc) <= 15.0 * tol * (hi - lo) / (b - a) ||
            dep > 48)
            return left + right + (left + right - acc) / 15.0;
        return rec(lo, mid, flo, fmid, flm, left, dep + 1) +
               rec(mid, hi, fmid, fhi, frm, right, dep + 1);
    };
    (void)depth;
    return rec(a, b, fa, fb, fc, whole, 0);
}

using Clock = std::chrono::steady_clock;

struct Harness {
    std::vector<CriterionResult> results;
    std::ostream* log;

    void run(const std::string& id, const std::string& description,
             const std::function<std::pair<bool, std::string>()>& body) {
        if (log) *log << "[" << id << "] " << description << "..." << std::endl;
        CriterionResult r;
        r.id = id;
        r.description = description;
        const auto t0 = Clock::now();
        try {
            auto [ok, detail] = body();
            r.passed = ok;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (log)
            *log << "[" << id << "] " << (r.passed ? "PASS" : "FAIL") << " ("
                 << fmt("%.1f", r.seconds) << " s) " << r.detail << std::endl;
        results.push_back(std::move(r));
    }
};

}  // namespace

std::vector<CriterionResult> run_acceptance_criteria(int threads,
                                                     std::ostream* log) {
    Harness h;
    h.log = log;

    // C1: terminal value of the Lee model is 1 - 1/(4r) exactly.
    h.run("C1", "Lee endpoint identity 1 - 1/(4r)", [&] {
        double worst = 0.0;
        for (double r : kRatios) {
            const double expect = 1.0 - 1.0 / (4.0 * r);
            const double got = lee_release_fraction(1.0, r);
            worst = std::max(worst, std::abs(got - expect) / expect);
        }
        return std::make_pair(worst < 1e-12,
                              fmt("max rel dev %.2e (limit 1e-12)", worst));
    });

    // C2: the front reaches the center exactly at the closed-form release time.
    h.run("C2", "release-time consistency t(delta=1) == t_rel", [&] {
        double worst = 0.0;
        for (double r : kRatios) {
            const MatrixParams p = params_for(r);
            const double t1 = lee_time_of_front(1.0, p);
            const double t2 = release_time(p);
            worst = std::max(worst, std::abs(t1 - t2) / t2);
        }
        return std::make_pair(worst < 1e-12,
                              fmt("max rel dev %.2e (limit 1e-12)", worst));
    });

    // C3: Lee / Frenning / FDM cross-agreement below 0.02 and PBS within
    // 3 standard errors of Lee at 20 checkpoints, for each gradual ratio.
    h.run("C3", "release-model cross-agreement (ratios 25, 100, 400)", [&] {
        bool ok = true;
        std::string detail;
        for (double ratio : {25.0, 100.0, 400.0}) {
            const MatrixParams p = params_for(ratio);
            const double t_rel = release_time(p);

            const auto fdm_t0 = Clock::now();
            FdmConfig fc;
            fc.t_end = 1.02 * t_rel;
            const FdmSolution fdm = solve_moving_boundary(p, fc);
            const double fdm_seconds =
                std::chrono::duration<double>(Clock::now() - fdm_t0).count();

            double worst = 0.0;
            for (int i = 1; i <= 400; ++i) {
                const double t = t_rel * i / 400.0;
                const double lee = lee_release_fraction_at_time(t, p);
                const double fre = frenning_release_fraction(t, p);
                const double num = fdm.fraction_at(t);
                worst = std::max({worst, std::abs(lee - fre), std::abs(lee - num),
                                  std::abs(fre - num)});
            }

            const auto pbs_t0 = Clock::now();
            PbsConfig pc;
            pc.time_step = kTimeStep;
            pc.horizon = t_rel;
            pc.molecules_per_run = static_cast<int>(kMolecules);
            pc.realizations = kRealizations;
            pc.rng_seed = 2024;
            pc.record_stride = 8;
            pc.threads = threads;
            const PbsResult pbs = simulate_release(p, front_from_fdm(fdm), pc);
            const double pbs_seconds =
                std::chrono::duration<double>(Clock::now() - pbs_t0).count();

            double worst_sigma = 0.0;
            for (int c = 1; c <= 20; ++c) {
                const double t = t_rel * c / 20.0;
                const auto it =
                    std::lower_bound(pbs.times.begin(), pbs.times.end(), t);
                const std::size_t i =
                    std::min<std::size_t>(it - pbs.times.begin(), pbs.times.size() - 1);
                const double mean = pbs.mean_released[i] / kMolecules;
                const double se = pbs.stderr_released[i] / kMolecules;
                const double lee = lee_release_fraction_at_time(pbs.times[i], p);
                const double sigmas = std::abs(mean - lee) / std::max(se, 1e-12);
                worst_sigma = std::max(worst_sigma, sigmas);
            }
            const bool this_ok = worst < 0.02 && worst_sigma <= 3.0 &&
                                 fdm_seconds < 30.0 && pbs_seconds < 300.0;
            ok = ok && this_ok;
            detail += fmt("[r=%g: dev %.4f, pbs %.1f sigma, fdm %.1fs, pbs %.0fs] ",
                          ratio, worst, worst_sigma, fdm_seconds, pbs_seconds);
        }
        return std::make_pair(ok, detail);
    });

    // C4: eigenseries value at Dt/a^2 = 0.05 against the independently
    // computed 0.6069, and PBS with a zero front against the series.
    h.run("C4", "instantaneous-release series and PBS", [&] {
        const MatrixParams p = params_for(1.0);
        const double tau_time = 0.05 * kRadius * kRadius / kDiffusivity;
        const double series = crank_release_fraction(tau_time, p);
        const bool series_ok = std::abs(series - 0.6069) <= 5e-4;

        PbsConfig pc;
        pc.time_step = kTimeStep;
        pc.horizon = 5e-4;
        pc.molecules_per_run = static_cast<int>(kMolecules);
        pc.realizations = kRealizations;
        pc.rng_seed = 2025;
        pc.threads = threads;
        const PbsResult pbs = simulate_release(p, front_zero(), pc);
        double worst_sigma = 0.0;
        double worst_abs = 0.0;
        for (int c = 1; c <= 20; ++c) {
            const double t = pc.horizon * c / 20.0;
            const auto it = std::lower_bound(pbs.times.begin(), pbs.times.end(), t);
            const std::size_t i =
                std::min<std::size_t>(it - pbs.times.begin(), pbs.times.size() - 1);
            const double mean = pbs.mean_released[i] / kMolecules;
            const double se = pbs.stderr_released[i] / kMolecules;
            const double ref = crank_release_fraction(pbs.times[i], p);
            worst_sigma = std::max(worst_sigma,
                                   std::abs(mean - ref) / std::max(se, 1e-12));
            worst_abs = std::max(worst_abs, std::abs(mean - ref));
        }
        return std::make_pair(
            series_ok && worst_sigma <= 3.0,
            fmt("series %.6f (want 0.6069 +- 5e-4); pbs worst %.1f sigma "
                "(abs dev %.4f at dt=1e-6)",
                series, worst_sigma, worst_abs));
    });

    // C5: the hitting kernel integrates to r_RX/d, touching case included.
    h.run("C5", "kernel total mass = r_RX/d within 1e-4", [&] {
        double worst = 0.0;
        for (double d : kDistances) {
            const ChannelGeometry g = geometry_for(d);
            const auto k = HittingKernelParams::from_geometry(g, kDiffusivity);
            const double pref = 2.0 * k.rho * g.tx_radius * g.rx_radius /
                                g.center_distance * std::sqrt(M_PI * kDiffusivity);
            const double T = 1.0;
            // head: t = u^2 removes the t^(-1/2) spike at the origin
            const double head = simpson_adaptive(
                [&](double u) {
                    if (u == 0.0) return 0.0;
                    const double uu = u * u;
                    return 2.0 * pref *
                           (std::exp(-k.beta1 / uu) - std::exp(-k.beta2 / uu));
                },
                0.0, std::sqrt(T), 1e-10);
            // tail: t = 1/s^2 turns [T, inf) into (0, 1/sqrt(T)]
            const double tail = simpson_adaptive(
                [&](double s) {
                    const double ss = s * s;
                    if (s == 0.0) return 2.0 * pref * (k.beta2 - k.beta1);
                    return 2.0 * pref * std::exp(-k.beta1 * ss) *
                           (-std::expm1(-(k.beta2 - k.beta1) * ss)) / ss;
                },
                0.0, 1.0 / std::sqrt(T), 1e-10);
            const double expect = g.rx_radius / g.center_distance;
            worst = std::max(worst, std::abs(head + tail - expect) / expect);
        }
        return std::make_pair(worst < 1e-4,
                              fmt("max rel dev %.2e (limit 1e-4)", worst));
    });

    // C6: closed form vs numerical convolution over 200 log-spaced times.
    h.run("C6", "closed form == convolution within 1e-3 relative", [&] {
        const auto t0 = Clock::now();
        const MatrixParams p = params_for(1.0);
        std::vector<double> grid(200);
        for (int i = 0; i < 200; ++i)
            grid[i] = 1e-4 * std::pow(1e3, i / 199.0);
        double worst = 0.0;
        for (double d : kDistances) {
            const ChannelGeometry g = geometry_for(d);
            const AbsorptionCurve conv =
                absorbed_gradual(make_crank_count(p), g, p, grid);
            for (int i = 0; i < 200; ++i) {
                const double cf =
                    absorbed_closed_form_instantaneous(grid[i], p, g);
                const double rel = std::abs(cf - conv.cumulative[i]) /
                                   std::max(conv.cumulative[i], 1e-300);
                worst = std::max(worst, rel);
            }
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        return std::make_pair(worst < 1e-3 && secs < 30.0,
                              fmt("max rel dev %.2e (limit 1e-3), %.1f s", worst, secs));
    });

    // C7: channel ordering in the loading ratio and first-arrival ordering
    // between point and sphere transmitters.
    h.run("C7", "channel ordering and first arrivals", [&] {
        const ChannelGeometry g5 = geometry_for(5e-6);
        const double t_probe = 1e-3;
        std::vector<double> ns;
        ns.push_back(
            absorbed_closed_form_instantaneous(t_probe, params_for(1.0), g5));
        for (double ratio : {25.0, 100.0, 400.0}) {
            const MatrixParams p = params_for(ratio);
            const std::vector<double> grid = {t_probe};
            const AbsorptionCurve c =
                absorbed_gradual(make_lee_extended_count(p), g5, p, grid);
            ns.push_back(c.cumulative[0]);
        }
        bool ordered = true;
        for (std::size_t i = 1; i < ns.size(); ++i)
            ordered = ordered && ns[i] < ns[i - 1];

        bool arrivals_ok = true;
        std::string arr_detail;
        for (double d : kDistances) {
            const ChannelGeometry g = geometry_for(d);
            PbsConfig pc;
            pc.time_step = kTimeStep;
            pc.horizon = 2e-3;
            pc.molecules_per_run = static_cast<int>(kMolecules);
            pc.realizations = kRealizations;
            pc.rng_seed = 2026;
            pc.record_stride = 50;
            pc.threads = threads;
            const MatrixParams p = params_for(1.0);
            const PbsResult point =
                simulate_channel(p, g, front_zero(), pc, TxMode::point);
            const PbsResult sphere =
                simulate_channel(p, g, front_zero(), pc, TxMode::transparent_sphere);
            auto mean_arrival = [](const PbsResult& r) {
                double s = 0.0;
                int n = 0;
                for (double t : r.first_arrival)
                    if (std::isfinite(t)) {
                        s += t;
                        ++n;
                    }
                return n ? s / n : std::numeric_limits<double>::infinity();
            };
            const double tp = mean_arrival(point);
            const double ts = mean_arrival(sphere);
            arrivals_ok = arrivals_ok && tp > ts;
            arr_detail += fmt("[d=%gum: point %.2e s > sphere %.2e s] ", d * 1e6, tp, ts);
        }
        return std::make_pair(
            ordered && arrivals_ok,
            fmt("N(1e-3 s, d=5um) = {%.2f, %.2f, %.2f, %.2f} %s; %s",
                ns[0], ns[1], ns[2], ns[3],
                ordered ? "strictly decreasing" : "NOT decreasing", arr_detail.c_str()));
    });

    // C8: saturation at t = 10 * t_rel(A/Cs = 1): absorbed counts reach
    // M_inf * r_RX / d within 1% (analytical) and 3 standard errors (PBS).
    h.run("C8", "saturation limits at t = 10 t_rel(1)", [&] {
        const MatrixParams p = params_for(1.0);
        const double t_star = 10.0 * release_time(p);
        bool ok = true;
        std::string detail;
        for (double d : kDistances) {
            const ChannelGeometry g = geometry_for(d);
            const double limit = kMolecules * g.rx_radius / g.center_distance;
            const double analytic =
                absorbed_closed_form_instantaneous(t_star, p, g);
            const bool a_ok = std::abs(analytic - limit) <= 0.01 * limit;

            PbsConfig pc;
            pc.time_step = kTimeStep;
            pc.horizon = t_star;
            pc.molecules_per_run = static_cast<int>(kMolecules);
            pc.realizations = kRealizations;
            pc.rng_seed = 2027;
            pc.record_stride = 50;
            pc.threads = threads;
            const PbsResult pbs =
                simulate_channel(p, g, front_zero(), pc, TxMode::matrix);
            const double mean = pbs.mean_absorbed.back();
            const double se = std::max(pbs.stderr_absorbed.back(), 1e-12);
            const bool p_ok = std::abs(mean - limit) <= 3.0 * se;
            ok = ok && a_ok && p_ok;
            detail += fmt("[d=%gum: analytic %.1f vs %.0f (%s); pbs %.1f (%s)] ",
                          d * 1e6, analytic, limit, a_ok ? "ok" : "off",
                          mean, p_ok ? "ok" : "off");
        }
        return std::make_pair(ok, detail);
    });

    // C9: rate agreement between instantaneous transmitters and rate-support
    // spreading across loading ratios.
    h.run("C9", "absorption-rate spreading properties", [&] {
        const ChannelGeometry g5 = geometry_for(5e-6);
        const MatrixParams p1 = params_for(1.0);

        // clause 1: point vs sphere vs matrix(A/Cs=1) rates at d = 5 um
        const int n = 1600;
        std::vector<double> grid(n);
        for (int i = 0; i < n; ++i) grid[i] = 2.5e-5 * (i + 1);
        AbsorptionCurve point_curve, sphere_curve;
        point_curve.times = sphere_curve.times = grid;
        point_curve.total_molecules = sphere_curve.total_molecules = kMolecules;
        for (double t : grid) {
            point_curve.cumulative.push_back(
                kMolecules * point_hitting_cdf(t, g5, kDiffusivity));
            sphere_curve.cumulative.push_back(
                absorbed_closed_form_instantaneous(t, p1, g5));
        }
        const AbsorptionCurve matrix1_curve =
            absorbed_gradual(make_crank_count(p1), g5, p1, grid);
        const auto rp = absorption_rate(point_curve);
        const auto rs = absorption_rate(sphere_curve);
        const auto rm = absorption_rate(matrix1_curve);
        auto peak = [](const std::vector<double>& v) {
            return *std::max_element(v.begin(), v.end());
        };
        const double pk_p = peak(rp), pk_s = peak(rs), pk_m = peak(rm);
        double worst_rel = 0.0;
        for (int i = 0; i < n; ++i) {
            if (rp[i] > 0.1 * pk_p && rs[i] > 0.1 * pk_s && rm[i] > 0.1 * pk_m) {
                const double hi = std::max({rp[i], rs[i], rm[i]});
                const double lo = std::min({rp[i], rs[i], rm[i]});
                worst_rel = std::max(worst_rel, (hi - lo) / hi);
            }
        }
        const bool clause1 = worst_rel < 0.05;

        // clause 2: support (time above 10% of own peak) ratio 400 vs 25
        auto support = [&](double ratio) {
            const MatrixParams p = params_for(ratio);
            const double span = 0.25;
            const int m = 2500;
            std::vector<double> tg(m);
            for (int i = 0; i < m; ++i) tg[i] = span * (i + 1) / m;
            const AbsorptionCurve c =
                absorbed_gradual(make_lee_extended_count(p), g5, p, tg);
            const auto r = absorption_rate(c);
            const double pk = *std::max_element(r.begin(), r.end());
            double lo = span, hi = 0.0;
            for (int i = 0; i < m; ++i)
                if (r[i] > 0.1 * pk) {
                    lo = std::min(lo, tg[i]);
                    hi = std::max(hi, tg[i]);
                }
            return hi - lo;
        };
        const double w25 = support(25.0);
        const double w400 = support(400.0);
        const double ratio = w400 / w25;
        const bool clause2 = ratio >= 16.0 * 0.7 && ratio <= 16.0 * 1.3;

        return std::make_pair(
            clause1 && clause2,
            fmt("clause1 worst rel dev %.3f (limit 0.05); clause2 support "
                "%.3e/%.3e s, ratio %.2f (want 16 +- 30%%)",
                worst_rel, w400, w25, ratio));
    });

    // C10: byte-identical CSV reruns and per-realization counter invariants.
    h.run("C10", "stochastic reproducibility and counters", [&] {
        const char* config_text = R"json({
          "matrix": {"loading_ratio": 25.0, "radius": "1 um",
                     "diffusivity": 1e-9, "molecules": 2000},
          "geometry": {"rx_radius": "1 um", "distance": "2 um"},
          "models": ["pbs"],
          "time_grid": {"min": "1e-5 s", "max": "2e-3 s", "points": 40, "spacing": "log"},
          "pbs": {"time_step": "1e-6 s", "realizations": 10, "seed": 77,
                  "record_stride": 20}
        })json";
        const ScenarioConfig cfg =
            ScenarioConfig::from_json_text(config_text, "<c10>");
        RunOptions opts;
        opts.threads = threads;
        opts.output_override = "c10_run_a.csv";
        run_channel(cfg, opts);
        opts.output_override = "c10_run_b.csv";
        run_channel(cfg, opts);
        auto slurp = [](const char* path) {
            std::FILE* f = std::fopen(path, "rb");
            std::string s;
            if (!f) return s;
            char buf[4096];
            std::size_t k;
            while ((k = std::fread(buf, 1, sizeof buf, f)) > 0) s.append(buf, k);
            std::fclose(f);
            return s;
        };
        const bool identical = slurp("c10_run_a.csv") == slurp("c10_run_b.csv");
        std::remove("c10_run_a.csv");
        std::remove("c10_run_b.csv");

        // counter invariants on retained traces
        const MatrixParams p = params_for(25.0);
        FdmConfig fc;
        fc.t_end = 1.05 * release_time(p);
        const FdmSolution fdm = solve_moving_boundary(p, fc);
        PbsConfig pc;
        pc.time_step = kTimeStep;
        pc.horizon = 2e-3;
        pc.molecules_per_run = 2000;
        pc.realizations = 10;
        pc.rng_seed = 99;
        pc.record_stride = 10;
        pc.threads = threads;
        pc.keep_realization_traces = true;
        const PbsResult res = simulate_channel(p, geometry_for(2e-6),
                                               front_from_fdm(fdm), pc);
        bool counters_ok = true;
        for (std::size_t r = 0; r < res.released_traces.size(); ++r) {
            const auto& rel = res.released_traces[r];
            const auto& abs = res.absorbed_traces[r];
            for (std::size_t i = 0; i < rel.size(); ++i) {
                if (i > 0 && (rel[i] < rel[i - 1] || abs[i] < abs[i - 1]))
                    counters_ok = false;
                if (abs[i] > rel[i] || rel[i] > pc.molecules_per_run)
                    counters_ok = false;
            }
        }
        return std::make_pair(identical && counters_ok,
                              fmt("reruns %s; counters %s",
                                  identical ? "byte-identical" : "DIFFER",
                                  counters_ok ? "monotone and conserved" : "BROKEN"));
    });

    return h.results;
}

int print_criteria_report(const std::vector<CriterionResult>& results,
                          std::ostream& out) {
    int failures = 0;
    for (const auto& r : results) {
        out << r.id << (r.passed ? "  PASS  " : "  FAIL  ")
            << fmt("%7.1fs  ", r.seconds) << r.description << " -- " << r.detail
            << "\n";
        if (!r.passed) ++failures;
    }
    out << "RESULT: " << (results.size() - failures) << "/" << results.size()
        << " criteria passed\n";
    return failures;
}

}  // namespace matrixtx
