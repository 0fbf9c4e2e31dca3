#include "matrixtx/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "matrixtx/channel.hpp"
#include "matrixtx/csv.hpp"
#include "matrixtx/fdm.hpp"
#include "matrixtx/pbs.hpp"
#include "matrixtx/release_models.hpp"

namespace matrixtx {

namespace {

std::vector<double> build_grid(const TimeGridSpec& g) {
    std::vector<double> t(g.points);
    if (g.log_spacing) {
        const double lmin = std::log(g.min), lmax = std::log(g.max);
        for (int i = 0; i < g.points; ++i)
            t[i] = std::exp(lmin + (lmax - lmin) * i / (g.points - 1));
    } else {
        for (int i = 0; i < g.points; ++i)
            t[i] = g.min + (g.max - g.min) * i / (g.points - 1);
    }
    return t;
}

std::string ratio_label(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", r);
    return buf;
}

std::string column_name(const std::string& base, double ratio, bool multi) {
    return multi ? base + "_r" + ratio_label(ratio) : base;
}

std::vector<double> interp_onto(const std::vector<double>& xs,
                                const std::vector<double>& ys,
                                const std::vector<double>& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        if (t <= xs.front()) {
            out[i] = ys.front();
        } else if (t >= xs.back()) {
            out[i] = ys.back();
        } else {
            const auto it = std::upper_bound(xs.begin(), xs.end(), t);
            const std::size_t j = it - xs.begin();
            const double w = (t - xs[j - 1]) / (xs[j] - xs[j - 1]);
            out[i] = (1.0 - w) * ys[j - 1] + w * ys[j];
        }
    }
    return out;
}

void check_models(const ScenarioConfig& cfg, const std::set<std::string>& applicable,
                  const char* command) {
    for (const auto& m : cfg.models)
        if (!applicable.count(m))
            throw ConfigError("model '" + m + "' is not applicable to '" +
                              std::string(command) + "'");
}

std::string output_path(const ScenarioConfig& cfg, const RunOptions& opts) {
    if (!opts.output_override.empty()) return opts.output_override;
    if (!cfg.output.empty()) return cfg.output;
    throw ConfigError("no output path: set 'output' in the config or pass --output");
}

class RatioCache {
  public:
    RatioCache(const ScenarioConfig& cfg, double horizon)
        : cfg_(cfg), horizon_(horizon) {}

    MatrixParams params(double ratio) const {
        return MatrixParams::from_molecule_count(cfg_.molecules, ratio, cfg_.radius,
                                                 cfg_.diffusivity);
    }

    const FdmSolution& fdm(double ratio) {
        auto it = fdm_.find(ratio);
        if (it == fdm_.end()) {
            FdmConfig fc;
            const MatrixParams p = params(ratio);
            fc.t_end = std::max(horizon_, 1.1 * release_time(p));
            it = fdm_.emplace(ratio, solve_moving_boundary(p, fc)).first;
        }
        return it->second;
    }

    std::function<double(double)> front(double ratio) {
        if (ratio < 1.0 + 1e-6) return front_zero();
        return front_from_fdm(fdm(ratio));
    }

  private:
    const ScenarioConfig& cfg_;
    double horizon_;
    std::map<double, FdmSolution> fdm_;
};

PbsConfig make_pbs_config(const ScenarioConfig& cfg, const RunOptions& opts,
                          double horizon) {
    PbsConfig pc;
    pc.time_step = cfg.pbs.time_step;
    pc.horizon = horizon;
    pc.molecules_per_run = static_cast<int>(cfg.molecules);
    pc.realizations = cfg.pbs.realizations;
    pc.rng_seed = opts.seed.value_or(cfg.pbs.seed);
    pc.record_stride = cfg.pbs.record_stride;
    pc.threads = opts.threads;
    return pc;
}

}  // namespace

void run_release(const ScenarioConfig& cfg, const RunOptions& opts) {
    check_models(cfg, {"lee", "frenning", "crank", "fdm", "pbs"}, "release");
    const std::string path = output_path(cfg, opts);
    const auto grid = build_grid(cfg.grid);
    const bool multi = cfg.loading_ratios.size() > 1;
    const bool degenerate = cfg.molecules == 0.0;

    CsvTable table;
    table.add_column("time_s", grid);
    {
        std::vector<double> ntime(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            ntime[i] = cfg.diffusivity * grid[i] / (cfg.radius * cfg.radius);
        table.add_column("normalized_time", ntime);
    }
    const std::vector<double> zeros(grid.size(), 0.0);
    RatioCache cache(cfg, grid.back());

    for (const auto& model : cfg.models) {
        for (double ratio : cfg.loading_ratios) {
            if (degenerate) {
                table.add_column(column_name(model, ratio, multi), zeros);
                if (model == "pbs")
                    table.add_column(column_name(model + "_stderr", ratio, multi), zeros);
                continue;
            }
            const MatrixParams p = cache.params(ratio);
            std::vector<double> col(grid.size());
            if (model == "lee") {
                assert_lee_time_monotone(p);
                for (std::size_t i = 0; i < grid.size(); ++i)
                    col[i] = lee_release_fraction_at_time(grid[i], p);
            } else if (model == "frenning") {
                const double t_rel = release_time(p);
                for (std::size_t i = 0; i < grid.size(); ++i)
                    col[i] = grid[i] >= t_rel ? 1.0
                                              : frenning_release_fraction(grid[i], p);
            } else if (model == "crank") {
                for (std::size_t i = 0; i < grid.size(); ++i)
                    col[i] = crank_release_fraction(grid[i], p);
            } else if (model == "fdm") {
                const FdmSolution& sol = cache.fdm(ratio);
                for (std::size_t i = 0; i < grid.size(); ++i)
                    col[i] = sol.fraction_at(grid[i]);
            } else if (model == "pbs") {
                const PbsConfig pc = make_pbs_config(cfg, opts, grid.back());
                const PbsResult res = simulate_release(p, cache.front(ratio), pc);
                std::vector<double> frac(res.times.size()), se(res.times.size());
                for (std::size_t i = 0; i < res.times.size(); ++i) {
                    frac[i] = res.mean_released[i] / cfg.molecules;
                    se[i] = res.stderr_released[i] / cfg.molecules;
                }
                col = interp_onto(res.times, frac, grid);
                table.add_column(column_name(model, ratio, multi), col);
                table.add_column(column_name(model + "_stderr", ratio, multi),
                                 interp_onto(res.times, se, grid));
                continue;
            }
            table.add_column(column_name(model, ratio, multi), col);
        }
    }
    table.write(path);
}

namespace {

struct NamedColumn {
    std::string name;
    std::vector<double> values;
    bool is_stderr = false;
};

// Shared by the channel and rate commands: absorbed-count columns.
std::vector<NamedColumn> build_channel_columns(const ScenarioConfig& cfg,
                                               const RunOptions& opts,
                                               const std::vector<double>& grid) {
    if (!cfg.has_geometry)
        throw ConfigError("channel experiments need a 'geometry' section");
    const ChannelGeometry geom{cfg.radius, cfg.rx_radius, cfg.distance};
    geom.validate();
    const bool multi = cfg.loading_ratios.size() > 1;
    const bool degenerate = cfg.molecules == 0.0;
    const std::vector<double> zeros(grid.size(), 0.0);
    RatioCache cache(cfg, grid.back());
    std::vector<NamedColumn> out;

    for (const auto& model : cfg.models) {
        if (model == "point" || model == "closed_form") {
            const std::string name =
                model == "point" ? "N_point" : "N_sphere_closed_form";
            if (degenerate) {
                out.push_back({name, zeros, false});
                continue;
            }
            const MatrixParams p = cache.params(cfg.loading_ratios.front());
            std::vector<double> col(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i)
                col[i] = model == "point"
                             ? cfg.molecules * point_hitting_cdf(grid[i], geom,
                                                                 cfg.diffusivity)
                             : absorbed_closed_form_instantaneous(grid[i], p, geom);
            out.push_back({name, std::move(col), false});
            continue;
        }
        for (double ratio : cfg.loading_ratios) {
            if (degenerate) {
                out.push_back({column_name(model == "pbs" ? "N_pbs" : "N_matrix",
                                           ratio, multi),
                               zeros, false});
                if (model == "pbs")
                    out.push_back({column_name("N_pbs_stderr", ratio, multi), zeros, true});
                continue;
            }
            const MatrixParams p = cache.params(ratio);
            if (model == "convolution") {
                const auto released = ratio < 1.0 + 1e-6
                                          ? make_crank_count(p)
                                          : make_lee_extended_count(p);
                const AbsorptionCurve curve = absorbed_gradual(released, geom, p, grid);
                out.push_back({column_name("N_matrix", ratio, multi), curve.cumulative,
                               false});
            } else if (model == "pbs") {
                const PbsConfig pc = make_pbs_config(cfg, opts, grid.back());
                const PbsResult res =
                    simulate_channel(p, geom, cache.front(ratio), pc, TxMode::matrix);
                out.push_back({column_name("N_pbs", ratio, multi),
                               interp_onto(res.times, res.mean_absorbed, grid), false});
                out.push_back({column_name("N_pbs_stderr", ratio, multi),
                               interp_onto(res.times, res.stderr_absorbed, grid), true});
            }
        }
    }
    return out;
}

CsvTable grid_table(const ScenarioConfig& cfg, const std::vector<double>& grid) {
    CsvTable table;
    table.add_column("time_s", grid);
    std::vector<double> ntime(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        ntime[i] = cfg.diffusivity * grid[i] / (cfg.radius * cfg.radius);
    table.add_column("normalized_time", ntime);
    return table;
}

}  // namespace

void run_channel(const ScenarioConfig& cfg, const RunOptions& opts) {
    check_models(cfg, {"point", "closed_form", "convolution", "pbs"}, "channel");
    const std::string path = output_path(cfg, opts);
    const auto grid = build_grid(cfg.grid);
    CsvTable table = grid_table(cfg, grid);
    for (auto& col : build_channel_columns(cfg, opts, grid))
        table.add_column(col.name, std::move(col.values));
    table.write(path);
}

void run_rate(const ScenarioConfig& cfg, const RunOptions& opts) {
    check_models(cfg, {"point", "closed_form", "convolution", "pbs"}, "rate");
    if (cfg.grid.log_spacing)
        throw ConfigError("rate experiments need a uniform (linear) time grid");
    const std::string path = output_path(cfg, opts);
    const auto grid = build_grid(cfg.grid);
    CsvTable table = grid_table(cfg, grid);
    for (auto& col : build_channel_columns(cfg, opts, grid)) {
        if (col.is_stderr) continue;  // rates of noise bands are not meaningful
        AbsorptionCurve curve;
        curve.times = grid;
        curve.cumulative = std::move(col.values);
        curve.total_molecules = cfg.molecules;
        std::string name = col.name;
        if (name.rfind("N_", 0) == 0) name = name.substr(2);
        table.add_column("rate_" + name, absorption_rate(curve));
    }
    table.write(path);
}

}  // namespace matrixtx
