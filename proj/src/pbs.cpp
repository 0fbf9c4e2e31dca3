#include "matrixtx/pbs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace matrixtx {

void PbsConfig::validate() const {
    if (!(time_step > 0.0))
        throw std::invalid_argument("PbsConfig: time_step must be > 0");
    if (molecules_per_run < 1)
        throw std::invalid_argument("PbsConfig: molecules_per_run must be >= 1");
    if (realizations < 1)
        throw std::invalid_argument("PbsConfig: realizations must be >= 1");
    if (record_stride < 1)
        throw std::invalid_argument("PbsConfig: record_stride must be >= 1");
    if (max_steps == 0 && !(horizon > 0.0))
        throw std::invalid_argument("PbsConfig: need horizon or max_steps");
    if (max_steps > 0 && horizon > 0.0 && max_steps * time_step < horizon * (1.0 - 1e-12))
        throw std::invalid_argument(
            "PbsConfig: max_steps * time_step shorter than the requested horizon");
}

long PbsConfig::step_count() const {
    if (max_steps > 0) return max_steps;
    return static_cast<long>(std::ceil(horizon / time_step - 1e-9));
}

std::array<double, 3> sample_uniform_in_sphere(Xoshiro256pp& rng, double radius) {
    if (!(radius > 0.0))
        throw std::invalid_argument("sample_uniform_in_sphere: radius must be > 0");
    const double r = radius * std::cbrt(rng.uniform());
    const double cos_theta = 2.0 * rng.uniform() - 1.0;
    const double sin_theta = std::sqrt(1.0 - cos_theta * cos_theta);
    const double phi = 2.0 * M_PI * rng.uniform();
    return {r * sin_theta * std::cos(phi), r * sin_theta * std::sin(phi),
            r * cos_theta};
}

std::function<double(double)> front_from_fdm(const FdmSolution& solution) {
    return [solution](double t) { return solution.front_at(t); };
}

std::function<double(double)> front_zero() {
    return [](double) { return 0.0; };
}

namespace {

struct RealizationTrace {
    std::vector<double> released;
    std::vector<double> absorbed;
    double first_arrival = std::numeric_limits<double>::infinity();
};

struct RunSetup {
    const MatrixParams* params;
    const ChannelGeometry* geom;  // nullptr in release-only mode
    const std::function<double(double)>* front;
    const PbsConfig* config;
    TxMode mode;
    bool channel;
};

// One realization of Brownian molecules with front-gated mobility.
RealizationTrace run_realization(const RunSetup& run, Xoshiro256pp rng) {
    const PbsConfig& cfg = *run.config;
    const MatrixParams& p = *run.params;
    const long K = cfg.step_count();
    const double dt = cfg.time_step;
    const double sigma = std::sqrt(2.0 * p.diffusivity * dt);
    const double a = p.radius;
    const double a2 = a * a;
    const int M = cfg.molecules_per_run;

    const bool matrix_mode = run.mode == TxMode::matrix;
    double rx_cx = 0.0, rx_r2 = 0.0;
    if (run.channel) {
        rx_cx = run.geom->center_distance;
        rx_r2 = run.geom->rx_radius * run.geom->rx_radius;
    }

    std::vector<double> xs(M), ys(M), zs(M);
    std::vector<int> order(M);  // molecule ids sorted by initial radius, desc
    if (run.mode == TxMode::point) {
        // all molecules start at the transmitter center
        std::fill(xs.begin(), xs.end(), 0.0);
        std::fill(ys.begin(), ys.end(), 0.0);
        std::fill(zs.begin(), zs.end(), 0.0);
    } else {
        for (int m = 0; m < M; ++m) {
            const auto pos = sample_uniform_in_sphere(rng, a);
            xs[m] = pos[0];
            ys[m] = pos[1];
            zs[m] = pos[2];
        }
    }
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> d0(M);
    for (int m = 0; m < M; ++m)
        d0[m] = xs[m] * xs[m] + ys[m] * ys[m] + zs[m] * zs[m];
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return d0[i] > d0[j]; });

    std::vector<int> inside;   // activated, not yet released
    std::vector<int> free_mol; // released and still diffusing (channel mode)
    inside.reserve(M);
    if (matrix_mode) {
        free_mol.reserve(M);
    } else {
        // instantaneous release: every molecule is in the medium from t = 0
        free_mol = order;
    }

    long released = matrix_mode ? 0 : M;
    long absorbed = 0;
    std::size_t next_immobile = 0;

    RealizationTrace trace;
    const long records = K / cfg.record_stride + 1;
    trace.released.reserve(records + 1);
    trace.absorbed.reserve(records + 1);
    trace.released.push_back(static_cast<double>(released));
    trace.absorbed.push_back(0.0);

    for (long k = 1; k <= K; ++k) {
        const double t = k * dt;
        if (matrix_mode) {
            const double R = (*run.front)(t);
            const double R2 = R * R;
            while (next_immobile < order.size() &&
                   d0[order[next_immobile]] >= R2) {
                inside.push_back(order[next_immobile]);
                ++next_immobile;
            }
            for (std::size_t i = inside.size(); i-- > 0;) {
                const int m = inside[i];
                const double nx = xs[m] + sigma * rng.normal();
                const double ny = ys[m] + sigma * rng.normal();
                const double nz = zs[m] + sigma * rng.normal();
                const double nd2 = nx * nx + ny * ny + nz * nz;
                if (nd2 < R2) continue;  // step into the core rejected
                xs[m] = nx;
                ys[m] = ny;
                zs[m] = nz;
                if (nd2 >= a2) {
                    ++released;
                    inside[i] = inside.back();
                    inside.pop_back();
                    if (run.channel) free_mol.push_back(m);
                }
            }
        }
        if (run.channel) {
            for (std::size_t i = free_mol.size(); i-- > 0;) {
                const int m = free_mol[i];
                xs[m] += sigma * rng.normal();
                ys[m] += sigma * rng.normal();
                zs[m] += sigma * rng.normal();
                const double dx = xs[m] - rx_cx;
                const double r2 = dx * dx + ys[m] * ys[m] + zs[m] * zs[m];
                if (r2 <= rx_r2) {
                    ++absorbed;
                    if (t < trace.first_arrival) trace.first_arrival = t;
                    free_mol[i] = free_mol.back();
                    free_mol.pop_back();
                }
            }
        }
        if (k % cfg.record_stride == 0 || k == K) {
            trace.released.push_back(static_cast<double>(released));
            trace.absorbed.push_back(static_cast<double>(absorbed));
        }
    }
    return trace;
}

PbsResult run_ensemble(const RunSetup& run) {
    const PbsConfig& cfg = *run.config;
    cfg.validate();
    run.params->validate();
    if (run.channel) run.geom->validate();

    const long K = cfg.step_count();
    PbsResult result;
    result.molecules_per_run = cfg.molecules_per_run;
    result.realizations = cfg.realizations;
    result.times.push_back(0.0);
    for (long k = cfg.record_stride; k <= K; k += cfg.record_stride)
        result.times.push_back(k * cfg.time_step);
    if (K % cfg.record_stride != 0) result.times.push_back(K * cfg.time_step);

    // jump-separated substreams: realization r gets the master state advanced
    // by r jumps of 2^128 draws
    std::vector<RealizationTrace> traces(cfg.realizations);
    Xoshiro256pp master(cfg.rng_seed);
    std::vector<Xoshiro256pp> streams;
    streams.reserve(cfg.realizations);
    for (int r = 0; r < cfg.realizations; ++r) {
        streams.push_back(master);
        master.jump();
    }

    int n_threads = cfg.threads > 0
                        ? cfg.threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, cfg.realizations));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= cfg.realizations) break;
            traces[r] = run_realization(run, streams[r]);
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    const std::size_t T = result.times.size();
    result.mean_released.assign(T, 0.0);
    result.stderr_released.assign(T, 0.0);
    result.mean_absorbed.assign(T, 0.0);
    result.stderr_absorbed.assign(T, 0.0);
    for (const auto& tr : traces) {
        if (tr.released.size() != T)
            throw std::logic_error("pbs: trace length mismatch");
        for (std::size_t i = 0; i < T; ++i) {
            result.mean_released[i] += tr.released[i];
            result.mean_absorbed[i] += tr.absorbed[i];
        }
        result.first_arrival.push_back(tr.first_arrival);
    }
    const double R = cfg.realizations;
    for (std::size_t i = 0; i < T; ++i) {
        result.mean_released[i] /= R;
        result.mean_absorbed[i] /= R;
    }
    if (cfg.realizations > 1) {
        for (const auto& tr : traces) {
            for (std::size_t i = 0; i < T; ++i) {
                const double dr = tr.released[i] - result.mean_released[i];
                const double da = tr.absorbed[i] - result.mean_absorbed[i];
                result.stderr_released[i] += dr * dr;
                result.stderr_absorbed[i] += da * da;
            }
        }
        for (std::size_t i = 0; i < T; ++i) {
            result.stderr_released[i] =
                std::sqrt(result.stderr_released[i] / (R - 1.0) / R);
            result.stderr_absorbed[i] =
                std::sqrt(result.stderr_absorbed[i] / (R - 1.0) / R);
        }
    }
    if (cfg.keep_realization_traces) {
        for (auto& tr : traces) {
            result.released_traces.push_back(std::move(tr.released));
            result.absorbed_traces.push_back(std::move(tr.absorbed));
        }
    }
    return result;
}

}  // namespace

PbsResult simulate_release(const MatrixParams& params,
                           const std::function<double(double)>& front,
                           const PbsConfig& config) {
    RunSetup run{&params, nullptr, &front, &config, TxMode::matrix, false};
    return run_ensemble(run);
}

PbsResult simulate_channel(const MatrixParams& params,
                           const ChannelGeometry& geom,
                           const std::function<double(double)>& front,
                           const PbsConfig& config, TxMode mode) {
    RunSetup run{&params, &geom, &front, &config, mode, true};
    return run_ensemble(run);
}

}  // namespace matrixtx
