#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "matrixtx/channel.hpp"
#include "matrixtx/fdm.hpp"
#include "matrixtx/rng.hpp"
#include "matrixtx/types.hpp"

namespace matrixtx {

/// Initial condition / release semantics of the transmitter.
enum class TxMode {
    matrix,             // uniform fill, molecules mobile once the front passes
    transparent_sphere, // uniform fill, all mobile and released at t = 0
    point,              // all molecules at the center, released at t = 0
};

struct PbsConfig {
    double time_step = 1e-6;   // s
    long max_steps = 0;        // K; 0 derives K from horizon
    double horizon = 0.0;      // s; required when max_steps == 0
    int molecules_per_run = 10000;
    int realizations = 100;
    std::uint64_t rng_seed = 1;
    int record_stride = 1;     // steps between recorded samples
    int threads = 0;           // 0 -> hardware concurrency
    bool keep_realization_traces = false;

    void validate() const;
    long step_count() const;
};

struct PbsResult {
    std::vector<double> times;
    std::vector<double> mean_released;
    std::vector<double> stderr_released;
    std::vector<double> mean_absorbed;   // all zero in release-only runs
    std::vector<double> stderr_absorbed;
    /// First time a realization had absorbed >= 1 (infinity if never).
    std::vector<double> first_arrival;
    /// Per-realization counts at the recorded times; filled only when
    /// keep_realization_traces is set.
    std::vector<std::vector<double>> released_traces;
    std::vector<std::vector<double>> absorbed_traces;
    double molecules_per_run = 0.0;
    int realizations = 0;
};

/// Position uniformly distributed in a ball: radius scales as U^(1/3) with an
/// isotropic direction.
std::array<double, 3> sample_uniform_in_sphere(Xoshiro256pp& rng, double radius);

/// Front evaluator helpers.
std::function<double(double)> front_from_fdm(const FdmSolution& solution);
std::function<double(double)> front_zero();

/// Release from the matrix; a molecule moves only once the front has passed
/// it, a step into the undissolved core is rejected (the molecule keeps its
/// previous position), and a molecule reaching d >= a is counted as released
/// and frozen. Realizations run on independent jump-separated RNG substreams
/// and are averaged.
PbsResult simulate_release(const MatrixParams& params,
                           const std::function<double(double)>& front,
                           const PbsConfig& config);

/// Full chain: release per the matrix rules, then free Brownian motion in
/// the unbounded medium (the transmitter does not impede diffusion); a
/// molecule ending a step within the receiver sphere is absorbed and removed.
PbsResult simulate_channel(const MatrixParams& params,
                           const ChannelGeometry& geom,
                           const std::function<double(double)>& front,
                           const PbsConfig& config,
                           TxMode mode = TxMode::matrix);

}  // namespace matrixtx
