#pragma once

#include <stdexcept>
#include <vector>

#include "matrixtx/types.hpp"

namespace matrixtx {

/// Loading ratios within 1e-6 of 1 make the initial front velocity blow up;
/// the eigenseries model covers that regime instead.
struct RatioTooCloseToOne : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when the step-by-step mass balance residual exceeds 1e-3.
struct StabilityFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FdmConfig {
    int spatial_nodes = 1000;
    double time_step = 0.0;           // 0 -> adaptive from front_cfl
    double front_cfl = 0.01;          // max front travel per step, fraction of shell
    double front_stop_epsilon = 1e-4; // stop front tracking at R = a*eps
    double initial_front_delta = 1e-3;
    double t_end = 0.0;               // 0 -> 1.5 * release_time(params)
    long max_steps = 4000000;
    int min_total_steps = 8000;       // accuracy cap: dt <= t_rel/min_total_steps

    void validate() const;
};

/// Front trajectory and cumulative release of the moving-boundary solve,
/// recorded at the solver's (adaptive) steps.
struct FdmSolution {
    std::vector<double> times;            // s
    std::vector<double> front_radius;     // m; 0 once tracking has stopped
    std::vector<double> release_fraction; // cumulative, dimensionless
    std::vector<double> mass_residual;    // (core+dissolved+released-M)/M
    double total_molecules = 0.0;
    double matrix_radius = 0.0;

    double front_at(double t) const;     // linear interpolation, clamped
    double fraction_at(double t) const;  // linear interpolation, clamped
    double max_abs_residual() const;
};

/// Solves the spherically symmetric dissolution problem with a saturation
/// boundary at the shrinking front and a perfect sink at the surface.
/// Front-fixing (Landau) transformation on w = x*C, implicit diffusion steps,
/// Heun front update from the Stefan flux balance; once the front reaches
/// front_stop_epsilon the residual dissolved mass relaxes on the fixed
/// full-sphere domain.
FdmSolution solve_moving_boundary(const MatrixParams& params,
                                  const FdmConfig& config = {});

}  // namespace matrixtx
