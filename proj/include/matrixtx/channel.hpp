#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "matrixtx/types.hpp"

namespace matrixtx {

struct QuadratureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Transmitter/receiver spheres in an unbounded medium. Touching spheres
/// (d = a + r_RX) are allowed.
struct ChannelGeometry {
    double tx_radius = 0.0;       // a, m
    double rx_radius = 0.0;       // r_RX, m
    double center_distance = 0.0; // d, m

    void validate() const;
};

/// Exponents and surface density of the surface-release hitting kernel.
struct HittingKernelParams {
    double beta1 = 0.0;  // (d - a - r_RX)^2 / (4D), s
    double beta2 = 0.0;  // (d + a - r_RX)^2 / (4D), s
    double rho = 0.0;    // 1 / (4 pi a^2), m^-2

    static HittingKernelParams from_geometry(const ChannelGeometry& g,
                                             double diffusivity);
};

/// Cumulative molecules absorbed at the receiver over a time grid.
struct AbsorptionCurve {
    std::vector<double> times;       // s
    std::vector<double> cumulative;  // molecules
    double total_molecules = 0.0;

    void validate() const;
};

/// First-hitting rate p_s(t) for molecules released uniformly from the
/// transmitter surface at t = 0. Returns 0 for t <= 0 (continuity
/// convention); integrates to r_RX/d over (0, inf).
double surface_hitting_density(double t, const ChannelGeometry& geom,
                               double diffusivity);

/// Hitting probability by time t for a point release at the transmitter
/// center: (r_RX/d) * erfc((d - r_RX)/sqrt(4 D t)).
double point_hitting_cdf(double t, const ChannelGeometry& geom,
                         double diffusivity);

/// Absorbed molecules N(t) for a gradual release: convolution of the surface
/// hitting kernel with the released-count history. The sqrt(t-xi)
/// substitution removes the kernel spike at xi -> t (present when beta1 = 0)
/// and panels are split at the release-completion kink. Throws
/// QuadratureFailure if the error estimate exceeds 1e-4 * M_inf * r_RX/d.
AbsorptionCurve absorbed_gradual(const std::function<double(double)>& released_count,
                                 const ChannelGeometry& geom,
                                 const MatrixParams& params,
                                 std::span<const double> time_grid);

/// Closed-form absorbed count for the instantaneous (A/Cs = 1) release.
/// The eigenseries factors are evaluated through the Faddeeva function,
/// which keeps every term bounded (no overflowing erfc products).
double absorbed_closed_form_instantaneous(double t, const MatrixParams& params,
                                          const ChannelGeometry& geom,
                                          double rel_tol = 1e-10);

/// Time derivative of an absorption curve on a uniform grid: central
/// differences inside, one-sided second order at the ends; differencing
/// noise in (-eps, 0) clamps to 0. Throws on non-uniform grids.
std::vector<double> absorption_rate(const AbsorptionCurve& curve);

}  // namespace matrixtx
