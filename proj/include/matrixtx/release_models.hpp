#pragma once

#include <functional>
#include <span>

#include "matrixtx/types.hpp"

namespace matrixtx {

/// Coefficients of the heat-balance-integral (Lee) release model at a given
/// normalized front depth delta and loading ratio A/Cs.
struct LeeCoefficients {
    double a1 = 1.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double lambda = 0.0;
};

/// delta in [0,1], loading_ratio >= 1. Throws std::domain_error when the
/// radicand lambda^2-1 falls below -1e-12; values in [-1e-12, 0) clamp to 0.
LeeCoefficients lee_coefficients(double delta, double loading_ratio);

/// Released fraction M(delta)/M_inf of the Lee model; in [0, 1].
double lee_release_fraction(double delta, double loading_ratio);

/// Time at which the Lee front reaches the given normalized depth.
double lee_time_of_front(double delta, const MatrixParams& params);

/// Total release duration: t_rel = (a^2/D) * (A/(6 Cs) - 1/12).
double release_time(const MatrixParams& params);

/// Inverts the Lee time-front relation for delta by bisection (relative time
/// tolerance 1e-12). Requires 0 <= t <= release_time.
double lee_delta_at_time(double t, const MatrixParams& params);

/// Verifies strict monotonicity of t(delta) on a 10^4-point grid; throws
/// std::runtime_error on failure instead of silently interpolating.
void assert_lee_time_monotone(const MatrixParams& params);

/// Lee released fraction as a function of time, extended with the exact
/// value 1 for t > t_rel (the raw model ends at 1 - Cs/(4A); the extension
/// keeps the documented jump).
double lee_release_fraction_at_time(double t, const MatrixParams& params);

/// Evaluates the Lee model on a strictly increasing, non-negative time grid.
ReleaseCurve lee_release_curve(const MatrixParams& params,
                               std::span<const double> time_grid);

/// Front position R/a of the explicit large-ratio (Frenning) model.
/// Valid for t in [0, a^2 A/(6 D Cs)] (the simplified front's vanishing
/// time); the arccos argument is clamped to [-1,1] within 1e-9 and the
/// slightly negative terminal root is clamped to 0.
double frenning_front_position(double t, const MatrixParams& params);

/// Released fraction of the explicit large-ratio model; in [0, 1].
double frenning_release_fraction(double t, const MatrixParams& params);

/// Release time of the simplified (Frenning) front: a^2 A / (6 D Cs).
/// Slightly later than release_time(); the two coincide as A/Cs -> infinity.
double frenning_release_time(const MatrixParams& params);

/// Eigenseries released fraction for the instantaneous case A/Cs = 1.
/// Truncates once the next term falls below rel_tol times the partial sum;
/// throws std::runtime_error if 10^4 terms do not converge.
double crank_release_fraction(double t, const MatrixParams& params,
                              double rel_tol = 1e-10);

/// Released molecule count clipped to M_inf for t >= release duration
/// (unit step convention: the step is active at exactly t = t_rel).
/// base_count must return a count in molecules for t in [0, t_rel).
double extended_release(double t, const std::function<double(double)>& base_count,
                        const MatrixParams& params);

/// Convenience evaluator: extended Lee released count as a function of time.
std::function<double(double)> make_lee_extended_count(const MatrixParams& params);

/// Convenience evaluator: eigenseries released count (no clipping needed;
/// the series approaches M_inf smoothly).
std::function<double(double)> make_crank_count(const MatrixParams& params,
                                               double rel_tol = 1e-10);

}  // namespace matrixtx
