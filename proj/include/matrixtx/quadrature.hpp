#pragma once

#include <functional>

namespace matrixtx {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

/// Adaptive composite 15-point Gauss-Legendre integration. Panels are halved
/// until the whole-vs-halves difference drops below the per-panel share of
/// the tolerance; the accumulated differences form the error estimate.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    double rel_tol = 1e-10,
                                    double abs_tol = 0.0,
                                    int max_depth = 48);

}  // namespace matrixtx
