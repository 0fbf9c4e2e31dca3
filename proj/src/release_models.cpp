#include "matrixtx/release_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace matrixtx {

namespace {

constexpr double kRadicandTol = 1e-12;
constexpr double kArccosTol = 1e-9;
constexpr int kMonotoneGridPoints = 10001;

void check_delta(double delta) {
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::domain_error("lee model: delta outside [0, 1]");
}

void check_ratio(double ratio) {
    if (!(ratio >= 1.0))
        throw std::domain_error("lee model: loading ratio must be >= 1");
}

}  // namespace

LeeCoefficients lee_coefficients(double delta, double loading_ratio) {
    check_delta(delta);
    check_ratio(loading_ratio);
    LeeCoefficients c;
    c.lambda = 1.0 - (1.0 - loading_ratio) * (1.0 - delta);
    double radicand = c.lambda * c.lambda - 1.0;
    if (radicand < -kRadicandTol)
        throw std::domain_error("lee_coefficients: radicand lambda^2-1 = " +
                                std::to_string(radicand) + " below tolerance");
    if (radicand < 0.0) radicand = 0.0;
    // a3 = lambda - sqrt(lambda^2-1), evaluated in the cancellation-free form.
    c.a3 = 1.0 / (c.lambda + std::sqrt(radicand));
    c.a2 = -c.a3 - 1.0;
    return c;
}

double lee_release_fraction(double delta, double loading_ratio) {
    const LeeCoefficients c = lee_coefficients(delta, loading_ratio);
    const double cs_over_a = 1.0 / loading_ratio;
    const double shell = 1.0 - (1.0 - delta) * (1.0 - delta) * (1.0 - delta);
    const double inner = (c.a1 + c.a2 / 2.0 + c.a3 / 3.0) -
                         (c.a1 / 2.0 + c.a2 / 3.0 + c.a3 / 4.0) * delta;
    return shell * (1.0 - cs_over_a) + 3.0 * delta * cs_over_a * inner;
}

double lee_time_of_front(double delta, const MatrixParams& params) {
    params.validate();
    const double r = params.loading_ratio();
    const LeeCoefficients c = lee_coefficients(delta, r);
    const double tau = (6.0 * r - 4.0 - c.a3) * delta * delta / 12.0 -
                       (r - 1.0) * delta * delta * delta / 3.0;
    return params.radius * params.radius / params.diffusivity * tau;
}

double release_time(const MatrixParams& params) {
    params.validate();
    const double r = params.loading_ratio();
    return params.radius * params.radius / params.diffusivity * (r / 6.0 - 1.0 / 12.0);
}

void assert_lee_time_monotone(const MatrixParams& params) {
    double prev = 0.0;
    for (int i = 1; i < kMonotoneGridPoints; ++i) {
        const double delta = static_cast<double>(i) / (kMonotoneGridPoints - 1);
        const double t = lee_time_of_front(delta, params);
        if (!(t > prev))
            throw std::runtime_error(
                "lee model: t(delta) not strictly increasing at delta = " +
                std::to_string(delta));
        prev = t;
    }
}

double lee_delta_at_time(double t, const MatrixParams& params) {
    const double t_rel = release_time(params);
    if (!(t >= 0.0) || t > t_rel * (1.0 + 1e-12))
        throw std::domain_error("lee_delta_at_time: t outside [0, t_rel]");
    if (t == 0.0) return 0.0;
    if (t >= t_rel) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double tm = lee_time_of_front(mid, params);
        if (std::abs(tm - t) <= 1e-12 * t_rel) return mid;
        (tm < t ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double lee_release_fraction_at_time(double t, const MatrixParams& params) {
    if (!(t >= 0.0)) throw std::domain_error("lee release: t must be >= 0");
    if (t >= release_time(params)) return 1.0;
    return lee_release_fraction(lee_delta_at_time(t, params), params.loading_ratio());
}

ReleaseCurve lee_release_curve(const MatrixParams& params,
                               std::span<const double> time_grid) {
    params.validate();
    assert_lee_time_monotone(params);
    ReleaseCurve curve;
    curve.total_molecules = params.total_molecules;
    curve.times.assign(time_grid.begin(), time_grid.end());
    curve.fraction.reserve(curve.times.size());
    double prev = -1.0;
    for (double t : curve.times) {
        if (!(t >= 0.0) || t <= prev)
            throw std::invalid_argument(
                "lee_release_curve: time grid must be strictly increasing and >= 0");
        prev = t;
        curve.fraction.push_back(lee_release_fraction_at_time(t, params));
    }
    curve.validate();
    return curve;
}

double frenning_release_time(const MatrixParams& params) {
    params.validate();
    return params.radius * params.radius * params.loading_ratio() /
           (6.0 * params.diffusivity);
}

double frenning_front_position(double t, const MatrixParams& params) {
    const double t_end = frenning_release_time(params);
    if (!(t >= 0.0) || t > t_end * (1.0 + 1e-9))
        throw std::domain_error("frenning front: t outside [0, a^2 A/(6 D Cs)]");
    const double r = params.loading_ratio();
    const double tau = params.diffusivity * t / (params.radius * params.radius);
    double arg = 12.0 * tau / r - 1.0;
    if (arg > 1.0 + kArccosTol || arg < -1.0 - kArccosTol)
        throw std::domain_error("frenning front: arccos argument outside [-1, 1]");
    arg = std::clamp(arg, -1.0, 1.0);
    const double cs3a = 1.0 / (3.0 * r);
    const double rho = 0.5 * (1.0 - cs3a) +
                       (1.0 + cs3a) * std::cos((std::acos(arg) + 4.0 * M_PI) / 3.0);
    // the exact terminal root is -Cs/(3A); negative radii are unphysical
    return std::clamp(rho, 0.0, 1.0);
}

double frenning_release_fraction(double t, const MatrixParams& params) {
    const double rho = frenning_front_position(t, params);
    const double cs_over_a = 1.0 / params.loading_ratio();
    const double f = 1.0 - rho * rho * rho +
                     0.5 * cs_over_a * (2.0 * rho * rho * rho - rho * rho - rho);
    return std::clamp(f, 0.0, 1.0);
}

double crank_release_fraction(double t, const MatrixParams& params,
                              double rel_tol) {
    params.validate();
    if (!(t >= 0.0)) throw std::domain_error("crank series: t must be >= 0");
    if (!(rel_tol > 0.0)) throw std::domain_error("crank series: rel_tol must be > 0");
    if (t == 0.0) return 0.0;  // Basel sum; exact without summation
    const double tau = params.diffusivity * t / (params.radius * params.radius);
    if (tau <= 1e-4) {
        // The eigenseries needs O(1/sqrt(tau)) terms here; the image-sum form
        // 6 sqrt(tau/pi) - 3 tau is exact to machine precision for tau <= 1e-4
        // (remaining image terms carry exp(-1/tau) factors).
        return 6.0 * std::sqrt(tau / M_PI) - 3.0 * tau;
    }
    const double gamma1 =
        params.diffusivity * M_PI * M_PI / (params.radius * params.radius);
    double sum = 0.0;
    constexpr int kMaxTerms = 10000;
    for (int n = 1; n <= kMaxTerms; ++n) {
        const double term = std::exp(-gamma1 * n * n * t) / (double(n) * n);
        sum += term;
        const double next = std::exp(-gamma1 * (n + 1.0) * (n + 1.0) * t) /
                            ((n + 1.0) * (n + 1.0));
        if (next < rel_tol * sum) {
            const double f = 1.0 - 6.0 / (M_PI * M_PI) * sum;
            return std::clamp(f, 0.0, 1.0);
        }
    }
    throw std::runtime_error("crank series: no convergence within 10^4 terms");
}

double extended_release(double t, const std::function<double(double)>& base_count,
                        const MatrixParams& params) {
    if (!(t >= 0.0)) throw std::domain_error("extended_release: t must be >= 0");
    if (t >= release_time(params)) return params.total_molecules;
    return base_count(t);
}

std::function<double(double)> make_lee_extended_count(const MatrixParams& params) {
    params.validate();
    assert_lee_time_monotone(params);
    const double t_rel = release_time(params);
    return [params, t_rel](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= t_rel) return params.total_molecules;
        return params.total_molecules * lee_release_fraction_at_time(t, params);
    };
}

std::function<double(double)> make_crank_count(const MatrixParams& params,
                                               double rel_tol) {
    params.validate();
    return [params, rel_tol](double t) {
        if (t <= 0.0) return 0.0;
        return params.total_molecules * crank_release_fraction(t, params, rel_tol);
    };
}

}  // namespace matrixtx
