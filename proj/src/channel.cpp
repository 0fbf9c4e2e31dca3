#include "matrixtx/channel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "matrixtx/quadrature.hpp"
#include "matrixtx/release_models.hpp"
#include "matrixtx/special.hpp"

namespace matrixtx {

void ChannelGeometry::validate() const {
    if (!(tx_radius > 0.0) || !(rx_radius > 0.0))
        throw std::invalid_argument("ChannelGeometry: radii must be > 0");
    if (!(center_distance >= tx_radius + rx_radius))
        throw std::invalid_argument(
            "ChannelGeometry: spheres overlap (d < a + r_RX)");
}

HittingKernelParams HittingKernelParams::from_geometry(const ChannelGeometry& g,
                                                       double diffusivity) {
    g.validate();
    if (!(diffusivity > 0.0))
        throw std::invalid_argument("HittingKernelParams: diffusivity must be > 0");
    HittingKernelParams k;
    const double gap = g.center_distance - g.tx_radius - g.rx_radius;
    const double far = g.center_distance + g.tx_radius - g.rx_radius;
    k.beta1 = gap * gap / (4.0 * diffusivity);
    k.beta2 = far * far / (4.0 * diffusivity);
    k.rho = 1.0 / (4.0 * M_PI * g.tx_radius * g.tx_radius);
    return k;
}

void AbsorptionCurve::validate() const {
    if (times.size() != cumulative.size())
        throw std::invalid_argument("AbsorptionCurve: size mismatch");
    const double eps = 1e-9 * std::max(total_molecules, 1.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::invalid_argument("AbsorptionCurve: times not increasing");
        if (cumulative[i] < -eps ||
            (i > 0 && cumulative[i] < cumulative[i - 1] - eps))
            throw std::invalid_argument("AbsorptionCurve: cumulative count decreases");
        if (cumulative[i] > total_molecules * (1.0 + 1e-6))
            throw std::invalid_argument("AbsorptionCurve: count exceeds M_inf");
    }
}

double surface_hitting_density(double t, const ChannelGeometry& geom,
                               double diffusivity) {
    if (t <= 0.0) return 0.0;
    const HittingKernelParams k = HittingKernelParams::from_geometry(geom, diffusivity);
    const double pref = 2.0 * k.rho * geom.tx_radius * geom.rx_radius /
                        geom.center_distance;
    return pref * std::sqrt(M_PI * diffusivity / t) *
           (std::exp(-k.beta1 / t) - std::exp(-k.beta2 / t));
}

double point_hitting_cdf(double t, const ChannelGeometry& geom,
                         double diffusivity) {
    geom.validate();
    if (!(geom.center_distance > geom.rx_radius))
        throw std::invalid_argument("point_hitting_cdf: d must exceed r_RX");
    if (!(t >= 0.0)) throw std::domain_error("point_hitting_cdf: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double gap = geom.center_distance - geom.rx_radius;
    return geom.rx_radius / geom.center_distance *
           std::erfc(gap / std::sqrt(4.0 * diffusivity * t));
}

AbsorptionCurve absorbed_gradual(const std::function<double(double)>& released_count,
                                 const ChannelGeometry& geom,
                                 const MatrixParams& params,
                                 std::span<const double> time_grid) {
    geom.validate();
    params.validate();
    if (time_grid.empty() || time_grid.front() < 0.0)
        throw std::invalid_argument("absorbed_gradual: time grid must start at >= 0");

    const double D = params.diffusivity;
    const HittingKernelParams k = HittingKernelParams::from_geometry(geom, D);
    // kernel in the u = sqrt(t - xi) variable: p_s(u^2) * 2u du, spike-free
    const double kernel_pref = geom.rx_radius * std::sqrt(M_PI * D) /
                               (M_PI * geom.tx_radius * geom.center_distance);
    const double t_rel = release_time(params);
    const double budget = 1e-4 * params.total_molecules * geom.rx_radius /
                          geom.center_distance;

    AbsorptionCurve curve;
    curve.total_molecules = params.total_molecules;
    curve.times.assign(time_grid.begin(), time_grid.end());
    curve.cumulative.reserve(curve.times.size());

    for (double t : curve.times) {
        if (t == 0.0) {
            curve.cumulative.push_back(0.0);
            continue;
        }
        auto integrand = [&](double u) {
            const double uu = u * u;
            if (uu == 0.0) return 0.0;
            const double ker =
                kernel_pref * (std::exp(-k.beta1 / uu) - std::exp(-k.beta2 / uu));
            return ker * released_count(t - uu);
        };
        const double u_max = std::sqrt(t);
        double value = 0.0, err = 0.0;
        if (t > t_rel) {
            // split at the release-completion kink of the extended curve
            const double u_split = std::sqrt(t - t_rel);
            auto r1 = integrate_adaptive(integrand, 0.0, u_split, 1e-7, budget * 0.25);
            auto r2 = integrate_adaptive(integrand, u_split, u_max, 1e-7, budget * 0.25);
            value = r1.value + r2.value;
            err = r1.error_estimate + r2.error_estimate;
        } else {
            auto r = integrate_adaptive(integrand, 0.0, u_max, 1e-7, budget * 0.25);
            value = r.value;
            err = r.error_estimate;
        }
        if (err > budget)
            throw QuadratureFailure("absorbed_gradual: error estimate " +
                                    std::to_string(err) + " exceeds budget at t = " +
                                    std::to_string(t));
        curve.cumulative.push_back(value);
    }
    curve.validate();
    return curve;
}

double absorbed_closed_form_instantaneous(double t, const MatrixParams& params,
                                          const ChannelGeometry& geom,
                                          double rel_tol) {
    params.validate();
    geom.validate();
    if (!(t >= 0.0))
        throw std::domain_error("absorbed_closed_form_instantaneous: t < 0");
    if (!(rel_tol > 0.0))
        throw std::domain_error("absorbed_closed_form_instantaneous: rel_tol <= 0");
    if (t == 0.0) return 0.0;

    const double a = geom.tx_radius;
    const double rx = geom.rx_radius;
    const double d = geom.center_distance;
    const double D = params.diffusivity;
    const double Minf = params.total_molecules;
    const HittingKernelParams k = HittingKernelParams::from_geometry(geom, D);

    // Surface-kernel mass term. Each beta contributes
    // sqrt(t) e^{-b/t} - sqrt(pi b) erfc(sqrt(b/t)); the scaled form
    // sqrt(t) e^{-b/t} (1 - sqrt(pi) x erfcx(x)) avoids the cancellation of
    // the two asymptotes at small t.
    auto mass_term = [&](double b) {
        if (b == 0.0) return std::sqrt(t);
        const double x = std::sqrt(b / t);
        return std::sqrt(t) * std::exp(-b / t) *
               (1.0 - std::sqrt(M_PI) * x * erfcx(x));
    };
    const double part1 = Minf * rx * std::sqrt(M_PI * D) / (M_PI * a * d) *
                         (mass_term(k.beta1) - mass_term(k.beta2));

    // Eigenseries part. The erf/exp combinations of the printed solution are
    // the analytic continuation of the decaying-exponential convolution; in
    // terms of the Faddeeva function each term reads
    //   e^{-b/t} * Im w(-sqrt(g_n t) + i sqrt(b/t)),
    // bounded by 1 for every n and t (no overflow management needed).
    const double g1 = D * M_PI * M_PI / (a * a);
    const double series_pref = 3.0 * Minf * rx * std::sqrt(D) / (M_PI * M_PI * a * d);
    double series = 0.0;
    constexpr int kMaxTerms = 10000;
    const double q1 = std::sqrt(k.beta1 / t);
    const double q2 = std::sqrt(k.beta2 / t);
    const double e1 = std::exp(-k.beta1 / t);
    const double e2 = std::exp(-k.beta2 / t);
    bool converged = false;
    for (int n = 1; n <= kMaxTerms; ++n) {
        const double g = g1 * n * n;
        const double p = std::sqrt(g * t);
        const double h1 = e1 * faddeeva_w({-p, q1}).imag();
        const double h2 = e2 * faddeeva_w({-p, q2}).imag();
        const double term = series_pref / (double(n) * n * std::sqrt(g)) * (h1 - h2);
        series += term;
        if (n > 4 && std::abs(term) <
                         rel_tol * std::max(std::abs(part1 + series), 1e-300)) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error(
            "absorbed_closed_form_instantaneous: series cap reached");
    return part1 + series;
}

std::vector<double> absorption_rate(const AbsorptionCurve& curve) {
    const auto& t = curve.times;
    const auto& N = curve.cumulative;
    if (t.size() < 3)
        throw std::invalid_argument("absorption_rate: need at least 3 points");
    const double dt = t[1] - t[0];
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-9 * dt)
            throw std::invalid_argument("absorption_rate: non-uniform time grid");

    std::vector<double> rate(t.size());
    const std::size_t n = t.size();
    rate[0] = (-3.0 * N[0] + 4.0 * N[1] - N[2]) / (2.0 * dt);
    for (std::size_t i = 1; i + 1 < n; ++i) rate[i] = (N[i + 1] - N[i - 1]) / (2.0 * dt);
    rate[n - 1] = (3.0 * N[n - 1] - 4.0 * N[n - 2] + N[n - 3]) / (2.0 * dt);

    double peak = 0.0;
    for (double r : rate) peak = std::max(peak, r);
    const double eps = 1e-7 * std::max(peak, 1.0);
    for (double& r : rate)
        if (r < 0.0 && r > -eps) r = 0.0;
    return rate;
}

}  // namespace matrixtx
