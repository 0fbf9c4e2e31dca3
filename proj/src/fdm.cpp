#include "matrixtx/fdm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matrixtx/release_models.hpp"

namespace matrixtx {

namespace {

constexpr double kResidualLimit = 1e-3;

// Thomas solve of a tridiagonal system; lower/diag/upper/rhs have size n.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

struct StefanState {
    // w = x*C on the unit interval y = (x-R)/(a-R); W[0] = R*Cs, W[N] = 0.
    std::vector<double> W;
    double R = 0.0;
    double t = 0.0;
    double released = 0.0;
};

class StefanSolver {
  public:
    StefanSolver(const MatrixParams& p, const FdmConfig& cfg)
        : p_(p), cfg_(cfg), N_(cfg.spatial_nodes), h_(1.0 / cfg.spatial_nodes) {}

    double shell(double R) const { return p_.radius - R; }

    double front_gradient(const std::vector<double>& W) const {
        return (-3.0 * W[0] + 4.0 * W[1] - W[2]) / (2.0 * h_);
    }

    double surface_gradient(const std::vector<double>& W) const {
        return (3.0 * W[N_] - 4.0 * W[N_ - 1] + W[N_ - 2]) / (2.0 * h_);
    }

    // Stefan flux balance: dR/dt = D * C_x(R) / (A - Cs), with
    // C_x(R) = (w_y(0)/s - Cs) / R in the w = x*C variables.
    double front_velocity(const std::vector<double>& W, double R) const {
        const double s = shell(R);
        return p_.diffusivity * (front_gradient(W) / s - p_.solubility) /
               ((p_.loading - p_.solubility) * R);
    }

    // molecules/s leaving through x = a
    double surface_rate(const std::vector<double>& W, double R) const {
        return -4.0 * M_PI * p_.radius * p_.diffusivity * surface_gradient(W) /
               shell(R);
    }

    double dissolved_mass(const std::vector<double>& W, double R) const {
        const double s = shell(R);
        double acc = 0.0;
        for (int i = 0; i <= N_; ++i) {
            const double x = R + i * h_ * s;
            const double v = W[i] * x;
            acc += (i == 0 || i == N_) ? 0.5 * v : v;
        }
        return 4.0 * M_PI * s * acc * h_;
    }

    double core_mass(double R) const {
        return p_.loading * 4.0 / 3.0 * M_PI * R * R * R;
    }

    // One implicit diffusion-advection step on the front-fixed grid.
    std::vector<double> implicit_step(const std::vector<double>& W, double Rn,
                                      double velocity, double dt) const {
        const double sn = shell(Rn);
        const double alpha = p_.diffusivity * dt / (sn * sn * h_ * h_);
        std::vector<double> lower(N_ - 1), diag(N_ - 1), upper(N_ - 1), rhs(N_ - 1);
        for (int i = 1; i < N_; ++i) {
            const double beta = velocity * dt * (1.0 - i * h_) / (2.0 * h_ * sn);
            lower[i - 1] = -alpha + beta;
            diag[i - 1] = 1.0 + 2.0 * alpha;
            upper[i - 1] = -alpha - beta;
            rhs[i - 1] = W[i];
        }
        rhs[0] -= lower[0] * (Rn * p_.solubility);
        solve_tridiagonal(lower, diag, upper, rhs);
        std::vector<double> out(N_ + 1);
        out[0] = Rn * p_.solubility;
        for (int i = 1; i < N_; ++i) out[i] = rhs[i - 1];
        out[N_] = 0.0;
        return out;
    }

  private:
    const MatrixParams& p_;
    const FdmConfig& cfg_;

  public:
    const int N_;
    const double h_;
};

}  // namespace

void FdmConfig::validate() const {
    if (spatial_nodes < 10)
        throw std::invalid_argument("FdmConfig: spatial_nodes must be >= 10");
    if (time_step < 0.0)
        throw std::invalid_argument("FdmConfig: time_step must be >= 0");
    if (!(front_stop_epsilon > 0.0 && front_stop_epsilon < 1.0))
        throw std::invalid_argument("FdmConfig: front_stop_epsilon outside (0, 1)");
    if (!(initial_front_delta > 0.0 && initial_front_delta < 0.1))
        throw std::invalid_argument("FdmConfig: initial_front_delta outside (0, 0.1)");
    if (!(front_cfl > 0.0 && front_cfl <= 0.5))
        throw std::invalid_argument("FdmConfig: front_cfl outside (0, 0.5]");
    if (max_steps < 1) throw std::invalid_argument("FdmConfig: max_steps must be >= 1");
}

FdmSolution solve_moving_boundary(const MatrixParams& params,
                                  const FdmConfig& config) {
    params.validate();
    config.validate();
    if (params.loading_ratio() < 1.0 + 1e-6)
        throw RatioTooCloseToOne(
            "solve_moving_boundary: A/Cs < 1+1e-6; the dissolution front is "
            "immediate, use the eigenseries release model instead");

    const double a = params.radius;
    const double D = params.diffusivity;
    const double Cs = params.solubility;
    const double Minf = params.total_molecules;
    const double t_rel = release_time(params);
    const double t_end = config.t_end > 0.0 ? config.t_end : 1.5 * t_rel;
    const double R_stop = a * config.front_stop_epsilon;
    const int N = config.spatial_nodes;

    StefanSolver sv(params, config);

    FdmSolution sol;
    sol.total_molecules = Minf;
    sol.matrix_radius = a;

    StefanState st;
    st.R = a * (1.0 - config.initial_front_delta);
    st.t = lee_time_of_front(config.initial_front_delta, params);
    // quasi-steady start profile: w = x*C is linear between R*Cs and 0
    st.W.resize(N + 1);
    {
        const double s0 = a - st.R;
        const double denom = 1.0 / st.R - 1.0 / a;
        for (int i = 0; i <= N; ++i) {
            const double x = st.R + i * sv.h_ * s0;
            st.W[i] = x * Cs * (1.0 / x - 1.0 / a) / denom;
        }
    }
    st.released = Minf - sv.core_mass(st.R) - sv.dissolved_mass(st.W, st.R);

    sol.times.push_back(0.0);
    sol.front_radius.push_back(a);
    sol.release_fraction.push_back(0.0);
    sol.mass_residual.push_back(0.0);

    auto record = [&](double t, double R, double resid) {
        sol.times.push_back(t);
        sol.front_radius.push_back(std::max(R, 0.0));
        sol.release_fraction.push_back(st.released / Minf);
        sol.mass_residual.push_back(resid);
        if (std::abs(resid) > kResidualLimit)
            throw StabilityFailure("solve_moving_boundary: mass residual " +
                                   std::to_string(resid) + " at t = " +
                                   std::to_string(t));
    };
    record(st.t, st.R, 0.0);

    const double dt_cap = t_rel / config.min_total_steps;
    double dt = 1e-3 * dt_cap;
    long steps = 0;
    double rate = sv.surface_rate(st.W, st.R);

    // phase 1: front tracking
    while (st.R > R_stop && st.t < t_end) {
        if (++steps > config.max_steps)
            throw StabilityFailure("solve_moving_boundary: max_steps exceeded");
        const double v0 = sv.front_velocity(st.W, st.R);
        if (config.time_step > 0.0) {
            dt = config.time_step;
        } else {
            dt = std::min({config.front_cfl * sv.shell(st.R) / std::abs(v0),
                           dt_cap, 1.5 * dt});
        }
        // predictor
        double Rp = std::max(st.R + v0 * dt, 0.5 * R_stop);
        std::vector<double> Wp = sv.implicit_step(st.W, Rp, v0, dt);
        const double v1 = sv.front_velocity(Wp, Rp);
        // corrector with averaged front velocity
        const double v = 0.5 * (v0 + v1);
        double Rn = std::max(st.R + v * dt, 0.5 * R_stop);
        std::vector<double> Wn = sv.implicit_step(st.W, Rn, v, dt);

        const double rate_n = sv.surface_rate(Wn, Rn);
        st.released += 0.5 * (rate + rate_n) * dt;
        rate = rate_n;
        st.W = std::move(Wn);
        st.R = Rn;
        st.t += dt;

        const double resid =
            (sv.core_mass(st.R) + sv.dissolved_mass(st.W, st.R) + st.released - Minf) /
            Minf;
        record(st.t, st.R, resid);
    }

    if (st.t >= t_end) return sol;

    // phase 2: the front is numerically at the center; relax the remaining
    // dissolved mass on the fixed sphere with w = x*C (pure heat equation,
    // w(0) = w(a) = 0). The leftover core (<= (R_stop/a)^3 of the load) is
    // dissolved into the innermost cells and shows up in the residual.
    const double hx = a / N;
    std::vector<double> W(N + 1);
    {
        const double s1 = a - st.R;
        for (int j = 0; j <= N; ++j) {
            const double x = j * hx;
            if (x <= st.R) {
                W[j] = x * Cs;
            } else {
                const double y = (x - st.R) / s1;
                const double yi = std::min(y * N, double(N) - 1e-9);
                const int i = static_cast<int>(yi);
                const double w = yi - i;
                W[j] = (1.0 - w) * st.W[i] + w * st.W[i + 1];
            }
        }
        W[0] = 0.0;
        W[N] = 0.0;
    }
    auto dissolved2 = [&]() {
        double acc = 0.0;
        for (int j = 0; j <= N; ++j) {
            const double v = W[j] * j * hx;
            acc += (j == 0 || j == N) ? 0.5 * v : v;
        }
        return 4.0 * M_PI * acc * hx;
    };
    auto rate2 = [&]() {
        const double wx = (3.0 * W[N] - 4.0 * W[N - 1] + W[N - 2]) / (2.0 * hx);
        return -4.0 * M_PI * a * D * wx;
    };

    const double tau1 = a * a / (D * M_PI * M_PI);  // slowest decay mode
    rate = rate2();
    double dt2 = std::min(dt, tau1 / 400.0);
    while (st.t < t_end) {
        if (++steps > config.max_steps)
            throw StabilityFailure("solve_moving_boundary: max_steps exceeded");
        dt2 = std::min(dt2 * 1.05, tau1 / 40.0);
        const double alpha = D * dt2 / (hx * hx);
        std::vector<double> lower(N - 1, -alpha), diag(N - 1, 1.0 + 2.0 * alpha),
            upper(N - 1, -alpha), rhs(N - 1);
        for (int j = 1; j < N; ++j) rhs[j - 1] = W[j];
        solve_tridiagonal(lower, diag, upper, rhs);
        for (int j = 1; j < N; ++j) W[j] = rhs[j - 1];
        const double rate_n = rate2();
        st.released += 0.5 * (rate + rate_n) * dt2;
        rate = rate_n;
        st.t += dt2;
        const double resid = (dissolved2() + st.released - Minf) / Minf;
        record(st.t, 0.0, resid);
    }
    return sol;
}

double FdmSolution::front_at(double t) const {
    if (times.empty()) return 0.0;
    if (t <= times.front()) return front_radius.front();
    if (t >= times.back()) return front_radius.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = it - times.begin();
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return (1.0 - w) * front_radius[i - 1] + w * front_radius[i];
}

double FdmSolution::fraction_at(double t) const {
    if (times.empty()) return 0.0;
    if (t <= times.front()) return release_fraction.front();
    if (t >= times.back()) return release_fraction.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = it - times.begin();
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return (1.0 - w) * release_fraction[i - 1] + w * release_fraction[i];
}

double FdmSolution::max_abs_residual() const {
    double m = 0.0;
    for (double r : mass_residual) m = std::max(m, std::abs(r));
    return m;
}

}  // namespace matrixtx
