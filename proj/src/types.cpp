#include "matrixtx/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace matrixtx {

namespace {
constexpr double kCountConsistencyTol = 1e-9;

double sphere_volume(double r) { return 4.0 / 3.0 * M_PI * r * r * r; }
}  // namespace

MatrixParams MatrixParams::from_loading(double loading, double solubility,
                                        double radius, double diffusivity) {
    MatrixParams p;
    p.loading = loading;
    p.solubility = solubility;
    p.radius = radius;
    p.diffusivity = diffusivity;
    p.total_molecules = loading * sphere_volume(radius);
    p.validate();
    return p;
}

MatrixParams MatrixParams::from_molecule_count(double total_molecules,
                                               double loading_ratio,
                                               double radius,
                                               double diffusivity) {
    MatrixParams p;
    p.loading = total_molecules / sphere_volume(radius);
    p.solubility = p.loading / loading_ratio;
    p.radius = radius;
    p.diffusivity = diffusivity;
    p.total_molecules = total_molecules;
    p.validate();
    return p;
}

void MatrixParams::validate() const {
    if (!(solubility > 0.0))
        throw std::invalid_argument("MatrixParams: solubility must be > 0");
    if (!(loading >= solubility))
        throw std::invalid_argument("MatrixParams: loading ratio A/Cs must be >= 1");
    if (!(radius > 0.0))
        throw std::invalid_argument("MatrixParams: radius must be > 0");
    if (!(diffusivity > 0.0))
        throw std::invalid_argument("MatrixParams: diffusivity must be > 0");
    const double implied = loading * sphere_volume(radius);
    if (std::abs(implied - total_molecules) >
        kCountConsistencyTol * std::max(implied, total_molecules))
        throw std::invalid_argument(
            "MatrixParams: molecule count inconsistent with loading density");
}

FrontPosition FrontPosition::from_delta(double delta, double matrix_radius) {
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::invalid_argument("FrontPosition: delta outside [0, 1]");
    return {delta, matrix_radius * (1.0 - delta)};
}

FrontPosition FrontPosition::from_radius(double front_radius,
                                         double matrix_radius) {
    if (!(front_radius >= 0.0 && front_radius <= matrix_radius))
        throw std::invalid_argument("FrontPosition: radius outside [0, a]");
    return {1.0 - front_radius / matrix_radius, front_radius};
}

void ReleaseCurve::validate() const {
    if (times.size() != fraction.size())
        throw std::invalid_argument("ReleaseCurve: size mismatch");
    constexpr double kEps = 1e-9;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::invalid_argument("ReleaseCurve: times not strictly increasing");
        if (!(fraction[i] >= 0.0 && fraction[i] <= 1.0 + kEps))
            throw std::invalid_argument("ReleaseCurve: fraction outside [0, 1]");
        if (i > 0 && fraction[i] < fraction[i - 1] - kEps)
            throw std::invalid_argument("ReleaseCurve: fraction decreases at step " +
                                        std::to_string(i));
    }
    if (!times.empty() && times.front() == 0.0 && fraction.front() != 0.0)
        throw std::invalid_argument("ReleaseCurve: fraction at t=0 must be 0");
}

}  // namespace matrixtx
