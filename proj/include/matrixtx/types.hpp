#pragma once

#include <vector>

namespace matrixtx {

/// Physical description of a spherical homogeneous non-erodible matrix
/// carrier. All quantities in SI units; molecule counts are expected values,
/// stored as doubles.
struct MatrixParams {
    double loading = 0.0;          // A, molecules per m^3
    double solubility = 0.0;       // Cs, molecules per m^3
    double radius = 0.0;           // a, m
    double diffusivity = 0.0;      // D, m^2/s
    double total_molecules = 0.0;  // A * (4/3) pi a^3

    static MatrixParams from_loading(double loading, double solubility,
                                     double radius, double diffusivity);
    /// Back-computes the loading density from a molecule count and A/Cs ratio.
    static MatrixParams from_molecule_count(double total_molecules,
                                            double loading_ratio, double radius,
                                            double diffusivity);

    double loading_ratio() const { return loading / solubility; }

    /// Throws std::invalid_argument on violated invariants
    /// (A >= Cs > 0, a > 0, D > 0, count consistent with density to 1e-9).
    void validate() const;
};

/// Dissolution front location, kept in both normalized and SI form.
struct FrontPosition {
    double delta = 0.0;   // 1 - R/a, in [0, 1]
    double radius = 0.0;  // R, m

    static FrontPosition from_delta(double delta, double matrix_radius);
    static FrontPosition from_radius(double front_radius, double matrix_radius);
};

/// Cumulative released fraction/count on a strictly increasing time grid.
struct ReleaseCurve {
    std::vector<double> times;     // s
    std::vector<double> fraction;  // dimensionless, in [0, 1]
    double total_molecules = 0.0;

    double count(std::size_t i) const { return fraction[i] * total_molecules; }

    /// Throws std::invalid_argument if the grid is not strictly increasing,
    /// a fraction leaves [0, 1+1e-9], the curve decreases, or fraction(0) != 0.
    void validate() const;
};

}  // namespace matrixtx
