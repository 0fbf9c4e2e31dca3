#pragma once

#include <complex>

namespace matrixtx {

/// Scaled complementary error function exp(x^2)*erfc(x), x >= 0.
/// Stays finite for arbitrarily large x (asymptotically ~ 1/(x*sqrt(pi))).
double erfcx(double x);

/// Faddeeva function w(z) = exp(-z^2)*erfc(-i*z), valid for Im(z) >= 0.
/// |w(z)| <= 1 on the closed upper half-plane, which makes it the
/// overflow-safe building block for erf/erfc combinations with large
/// mixed-sign exponents.
std::complex<double> faddeeva_w(std::complex<double> z);

}  // namespace matrixtx
