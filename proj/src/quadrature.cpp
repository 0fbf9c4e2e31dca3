#include "matrixtx/quadrature.hpp"

#include <cmath>
#include <vector>

namespace matrixtx {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kNodes[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                  0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kWeights[15] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

struct Panel {
    double a, b, value;
    int depth;
};

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double rel_tol,
                                    double abs_tol, int max_depth) {
    QuadratureResult out;
    if (a == b) return out;

    auto gauss = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        double s = 0.0;
        for (int i = 0; i < 15; ++i) s += kWeights[i] * f(mid + half * kNodes[i]);
        out.evaluations += 15;
        return s * half;
    };

    const double whole = gauss(a, b);
    double total_scale = std::abs(whole);

    std::vector<Panel> stack;
    stack.push_back({a, b, whole, 0});
    double sum = 0.0;

    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        const double left = gauss(p.a, mid);
        const double right = gauss(mid, p.b);
        const double refined = left + right;
        const double diff = std::abs(refined - p.value);
        const double share = std::abs(p.b - p.a) / std::abs(b - a);
        const double tol =
            std::max(abs_tol * share, rel_tol * std::max(total_scale, std::abs(sum)) * share);
        if (diff <= tol || p.depth >= max_depth) {
            sum += refined;
            out.error_estimate += diff;
        } else {
            stack.push_back({p.a, mid, left, p.depth + 1});
            stack.push_back({mid, p.b, right, p.depth + 1});
            total_scale = std::max(total_scale, std::abs(refined));
        }
    }
    out.value = sum;
    return out;
}

}  // namespace matrixtx
