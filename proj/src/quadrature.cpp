#include "vilab/quadrature.hpp"

#include <array>
#include <cmath>

#include "vilab/common.hpp"

namespace vilab {
namespace {

// Kronrod 15-point nodes on [0,1] side (symmetric) and weights; the odd
// Kronrod nodes 1,3,...,13 are the Gauss-7 nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr std::array<double, 8> kWeightsK = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kWeightsG = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct PanelEstimate {
    double kronrod;
    double err;
};

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double fk = 0.0;
    double fg = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double x = half * kNodes[i];
        const double pair = f(mid - x) + f(mid + x);
        fk += kWeightsK[i] * pair;
        if (i % 2 == 1) fg += kWeightsG[i / 2] * pair;
    }
    const double fc = f(mid);
    fk += kWeightsK[7] * fc;
    fg += kWeightsG[3] * fc;
    return {fk * half, std::abs(fk - fg) * std::abs(half)};
}

double refine(const std::function<double(double)>& f, double a, double b,
              double tol, int depth, int max_depth) {
    const PanelEstimate est = gk15(f, a, b);
    if (est.err <= tol || est.err <= 1e-16 * std::abs(est.kronrod)) {
        return est.kronrod;
    }
    if (depth >= max_depth) {
        throw NumericalError("quadrature failed to converge on [" +
                             std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    const double mid = 0.5 * (a + b);
    return refine(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
           refine(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
    if (!(a <= b)) throw NumericalError("quadrature interval has a > b");
    if (a == b) return 0.0;
    return refine(f, a, b, abs_tol, 0, max_depth);
}

}  // namespace vilab
