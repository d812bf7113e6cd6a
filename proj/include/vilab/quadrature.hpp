#pragma once

#include <functional>

namespace vilab {

// Adaptive Gauss-Kronrod (G7,K15) integration on a finite interval.
// Subdivides until the Kronrod error estimate on every subinterval is below
// its share of abs_tol. Throws NumericalError if the recursion depth limit is
// reached before the estimate converges.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, int max_depth = 52);

}  // namespace vilab
