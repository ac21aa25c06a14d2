#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ksum {

// Objective callback: fills `grad` (same length as the point) and returns the
// function value.
using ObjectiveFn = std::function<double(std::span<const double>, std::span<double>)>;

struct QnResult {
    std::vector<double> x;
    double value;
    int iterations;
    bool degraded; // non-finite value or gradient encountered; best iterate returned
};

// Limited-memory quasi-Newton minimizer (two-loop recursion, memory 10) with
// Armijo backtracking (c = 1e-4, halving). Update pairs with non-positive
// curvature are skipped. Stops when the gradient infinity norm drops below
// grad_tol * (1 + |f|) or after max_iter iterations. Accepted iterates are
// monotone non-increasing, so the result never exceeds f(x0).
QnResult qn_minimize(const ObjectiveFn& f, std::span<const double> x0, int max_iter,
                     double grad_tol);

} // namespace ksum
