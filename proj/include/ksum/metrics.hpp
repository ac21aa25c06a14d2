#pragma once

#include <span>

#include "ksum/linalg.hpp"

namespace ksum {

// Permutation- and scale-invariant discrepancy between unmixing matrices,
// rescaled onto [0, 1]; zero iff A B^-1 is a scaled permutation.
double amari_distance(const Matrix& a, const Matrix& b);

// Fraction of rows whose hyperplane side disagrees with their binary label,
// minimized over the two label-to-side assignments; lies in [0, 0.5].
double separation_error(std::span<const int> labels_true, std::span<const int> side);

// Coefficient of determination of predictions against observations.
double r_squared(std::span<const double> y, std::span<const double> yhat);

} // namespace ksum
