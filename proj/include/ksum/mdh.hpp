#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ksum/fastsum.hpp"
#include "ksum/kernel.hpp"
#include "ksum/linalg.hpp"

namespace ksum {

// Data projected onto a unit direction, sorted once for repeated density work.
struct ProjectedData {
    std::vector<double> points; // ascending
    double mean;
    double sd; // divisor n-1
};

ProjectedData project_data(const Matrix& x, std::span<const double> v);

struct MDHModel {
    std::vector<double> v; // unit-norm direction
    double b;              // split point along v
    double alpha_final;
    double density_at_b;
    bool separating; // false when no alpha stage produced a valid separator
    double h;
    PolyExpKernel kernel;
};

// Projected KDE at b plus C * squared distance of b from the interval
// [mean - alpha sd, mean + alpha sd] (zero inside it).
double mdh_penalized_density(const ProjectedData& p, double b, double h,
                             const PolyExpKernel& kernel, double C, double alpha);

struct MinBResult {
    double b;
    double value;
};

// Minimizes the penalized density over b: best cell of a 200-point grid over
// [mean - (alpha+1) sd, mean + (alpha+1) sd], refined by ternary search to
// width below 1e-6 * sd.
MinBResult mdh_min_b(const ProjectedData& p, double h, const PolyExpKernel& kernel,
                     double C, double alpha);

struct MDHOptions {
    double hmult = 1.0;
    double alphamax = 1.0;
    std::optional<double> C;              // default: 10 * max initial KDE / sd^2
    std::optional<std::vector<double>> v0; // default: first principal component
    int qn_max_iter = 50;
    double qn_grad_tol = 1e-6;
};

// Minimum density hyperplane: the bandwidth is fixed from the initial
// projection, then the direction is optimized over an increasing sequence of
// eleven alpha stages; the last stage whose split passes between two modes of
// the projected density wins.
MDHModel mdh_fit(const Matrix& x, const MDHOptions& opt = {},
                 const PolyExpKernel& kernel = PolyExpKernel::default_kernel());

} // namespace ksum
