#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ksum/kernel.hpp"
#include "ksum/linalg.hpp"

namespace ksum {

struct ICAModel {
    Matrix whitener;                // d x ncomp
    Matrix unmixing;                // ncomp x ncomp orthonormal (columns q_i)
    Matrix sources;                 // n x ncomp, centered X * whitener * unmixing
    std::vector<double> center;     // column means of X
    std::vector<double> bandwidths; // per extracted component
    PolyExpKernel kernel;
};

// Sample entropy of the projection of whitened data onto q / ||q||:
// -(1/n) sum_j log f_hat(p_j), density floored at 1e-20 before the log.
double entropy_index(std::span<const double> q, const Matrix& xw, double h,
                     const PolyExpKernel& kernel,
                     std::optional<int> nbin = std::nullopt);

// Analytic gradient of entropy_index via the chain rule through p = Xw q/||q||.
std::vector<double> entropy_grad(std::span<const double> q, const Matrix& xw, double h,
                                 const PolyExpKernel& kernel,
                                 std::optional<int> nbin = std::nullopt);

struct ICAOptions {
    std::size_t ncomp = 1;
    double hmult = 1.5; // bandwidth = hmult * Silverman on the projection
    int it = 20;        // projected-gradient steps per component
    std::optional<int> nbin;
};

// Whitens to ncomp dimensions and extracts components by deflation: each q_i
// starts at the i-th coordinate axis and takes `it` projected-gradient steps
// with backtracking, re-orthogonalized against earlier components after
// every step.
ICAModel ica_fit(const Matrix& x, const ICAOptions& opt,
                 const PolyExpKernel& kernel = PolyExpKernel::default_kernel());

} // namespace ksum
