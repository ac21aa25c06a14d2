#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ksum {

// Moments of the kernel rescaled to unit integral.
struct KernelConstants {
    double normalizer; // integral of K over the real line
    double variance;   // int x^2 K(x)/normalizer dx
    double roughness;  // int (K(x)/normalizer)^2 dx
};

// Kernel of the form K(x) = sum_k beta[k] |x|^k exp(-|x|), a polynomial in |x|
// with non-negative coefficients times the Laplace kernel. The order is the
// polynomial degree. Immutable after construction; safe to share across threads.
class PolyExpKernel {
public:
    // Requires beta non-empty and finite, beta[0] > 0, beta[k] >= 0, order <= 20.
    explicit PolyExpKernel(std::vector<double> beta);

    // K(u); symmetric in u, strictly positive everywhere.
    double eval(double u) const;

    // K'(u); odd in u, with K'(0) defined as 0. For u > 0 equals
    // sum_k gamma[k] u^k exp(-u) with gamma[k] = (k+1) beta[k+1] - beta[k].
    double deriv(double u) const;

    KernelConstants constants() const;

    // Same shape with coefficients divided by the normalizer (unit integral).
    PolyExpKernel normalized() const;

    std::size_t order() const { return beta_.size() - 1; }
    std::span<const double> beta() const { return beta_; }
    std::span<const double> gamma() const { return gamma_; }

    // Kernel with beta[k] = 1/k!, k = 0..order (0 <= order <= 8). Order zero is
    // the Laplace kernel; order one is the package-wide default scaled by 4.
    static PolyExpKernel smooth(int order);

    // The order-one kernel with beta = (1/4, 1/4); already has unit integral.
    static PolyExpKernel default_kernel();

private:
    std::vector<double> beta_;
    std::vector<double> gamma_; // derivative coefficients, cached
};

// The kernel rescaled to a unit-integral, unit-variance density, sampled on a
// symmetric grid covering +-5 standard deviations. Returns (u, density) pairs.
std::vector<std::pair<double, double>> kernel_curve(const PolyExpKernel& kernel,
                                                    int grid_size);

} // namespace ksum
