#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ksum/fastsum.hpp"
#include "ksum/kernel.hpp"

namespace ksum {

struct BandwidthSpec {
    enum class Kind { fixed, silverman, cv };
    Kind kind = Kind::silverman;
    double fixed_h = 0.0;    // kind == fixed
    double multiplier = 1.0; // kind == silverman
    double bracket_lo = 0.0; // kind == cv; lo == hi == 0 selects the default bracket
    double bracket_hi = 0.0;
    std::optional<double> resolved; // filled by the resolve_* helpers

    static BandwidthSpec fixed(double h);
    static BandwidthSpec silverman(double multiplier = 1.0);
    static BandwidthSpec cv(double lo = 0.0, double hi = 0.0);
};

struct DensityEstimate {
    std::vector<double> eval_points;
    std::vector<double> density;
    double h;
    PolyExpKernel kernel;
};

enum class RegressionMethod { nw, loclin };

struct RegressionEstimate {
    std::vector<double> eval_points;
    std::vector<double> fitted;
    double h;
    PolyExpKernel kernel;
    RegressionMethod method;
};

// f_hat(x) = ksum / (n h) with the unit-integral kernel and uniform weights.
DensityEstimate kde(std::span<const double> x, double h, const PolyExpKernel& kernel,
                    std::span<const double> x_eval,
                    std::optional<int> nbin = std::nullopt);

// h = (8 sqrt(pi) ||K||^2 / (3 sigma_K^4 n))^(1/5) * sd(x), sd with divisor n-1.
double silverman_bandwidth(std::span<const double> x, const PolyExpKernel& kernel);
double silverman_from_constants(double sd, std::size_t n, const KernelConstants& c);

// Negative log pseudo-likelihood of the leave-one-out density estimates,
// with each estimate floored at 1e-20. Sorted overload for repeated CV calls.
double loo_ml_objective(double h, std::span<const double> x, const PolyExpKernel& kernel);
double loo_ml_objective(double h, const SortedSample& x, const PolyExpKernel& kernel);

RegressionEstimate nw_regression(std::span<const double> x, std::span<const double> y,
                                 double h, const PolyExpKernel& kernel,
                                 std::span<const double> x_eval,
                                 std::optional<int> nbin = std::nullopt);

RegressionEstimate loclin_regression(std::span<const double> x, std::span<const double> y,
                                     double h, const PolyExpKernel& kernel,
                                     std::span<const double> x_eval,
                                     std::optional<int> nbin = std::nullopt);

// Covariate/response pairs sorted once by x, for repeated CV evaluations.
struct SortedPairs {
    std::vector<double> x; // ascending
    std::vector<double> y; // aligned with x
    std::vector<double> ones;
    SortedPairs(std::span<const double> x, std::span<const double> y);
};

// Sum of squared leave-one-out Nadaraya-Watson prediction errors.
double loo_sse_objective(double h, std::span<const double> x, std::span<const double> y,
                         const PolyExpKernel& kernel);
double loo_sse_objective(double h, const SortedPairs& pairs, const PolyExpKernel& kernel);

// Golden-section search over [lo, hi]; returns a point within tol * (hi - lo)
// of a local minimizer (the global one when f is unimodal).
double scalar_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-6);

double resolve_density_bandwidth(BandwidthSpec& spec, std::span<const double> x,
                                 const PolyExpKernel& kernel);
double resolve_regression_bandwidth(BandwidthSpec& spec, std::span<const double> x,
                                    std::span<const double> y,
                                    const PolyExpKernel& kernel);

double sample_sd(std::span<const double> x); // divisor n-1

} // namespace ksum
