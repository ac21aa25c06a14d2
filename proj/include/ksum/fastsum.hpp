#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ksum/kernel.hpp"

namespace ksum {

// Sample values with per-point coefficients. Weights may be negative
// (regression residuals are signed).
struct WeightedSample {
    std::vector<double> values;
    std::vector<double> weights;
};

// Sum collections per evaluation point, in the caller's evaluation order.
// ksum[j]  = sum_i K((x_i - xe_j) / h) w_i
// dksum[j] = sum_i K'((x_i - xe_j) / h) w_i   (empty unless requested)
struct KernelSums {
    std::vector<double> ksum;
    std::vector<double> dksum;
};

enum class SumMode { ksum, dksum, both };

// Sample sorted once so repeated sum evaluations skip the n log n step.
// Ties are ordered by weight so that the sweep is permutation-invariant.
class SortedSample {
public:
    SortedSample(std::span<const double> values, std::span<const double> weights);
    explicit SortedSample(std::span<const double> values); // unit weights

    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<const double> weights() const { return weights_; }

    // Replace weights, given in the original (pre-sort) order.
    void set_weights(std::span<const double> weights);

private:
    std::vector<double> values_;  // ascending
    std::vector<double> weights_; // aligned with values_
    std::vector<std::size_t> order_; // original index of each sorted slot
};

// Exact evaluation of the kernel-sum and kernel-derivative-sum collections in
// O((n+m) alpha^2 + n log n + m log m). When nbin is given, the sample is
// first reduced by linear binning and the exact sweep runs on the bin grid.
KernelSums fk_sum(const WeightedSample& sample, double h, const PolyExpKernel& kernel,
                  std::span<const double> x_eval, SumMode mode = SumMode::ksum,
                  std::optional<int> nbin = std::nullopt);

// Evaluation points default to the sample values.
KernelSums fk_sum(const WeightedSample& sample, double h, const PolyExpKernel& kernel,
                  SumMode mode = SumMode::ksum, std::optional<int> nbin = std::nullopt);

// Pre-sorted variant; evaluation points need not be sorted.
KernelSums fk_sum(const SortedSample& sample, double h, const PolyExpKernel& kernel,
                  std::span<const double> x_eval, SumMode mode = SumMode::ksum,
                  std::optional<int> nbin = std::nullopt);

// Core exact path. `values` must already be ascending, `weights` aligned with
// it; skips all sorting of the sample.
KernelSums fk_sum_presorted(std::span<const double> values,
                            std::span<const double> weights, double h,
                            const PolyExpKernel& kernel, std::span<const double> x_eval,
                            SumMode mode = SumMode::ksum);

// Definitional double loop; quadratic in n. Test oracle for the exact path.
KernelSums naive_ksum(const WeightedSample& sample, double h,
                      const PolyExpKernel& kernel, std::span<const double> x_eval,
                      SumMode mode = SumMode::ksum);

// Linear binning onto nbin equally spaced grid points spanning the data range.
// Each point's weight splits between its bracketing nodes proportionally to
// proximity; total weight and first moment are preserved exactly.
WeightedSample bin_sample(const WeightedSample& sample, int nbin);

} // namespace ksum
