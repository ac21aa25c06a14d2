#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ksum/dataset.hpp"
#include "ksum/kernel.hpp"

namespace ksum {

struct BenchRecord {
    std::string method;
    std::size_t n = 0;
    std::size_t d = 0;
    std::uint64_t seed = 0;
    double wall_time_seconds = 0.0;
    std::string metric;
    double value = 0.0;
};

struct BenchReport {
    std::vector<BenchRecord> records;

    // Mean of `metric` over all records of `method`.
    double mean_metric(const std::string& method, const std::string& metric) const;
    double mean_time(const std::string& method) const;
};

// Times the exact fast sum over uniform data for each size (n = m), and the
// quadratic reference up to n = 20000. Timings are medians of `repetitions`
// runs on a monotonic clock.
BenchReport bench_scaling(std::span<const std::size_t> sizes,
                          const PolyExpKernel& kernel, int repetitions);

// Consecutive-size time ratios for one method, ordered as in the report.
std::vector<double> scaling_ratios(const BenchReport& report,
                                   const std::string& method);

// Component recovery on mixed non-Gaussian sources; metric "amari".
BenchReport bench_ica(std::span<const std::uint64_t> seeds, std::size_t n,
                      std::size_t d);

// Hyperplane splits of Gaussian mixtures; metrics "separation_error",
// "density_at_b", "density_at_mean".
BenchReport bench_mdh(std::span<const std::uint64_t> seeds, std::size_t n,
                      std::size_t d, std::size_t nclusters);

// Held-out R^2 of two-component fits plus training SSE per term count;
// metrics "r2", "train_sse_1" .. "train_sse_3".
BenchReport bench_ppr(std::span<const std::uint64_t> seeds, std::size_t n,
                      std::size_t d);

Dataset report_to_dataset(const BenchReport& report);
void report_table(std::ostream& out, const BenchReport& report);

} // namespace ksum
