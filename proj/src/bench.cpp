#include "ksum/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "ksum/error.hpp"
#include "ksum/fastsum.hpp"
#include "ksum/ica.hpp"
#include "ksum/mdh.hpp"
#include "ksum/metrics.hpp"
#include "ksum/ppr.hpp"
#include "ksum/simulate.hpp"

namespace ksum {

namespace {

template <typename F>
double time_once(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

template <typename F>
double time_median(F&& f, int repetitions) {
    f(); // warmup: page faults and cache fills stay out of the timings
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repetitions));
    for (int r = 0; r < repetitions; ++r) times.push_back(time_once(f));
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

} // namespace

double BenchReport::mean_metric(const std::string& method,
                                const std::string& metric) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records)
        if (r.method == method && r.metric == metric) {
            sum += r.value;
            ++count;
        }
    if (count == 0) throw invalid_input("bench report: no records for " + method);
    return sum / static_cast<double>(count);
}

double BenchReport::mean_time(const std::string& method) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records)
        if (r.method == method) {
            sum += r.wall_time_seconds;
            ++count;
        }
    if (count == 0) throw invalid_input("bench report: no records for " + method);
    return sum / static_cast<double>(count);
}

BenchReport bench_scaling(std::span<const std::size_t> sizes,
                          const PolyExpKernel& kernel, int repetitions) {
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw invalid_input("bench_scaling: sizes must be ascending");
    if (repetitions < 1) throw invalid_input("bench_scaling: repetitions must be >= 1");

    constexpr std::size_t kNaiveCap = 20000;
    BenchReport report;
    for (std::size_t n : sizes) {
        CounterRng rng(n);
        WeightedSample sample;
        sample.values.resize(n);
        sample.weights.assign(n, 1.0);
        for (auto& v : sample.values) v = rng.uniform();
        SortedSample sorted(sample.values, sample.weights);

        volatile double sink = 0.0;
        double t_fast = time_median(
            [&] {
                KernelSums s = fk_sum(sorted, 0.1, kernel, sample.values);
                sink = sink + s.ksum[0];
            },
            repetitions);
        report.records.push_back(
            {"exact", n, 1, 0, t_fast, "seconds", t_fast});

        if (n <= kNaiveCap) {
            double t_naive = time_median(
                [&] {
                    KernelSums s = naive_ksum(sample, 0.1, kernel, sample.values);
                    sink = sink + s.ksum[0];
                },
                repetitions);
            report.records.push_back(
                {"naive", n, 1, 0, t_naive, "seconds", t_naive});
        }
    }
    return report;
}

std::vector<double> scaling_ratios(const BenchReport& report,
                                   const std::string& method) {
    std::vector<double> times;
    for (const auto& r : report.records)
        if (r.method == method && r.metric == "seconds") times.push_back(r.value);
    std::vector<double> ratios;
    for (std::size_t i = 1; i < times.size(); ++i)
        ratios.push_back(times[i] / times[i - 1]);
    return ratios;
}

BenchReport bench_ica(std::span<const std::uint64_t> seeds, std::size_t n,
                      std::size_t d) {
    BenchReport report;
    for (std::uint64_t seed : seeds) {
        CounterRng rng(seed);
        ICAMixture mix = sim_ica_mixture(n, d, rng);

        ICAOptions opt;
        opt.ncomp = d;
        auto t0 = std::chrono::steady_clock::now();
        ICAModel model = ica_fit(mix.mixed, opt);
        double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                       .count();

        // With rows as observations the estimated unmixing satisfies
        // F ~ R^-1 P D column-wise; transpose both so the discrepancy is the
        // row-permutation form the Amari index expects.
        Matrix full_unmixing = (model.whitener * model.unmixing).transposed();
        double amari = amari_distance(full_unmixing, inverse(mix.mixing).transposed());
        report.records.push_back({"ica", n, d, seed, t, "amari", amari});
    }
    return report;
}

BenchReport bench_mdh(std::span<const std::uint64_t> seeds, std::size_t n,
                      std::size_t d, std::size_t nclusters) {
    BenchReport report;
    for (std::uint64_t seed : seeds) {
        CounterRng rng(seed);
        GaussMixture gm = sim_gauss_mixture(n, d, nclusters, rng);

        auto t0 = std::chrono::steady_clock::now();
        MDHModel model = mdh_fit(gm.x);
        double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                       .count();

        // Hyperplane side per row, and the cluster-majority binarization of
        // the generator labels.
        std::vector<int> side(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += gm.x(i, j) * model.v[j];
            side[i] = s - model.b > 0.0 ? 1 : -1;
        }
        std::vector<int> pos_count(nclusters, 0), total_count(nclusters, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++total_count[static_cast<std::size_t>(gm.labels[i])];
            if (side[i] > 0) ++pos_count[static_cast<std::size_t>(gm.labels[i])];
        }
        std::vector<int> truth(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto c = static_cast<std::size_t>(gm.labels[i]);
            truth[i] = 2 * pos_count[c] >= total_count[c] ? 1 : 0;
        }
        bool two_labels =
            std::any_of(truth.begin(), truth.end(), [&](int v) { return v != truth[0]; });
        double err;
        if (two_labels) {
            err = separation_error(truth, side);
        } else {
            // all clusters fall on one side: every off-side point is misplaced
            std::size_t bad = 0;
            for (std::size_t i = 0; i < n; ++i)
                if ((side[i] > 0 ? 1 : 0) != truth[i]) ++bad;
            err = static_cast<double>(bad) / static_cast<double>(n);
        }
        report.records.push_back({"mdh", n, d, seed, t, "separation_error", err});

        ProjectedData pd = project_data(gm.x, model.v);
        PolyExpKernel kn = model.kernel.normalized();
        WeightedSample proj{pd.points, std::vector<double>(n, 1.0)};
        std::vector<double> at = {model.b, pd.mean};
        KernelSums sums = fk_sum(proj, model.h, kn, at);
        double scale = 1.0 / (static_cast<double>(n) * model.h);
        report.records.push_back(
            {"mdh", n, d, seed, 0.0, "density_at_b", sums.ksum[0] * scale});
        report.records.push_back(
            {"mdh", n, d, seed, 0.0, "density_at_mean", sums.ksum[1] * scale});
    }
    return report;
}

BenchReport bench_ppr(std::span<const std::uint64_t> seeds, std::size_t n,
                      std::size_t d) {
    BenchReport report;
    for (std::uint64_t seed : seeds) {
        CounterRng rng(seed);
        PPRData data = sim_ppr_data(n, d, rng);

        const std::size_t ntrain = n / 2;
        Matrix xtrain(ntrain, d), xtest(n - ntrain, d);
        std::vector<double> ytrain(ntrain), ytest(n - ntrain);
        for (std::size_t i = 0; i < ntrain; ++i) {
            for (std::size_t j = 0; j < d; ++j) xtrain(i, j) = data.x(i, j);
            ytrain[i] = data.y[i];
        }
        for (std::size_t i = ntrain; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) xtest(i - ntrain, j) = data.x(i, j);
            ytest[i - ntrain] = data.y[i];
        }

        for (int nterms = 1; nterms <= 3; ++nterms) {
            auto t0 = std::chrono::steady_clock::now();
            PPRModel model = ppr_fit(xtrain, ytrain, nterms);
            double tt =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
            std::vector<double> fit = ppr_predict(model, xtrain);
            double sse = 0.0;
            for (std::size_t i = 0; i < ntrain; ++i)
                sse += (ytrain[i] - fit[i]) * (ytrain[i] - fit[i]);
            report.records.push_back({"ppr", n, d, seed, tt,
                                      "train_sse_" + std::to_string(nterms), sse});
            if (nterms == 2) {
                std::vector<double> pred = ppr_predict(model, xtest);
                report.records.push_back(
                    {"ppr", n, d, seed, tt, "r2", r_squared(ytest, pred)});
            }
        }
    }
    return report;
}

Dataset report_to_dataset(const BenchReport& report) {
    // Wide numeric layout so the CSV stays loadable by load_csv: one row per
    // (n, d, seed) case, one column per method/metric pair plus its time.
    std::vector<std::array<std::size_t, 2>> dims;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> value_cols;
    auto row_of = [&](const BenchRecord& r) {
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (dims[i][0] == r.n && dims[i][1] == r.d && seeds[i] == r.seed) return i;
        dims.push_back({r.n, r.d});
        seeds.push_back(r.seed);
        return dims.size() - 1;
    };
    for (const auto& r : report.records) row_of(r);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    Dataset out;
    out.names = {"n", "d", "seed"};
    out.columns.assign(3, std::vector<double>(dims.size()));
    for (std::size_t i = 0; i < dims.size(); ++i) {
        out.columns[0][i] = static_cast<double>(dims[i][0]);
        out.columns[1][i] = static_cast<double>(dims[i][1]);
        out.columns[2][i] = static_cast<double>(seeds[i]);
    }
    auto col_of = [&](const std::string& name) {
        for (std::size_t j = 0; j < out.names.size(); ++j)
            if (out.names[j] == name) return j;
        out.names.push_back(name);
        out.columns.emplace_back(dims.size(), nan);
        return out.names.size() - 1;
    };
    for (const auto& r : report.records) {
        std::size_t i = row_of(r);
        out.columns[col_of(r.method + "_" + r.metric)][i] = r.value;
        if (r.metric != "seconds")
            out.columns[col_of(r.method + "_" + r.metric + "_time")][i] =
                r.wall_time_seconds;
    }
    return out;
}

void report_table(std::ostream& out, const BenchReport& report) {
    out << std::left << std::setw(10) << "method" << std::setw(10) << "n"
        << std::setw(6) << "d" << std::setw(8) << "seed" << std::setw(14) << "seconds"
        << std::setw(22) << "metric" << "value\n";
    for (const auto& r : report.records) {
        out << std::left << std::setw(10) << r.method << std::setw(10) << r.n
            << std::setw(6) << r.d << std::setw(8) << r.seed << std::setw(14)
            << std::setprecision(6) << r.wall_time_seconds << std::setw(22) << r.metric
            << std::setprecision(17) << r.value << '\n';
    }
}

} // namespace ksum
