#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ksum/error.hpp"
#include "ksum/fastsum.hpp"
#include "ksum/smoothers.hpp"
#include "test_helpers.hpp"

using namespace ksum;
using namespace ksum::testing;

namespace {

std::vector<double> padded_grid(std::span<const double> x, double h, std::size_t m) {
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    std::vector<double> grid(m);
    double a = *lo - 10.0 * h, b = *hi + 10.0 * h;
    for (std::size_t i = 0; i < m; ++i)
        grid[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(m - 1);
    return grid;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

double brute_loo_ml(double h, std::span<const double> x, const PolyExpKernel& kernel) {
    const PolyExpKernel kn = kernel.normalized();
    const double n = static_cast<double>(x.size());
    double obj = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (j != i) s += kn.eval((x[j] - x[i]) / h);
        obj -= std::log(std::max(s / ((n - 1.0) * h), 1e-20));
    }
    return obj;
}

double brute_loo_sse(double h, std::span<const double> x, std::span<const double> y,
                     const PolyExpKernel& kernel) {
    const PolyExpKernel kn = kernel.normalized();
    double obj = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (j == i) continue;
            double w = kn.eval((x[j] - x[i]) / h);
            num += w * y[j];
            den += w;
        }
        double resid = y[i] - num / std::max(den, 1e-20);
        obj += resid * resid;
    }
    return obj;
}

} // namespace

TEST_CASE("kde integrates to one and is non-negative") {
    CounterRng rng(1);
    for (int order : {0, 2, 4}) {
        PolyExpKernel k = PolyExpKernel::smooth(order);
        std::vector<double> x = random_normal(2000, rng);
        for (double h : {0.05, 0.3, 2.0}) {
            std::vector<double> grid = padded_grid(x, h, 4000);
            DensityEstimate est = kde(x, h, k, grid);
            for (double f : est.density) CHECK(f >= 0.0);
            CHECK(std::abs(trapezoid(grid, est.density) - 1.0) < 5e-3);
        }
    }
}

TEST_CASE("kde closed form for a single point") {
    std::vector<double> x{0.0};
    DensityEstimate est =
        kde(x, 1.0, PolyExpKernel::default_kernel(), std::vector<double>{0.0});
    CHECK(est.density[0] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("smaller bandwidth resolves the bimodal mixture more sharply") {
    CounterRng rng(17);
    std::vector<double> x = sim_bimodal(150000, rng);
    std::vector<double> grid(601);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = -1.0 + 3.0 * static_cast<double>(i) / 600.0;
    PolyExpKernel k = PolyExpKernel::default_kernel();
    DensityEstimate sharp = kde(x, 0.025, k, grid);
    DensityEstimate smooth = kde(x, 0.1, k, grid);

    auto window = [&](const DensityEstimate& est, double lo, double hi, bool want_max) {
        double best = want_max ? 0.0 : 1e300;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] < lo || grid[i] > hi) continue;
            best = want_max ? std::max(best, est.density[i])
                            : std::min(best, est.density[i]);
        }
        return best;
    };
    // the spike just above the exponential onset at x = 1, and the dip before it
    CHECK(window(sharp, 1.0, 1.3, true) > window(smooth, 1.0, 1.3, true));
    CHECK(window(sharp, 0.5, 0.95, false) < window(smooth, 0.5, 0.95, false));
}

TEST_CASE("silverman reduces to the Gaussian-kernel formula with injected constants") {
    KernelConstants gauss{1.0, 1.0, 1.0 / (2.0 * std::sqrt(M_PI))};
    CounterRng rng(2);
    std::vector<double> x = random_normal(500, rng);
    double sd = sample_sd(x);
    double expected = std::pow(4.0 / (3.0 * 500.0), 0.2) * sd;
    CHECK(silverman_from_constants(sd, 500, gauss) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("silverman value on the bimodal mixture") {
    CounterRng rng(5);
    std::vector<double> x = sim_bimodal(150000, rng);
    double h = silverman_bandwidth(x, PolyExpKernel::default_kernel());
    CHECK(h > 0.0684 - 0.002);
    CHECK(h < 0.0684 + 0.002);
}

TEST_CASE("silverman scales linearly with the data") {
    CounterRng rng(6);
    std::vector<double> x = random_normal(400, rng, 1.0, 2.0);
    PolyExpKernel k = PolyExpKernel::smooth(2);
    double h = silverman_bandwidth(x, k);
    std::vector<double> scaled = x;
    for (auto& v : scaled) v *= 3.5;
    CHECK(silverman_bandwidth(scaled, k) == doctest::Approx(3.5 * h).epsilon(1e-12));

    std::vector<double> flat(10, 2.0);
    CHECK_THROWS_AS(silverman_bandwidth(flat, k), invalid_input);
}

TEST_CASE("loo_ml: symmetric pair") {
    std::vector<double> x{-1.0, 1.0};
    PolyExpKernel k = PolyExpKernel::default_kernel();
    double h = 0.7;
    double f = k.normalized().eval(2.0 / h) / h;
    CHECK(loo_ml_objective(h, x, k) ==
          doctest::Approx(-2.0 * std::log(f)).epsilon(1e-12));
}

TEST_CASE("loo_ml matches the explicit-exclusion oracle") {
    CounterRng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 20 + static_cast<std::size_t>(rng.uniform() * 180);
        std::vector<double> x = random_normal(n, rng);
        PolyExpKernel k = PolyExpKernel::smooth(static_cast<int>(rng.uniform() * 3));
        double h = 0.05 + rng.uniform();
        CHECK(rel_err(loo_ml_objective(h, x, k), brute_loo_ml(h, x, k)) < 1e-10);
    }
}

TEST_CASE("cv pseudo-likelihood bandwidth is below silverman on the bimodal mixture") {
    CounterRng rng(8);
    std::vector<double> x = sim_bimodal(20000, rng);
    PolyExpKernel k = PolyExpKernel::default_kernel();
    double h_sil = silverman_bandwidth(x, k);
    BandwidthSpec spec = BandwidthSpec::cv();
    double h_ml = resolve_density_bandwidth(spec, x, k);
    CHECK(h_ml < h_sil);
    CHECK(spec.resolved == h_ml);
}

TEST_CASE("nw regression reproduces constants") {
    CounterRng rng(9);
    std::vector<double> x = random_normal(200, rng);
    std::vector<double> y(200, 3.25);
    std::vector<double> grid = random_vector(50, rng, -2.0, 2.0);
    RegressionEstimate est =
        nw_regression(x, y, 0.4, PolyExpKernel::default_kernel(), grid);
    for (double f : est.fitted) CHECK(f == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("nw regression matches the naive ratio") {
    CounterRng rng(10);
    std::vector<double> x = random_normal(500, rng);
    std::vector<double> y = random_normal(500, rng, 1.0, 2.0);
    std::vector<double> grid = random_vector(80, rng, -2.0, 2.0);
    PolyExpKernel k = PolyExpKernel::smooth(1).normalized();
    RegressionEstimate est = nw_regression(x, y, 0.3, k, grid);

    WeightedSample num{x, y};
    WeightedSample den{x, std::vector<double>(x.size(), 1.0)};
    KernelSums sy = naive_ksum(num, 0.3, k, grid);
    KernelSums s1 = naive_ksum(den, 0.3, k, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(rel_err(est.fitted[i], sy.ksum[i] / s1.ksum[i]) < 1e-9);
}

TEST_CASE("nw fitted values stay inside the response range") {
    CounterRng rng(11);
    std::vector<double> x = random_normal(300, rng);
    std::vector<double> y = random_vector(300, rng, 5.0, 6.0);
    auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    std::vector<double> grid = random_vector(100, rng, -3.0, 3.0);
    RegressionEstimate est =
        nw_regression(x, y, 0.5, PolyExpKernel::default_kernel(), grid);
    for (double f : est.fitted) {
        CHECK(f >= *lo - 1e-9);
        CHECK(f <= *hi + 1e-9);
    }
}

TEST_CASE("nw bandwidth trades boundary variance for kink smoothing") {
    CounterRng rng(12);
    SineKink data = sim_sine_kink(2000, rng);
    std::vector<double> grid(201);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 10.0 * i / 200.0;
    PolyExpKernel k = PolyExpKernel::default_kernel();
    RegressionEstimate wiggly = nw_regression(data.x, data.y, 0.05, k, grid);
    RegressionEstimate smooth = nw_regression(data.x, data.y, 0.25, k, grid);

    auto roughness = [&](const RegressionEstimate& est) {
        double s = 0.0;
        for (std::size_t i = 1; i < est.fitted.size(); ++i) {
            double d = est.fitted[i] - est.fitted[i - 1];
            s += d * d;
        }
        return s;
    };
    CHECK(roughness(wiggly) > roughness(smooth));

    // both still track the underlying signal over the well-covered middle
    double err_small = 0.0, err_large = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 2.0 || grid[i] > 8.0) continue;
        double fx = 3.0 * std::sin(2.0 * grid[i]) +
                    (grid[i] > 5.0 ? 10.0 * (grid[i] - 5.0) : 0.0);
        err_small += (wiggly.fitted[i] - fx) * (wiggly.fitted[i] - fx);
        err_large += (smooth.fitted[i] - fx) * (smooth.fitted[i] - fx);
        ++count;
    }
    CHECK(err_small / count < 2.0);
    CHECK(err_large / count < 2.0);
}

TEST_CASE("local-linear regression reproduces affine responses exactly") {
    CounterRng rng(13);
    std::vector<double> x = random_normal(400, rng, 0.0, 2.0);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.5 - 1.75 * x[i];
    std::vector<double> grid = random_vector(60, rng, -3.0, 3.0);
    for (double h : {0.1, 1.0, 10.0}) {
        RegressionEstimate est =
            loclin_regression(x, y, h, PolyExpKernel::default_kernel(), grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(std::abs(est.fitted[i] - (2.5 - 1.75 * grid[i])) < 1e-8);
    }
}

TEST_CASE("local-linear regression matches a brute-force weighted least squares") {
    CounterRng rng(14);
    std::vector<double> x = random_normal(300, rng);
    std::vector<double> y = random_normal(300, rng, 0.5, 1.5);
    std::vector<double> grid = random_vector(40, rng, -1.5, 1.5);
    PolyExpKernel k = PolyExpKernel::smooth(1);
    const PolyExpKernel kn = k.normalized();
    double h = 0.4;
    RegressionEstimate est = loclin_regression(x, y, h, k, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double m0 = 0, m1 = 0, m2 = 0, b0 = 0, b1 = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double w = kn.eval((x[i] - grid[j]) / h);
            double dx = x[i] - grid[j];
            m0 += w;
            m1 += w * dx;
            m2 += w * dx * dx;
            b0 += w * y[i];
            b1 += w * dx * y[i];
        }
        double want = (m2 * b0 - m1 * b1) / (m0 * m2 - m1 * m1);
        CHECK(std::abs(est.fitted[j] - want) < 1e-8);
    }
}

TEST_CASE("local-linear has smaller bias than nw at a parabola vertex") {
    // design symmetric about its own centre, vertex off-centre: the design
    // density slopes at the vertex, which is where the nw bias shows up
    std::vector<double> x(401), y(401);
    for (int i = 0; i <= 400; ++i) {
        x[static_cast<std::size_t>(i)] = -1.0 + i / 100.0; // uniform on [-1, 3]
        y[static_cast<std::size_t>(i)] =
            x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    }
    std::vector<double> at{0.0};
    PolyExpKernel k = PolyExpKernel::default_kernel();
    double nw = nw_regression(x, y, 0.4, k, at).fitted[0];
    double ll = loclin_regression(x, y, 0.4, k, at).fitted[0];
    CHECK(std::abs(ll) < std::abs(nw)); // true vertex value is 0

    // with the design exactly symmetric about the vertex the two coincide
    std::vector<double> xs(201), ys(201);
    for (int i = 0; i <= 200; ++i) {
        xs[static_cast<std::size_t>(i)] = -1.0 + i / 100.0;
        ys[static_cast<std::size_t>(i)] =
            xs[static_cast<std::size_t>(i)] * xs[static_cast<std::size_t>(i)];
    }
    double nw_sym = nw_regression(xs, ys, 0.2, k, at).fitted[0];
    double ll_sym = loclin_regression(xs, ys, 0.2, k, at).fitted[0];
    CHECK(ll_sym == doctest::Approx(nw_sym).epsilon(1e-10));
}

TEST_CASE("loo_sse matches the explicit-exclusion oracle") {
    CounterRng rng(15);
    for (int trial = 0; trial < 8; ++trial) {
        std::size_t n = 30 + static_cast<std::size_t>(rng.uniform() * 170);
        std::vector<double> x = random_normal(n, rng);
        std::vector<double> y = random_normal(n, rng, 0.0, 2.0);
        PolyExpKernel k = PolyExpKernel::smooth(static_cast<int>(rng.uniform() * 3));
        double h = 0.05 + rng.uniform();
        CHECK(rel_err(loo_sse_objective(h, x, y, k), brute_loo_sse(h, x, y, k)) < 1e-9);
    }
}

TEST_CASE("loo_sse vanishes on isolated duplicate pairs") {
    std::vector<double> x{0.0, 0.0, 5.0, 5.0, 10.0, 10.0};
    std::vector<double> y{1.0, 1.0, -2.0, -2.0, 7.0, 7.0};
    double obj = loo_sse_objective(1e-3, x, y, PolyExpKernel::default_kernel());
    CHECK(obj < 1e-18);
}

TEST_CASE("cv regression bandwidth lands in the expected window") {
    CounterRng rng(16);
    SineKink data = sim_sine_kink(2000, rng);
    SortedPairs pairs(data.x, data.y);
    PolyExpKernel k = PolyExpKernel::default_kernel();
    double h = scalar_minimize(
        [&](double hh) { return loo_sse_objective(hh, pairs, k); }, 0.05, 0.5);
    CHECK(h >= 0.08);
    CHECK(h <= 0.16);
}

TEST_CASE("regression is affine-equivariant in the response") {
    CounterRng rng(18);
    std::vector<double> x = random_normal(250, rng);
    std::vector<double> y = random_normal(250, rng);
    std::vector<double> y2(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) y2[i] = -1.5 + 4.0 * y[i];
    std::vector<double> grid = random_vector(30, rng, -1.5, 1.5);
    PolyExpKernel k = PolyExpKernel::default_kernel();
    for (auto method : {RegressionMethod::nw, RegressionMethod::loclin}) {
        auto fit = [&](std::span<const double> resp) {
            return method == RegressionMethod::nw
                       ? nw_regression(x, resp, 0.3, k, grid)
                       : loclin_regression(x, resp, 0.3, k, grid);
        };
        RegressionEstimate base = fit(y);
        RegressionEstimate shifted = fit(y2);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(rel_err(shifted.fitted[i], -1.5 + 4.0 * base.fitted[i]) < 1e-9);
    }
}

TEST_CASE("scalar_minimize basics") {
    double m = scalar_minimize([](double t) { return (t - 0.3) * (t - 0.3); }, 0.0,
                               1.0, 1e-6);
    CHECK(std::abs(m - 0.3) < 1e-5);

    double edge = scalar_minimize([](double t) { return -t; }, 0.0, 1.0, 1e-6);
    CHECK(edge > 1.0 - 1e-4);

    CHECK_THROWS_AS(scalar_minimize([](double) { return std::nan(""); }, 0.0, 1.0),
                    numeric_error);
    CHECK_THROWS_AS(scalar_minimize([](double t) { return t; }, 1.0, 0.0),
                    invalid_input);
}

TEST_CASE("scalar_minimize agrees with a dense grid scan on the loo_ml objective") {
    CounterRng rng(19);
    std::vector<double> x = random_normal(500, rng);
    PolyExpKernel k = PolyExpKernel::default_kernel();
    SortedSample sorted(x);
    double lo = 0.02, hi = 1.0;
    double got = scalar_minimize(
        [&](double h) { return loo_ml_objective(h, sorted, k); }, lo, hi, 1e-6);

    const int grid_n = 10000;
    double best_h = lo, best_v = 1e300;
    for (int i = 0; i <= grid_n; ++i) {
        double h = lo + (hi - lo) * static_cast<double>(i) / grid_n;
        double v = loo_ml_objective(h, sorted, k);
        if (v < best_v) {
            best_v = v;
            best_h = h;
        }
    }
    CHECK(std::abs(got - best_h) <= 2.0 * (hi - lo) / grid_n);
}
