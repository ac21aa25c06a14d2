#include "ksum/smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ksum/error.hpp"

namespace ksum {

namespace {

constexpr double kDenFloor = 1e-20;

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

} // namespace

BandwidthSpec BandwidthSpec::fixed(double h) {
    if (!(h > 0.0)) throw invalid_input("bandwidth: fixed h must be positive");
    BandwidthSpec s;
    s.kind = Kind::fixed;
    s.fixed_h = h;
    return s;
}

BandwidthSpec BandwidthSpec::silverman(double multiplier) {
    if (!(multiplier > 0.0)) throw invalid_input("bandwidth: multiplier must be positive");
    BandwidthSpec s;
    s.kind = Kind::silverman;
    s.multiplier = multiplier;
    return s;
}

BandwidthSpec BandwidthSpec::cv(double lo, double hi) {
    if (lo != 0.0 || hi != 0.0) {
        if (!(lo > 0.0) || !(lo < hi))
            throw invalid_input("bandwidth: cv bracket requires 0 < lo < hi");
    }
    BandwidthSpec s;
    s.kind = Kind::cv;
    s.bracket_lo = lo;
    s.bracket_hi = hi;
    return s;
}

double sample_sd(std::span<const double> x) {
    if (x.size() < 2) throw invalid_input("sd: need at least two observations");
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

DensityEstimate kde(std::span<const double> x, double h, const PolyExpKernel& kernel,
                    std::span<const double> x_eval, std::optional<int> nbin) {
    if (!(h > 0.0)) throw invalid_input("kde: bandwidth must be positive");
    const PolyExpKernel kn = kernel.normalized();
    WeightedSample s{{x.begin(), x.end()}, ones(x.size())};
    KernelSums sums = fk_sum(s, h, kn, x_eval, SumMode::ksum, nbin);
    const double scale = 1.0 / (static_cast<double>(x.size()) * h);
    std::vector<double> dens(sums.ksum.size());
    for (std::size_t j = 0; j < dens.size(); ++j)
        dens[j] = std::max(0.0, sums.ksum[j] * scale);
    return {{x_eval.begin(), x_eval.end()}, std::move(dens), h, kernel};
}

double silverman_from_constants(double sd, std::size_t n, const KernelConstants& c) {
    if (n < 2) throw invalid_input("silverman: need at least two observations");
    if (!(sd > 0.0)) throw invalid_input("silverman: zero-variance sample");
    double num = 8.0 * std::sqrt(M_PI) * c.roughness;
    double den = 3.0 * c.variance * c.variance * static_cast<double>(n);
    return std::pow(num / den, 0.2) * sd;
}

double silverman_bandwidth(std::span<const double> x, const PolyExpKernel& kernel) {
    return silverman_from_constants(sample_sd(x), x.size(), kernel.constants());
}

double loo_ml_objective(double h, const SortedSample& x, const PolyExpKernel& kernel) {
    const std::size_t n = x.size();
    if (n < 2) throw invalid_input("loo_ml: need at least two observations");
    if (!(h > 0.0)) throw invalid_input("loo_ml: bandwidth must be positive");
    const PolyExpKernel kn = kernel.normalized();
    const double b0 = kn.beta()[0];
    KernelSums sums = fk_sum(x, h, kn, x.values(), SumMode::ksum);
    const double scale = 1.0 / (static_cast<double>(n - 1) * h);
    double obj = 0.0;
    for (double s : sums.ksum)
        obj -= std::log(std::max((s - b0) * scale, kDenFloor));
    return obj;
}

double loo_ml_objective(double h, std::span<const double> x, const PolyExpKernel& kernel) {
    return loo_ml_objective(h, SortedSample(x), kernel);
}

RegressionEstimate nw_regression(std::span<const double> x, std::span<const double> y,
                                 double h, const PolyExpKernel& kernel,
                                 std::span<const double> x_eval,
                                 std::optional<int> nbin) {
    if (x.size() != y.size()) throw invalid_input("nw: x and y differ in length");
    const PolyExpKernel kn = kernel.normalized();
    WeightedSample num{{x.begin(), x.end()}, {y.begin(), y.end()}};
    WeightedSample den{{x.begin(), x.end()}, ones(x.size())};
    KernelSums sy = fk_sum(num, h, kn, x_eval, SumMode::ksum, nbin);
    KernelSums s1 = fk_sum(den, h, kn, x_eval, SumMode::ksum, nbin);
    std::vector<double> fit(sy.ksum.size());
    for (std::size_t j = 0; j < fit.size(); ++j)
        fit[j] = sy.ksum[j] / std::max(s1.ksum[j], kDenFloor);
    return {{x_eval.begin(), x_eval.end()}, std::move(fit), h, kernel, RegressionMethod::nw};
}

RegressionEstimate loclin_regression(std::span<const double> x, std::span<const double> y,
                                     double h, const PolyExpKernel& kernel,
                                     std::span<const double> x_eval,
                                     std::optional<int> nbin) {
    if (x.size() != y.size()) throw invalid_input("loclin: x and y differ in length");
    const PolyExpKernel kn = kernel.normalized();
    const std::size_t n = x.size();

    // Moment sums about each evaluation point, recombined from plain kernel
    // sums with polynomial weight sequences: m_j = sum K (x - xe)^j and
    // b_j = sum K (x - xe)^j y.
    std::vector<double> wx(n), wxx(n), wxy(n);
    for (std::size_t i = 0; i < n; ++i) {
        wx[i] = x[i];
        wxx[i] = x[i] * x[i];
        wxy[i] = x[i] * y[i];
    }
    auto sums = [&](std::span<const double> w) {
        WeightedSample s{{x.begin(), x.end()}, {w.begin(), w.end()}};
        return fk_sum(s, h, kn, x_eval, SumMode::ksum, nbin).ksum;
    };
    std::vector<double> s1 = sums(ones(n));
    std::vector<double> sx = sums(wx);
    std::vector<double> sxx = sums(wxx);
    std::vector<double> sy = sums(y);
    std::vector<double> sxy = sums(wxy);

    std::vector<double> fit(x_eval.size());
    for (std::size_t j = 0; j < fit.size(); ++j) {
        const double e = x_eval[j];
        const double m0 = s1[j];
        const double m1 = sx[j] - e * s1[j];
        const double m2 = sxx[j] - 2.0 * e * sx[j] + e * e * s1[j];
        const double b0 = sy[j];
        const double b1 = sxy[j] - e * sy[j];
        double det = m0 * m2 - m1 * m1;
        det = std::max(det, kDenFloor * std::max(m0 * m2, 1.0));
        fit[j] = (m2 * b0 - m1 * b1) / det;
    }
    return {{x_eval.begin(), x_eval.end()},
            std::move(fit),
            h,
            kernel,
            RegressionMethod::loclin};
}

SortedPairs::SortedPairs(std::span<const double> xin, std::span<const double> yin) {
    if (xin.size() != yin.size()) throw invalid_input("pairs: x and y differ in length");
    if (xin.empty()) throw invalid_input("pairs: empty");
    std::vector<std::size_t> order(xin.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (xin[a] != xin[b]) return xin[a] < xin[b];
        return yin[a] < yin[b];
    });
    x.resize(xin.size());
    y.resize(xin.size());
    for (std::size_t i = 0; i < xin.size(); ++i) {
        x[i] = xin[order[i]];
        y[i] = yin[order[i]];
    }
    ones.assign(xin.size(), 1.0);
}

double loo_sse_objective(double h, const SortedPairs& pairs, const PolyExpKernel& kernel) {
    const std::size_t n = pairs.x.size();
    if (n < 2) throw invalid_input("loo_sse: need at least two observations");
    if (!(h > 0.0)) throw invalid_input("loo_sse: bandwidth must be positive");
    const PolyExpKernel kn = kernel.normalized();
    const double b0 = kn.beta()[0];
    KernelSums sy = fk_sum_presorted(pairs.x, pairs.y, h, kn, pairs.x, SumMode::ksum);
    KernelSums s1 = fk_sum_presorted(pairs.x, pairs.ones, h, kn, pairs.x, SumMode::ksum);
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double num = sy.ksum[i] - b0 * pairs.y[i];
        double den = std::max(s1.ksum[i] - b0, kDenFloor);
        double resid = pairs.y[i] - num / den;
        obj += resid * resid;
    }
    return obj;
}

double loo_sse_objective(double h, std::span<const double> x, std::span<const double> y,
                         const PolyExpKernel& kernel) {
    return loo_sse_objective(h, SortedPairs(x, y), kernel);
}

double scalar_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol) {
    if (!(lo < hi)) throw invalid_input("scalar_minimize: requires lo < hi");
    if (!(tol > 0.0)) throw invalid_input("scalar_minimize: tol must be positive");

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double width0 = hi - lo;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    auto eval = [&](double t) {
        double v = f(t);
        if (!std::isfinite(v))
            throw numeric_error("scalar_minimize: non-finite objective value");
        return v;
    };
    double fc = eval(c), fd = eval(d);
    while (b - a > tol * width0) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = eval(d);
        }
    }
    return (a + b) / 2.0;
}

namespace {

double resolve_impl(BandwidthSpec& spec, std::span<const double> x,
                    const std::function<double(double, double)>& cv_search,
                    const PolyExpKernel& kernel) {
    double h = 0.0;
    switch (spec.kind) {
        case BandwidthSpec::Kind::fixed:
            h = spec.fixed_h;
            break;
        case BandwidthSpec::Kind::silverman:
            h = spec.multiplier * silverman_bandwidth(x, kernel);
            break;
        case BandwidthSpec::Kind::cv: {
            double lo = spec.bracket_lo, hi = spec.bracket_hi;
            if (lo == 0.0 && hi == 0.0) {
                double s = sample_sd(x) / std::pow(static_cast<double>(x.size()), 0.2);
                lo = s / 20.0;
                hi = 5.0 * s;
            }
            h = cv_search(lo, hi);
            break;
        }
    }
    if (!(h > 0.0)) throw numeric_error("bandwidth: resolved to a non-positive value");
    spec.resolved = h;
    return h;
}

} // namespace

double resolve_density_bandwidth(BandwidthSpec& spec, std::span<const double> x,
                                 const PolyExpKernel& kernel) {
    if (spec.kind != BandwidthSpec::Kind::cv)
        return resolve_impl(spec, x, {}, kernel);
    SortedSample sorted(x);
    return resolve_impl(
        spec, x,
        [&](double lo, double hi) {
            return scalar_minimize(
                [&](double h) { return loo_ml_objective(h, sorted, kernel); }, lo, hi);
        },
        kernel);
}

double resolve_regression_bandwidth(BandwidthSpec& spec, std::span<const double> x,
                                    std::span<const double> y,
                                    const PolyExpKernel& kernel) {
    if (spec.kind != BandwidthSpec::Kind::cv)
        return resolve_impl(spec, x, {}, kernel);
    SortedPairs pairs(x, y);
    return resolve_impl(
        spec, x,
        [&](double lo, double hi) {
            return scalar_minimize(
                [&](double h) { return loo_sse_objective(h, pairs, kernel); }, lo, hi);
        },
        kernel);
}

} // namespace ksum
