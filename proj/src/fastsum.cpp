#include "ksum/fastsum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ksum/error.hpp"

namespace ksum {

namespace {

void check_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw invalid_input(std::string(what) + ": non-finite value");
}

// Median of the pooled sample and evaluation values. The sums are shift
// invariant, and centering bounds |x|^m inside the power accumulators.
double pooled_median(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pool;
    pool.reserve(a.size() + b.size());
    pool.insert(pool.end(), a.begin(), a.end());
    pool.insert(pool.end(), b.begin(), b.end());
    auto mid = pool.begin() + static_cast<std::ptrdiff_t>(pool.size() / 2);
    std::nth_element(pool.begin(), mid, pool.end());
    if (pool.size() % 2 == 1) return *mid;
    double hi = *mid;
    double lo = *std::max_element(pool.begin(), mid);
    return lo + (hi - lo) / 2.0;
}

// Exact sweep over sorted, centered inputs. Writes sums aligned with es.
// The accumulators live in coordinates relative to the current evaluation
// point, scaled by h: the ascending pass maintains
//   A_m(e) = sum_{x_i <= e} w_i u_i^m exp(u_i),  u_i = (x_i - e)/h <= 0,
// and the descending pass the strict mirror with u_i >= 0 and exp(-u_i).
// Every term is bounded by (m/e)^m |w|, so no cancellation grows with the
// spread of the data. Moving the origin to the next evaluation point applies
// the binomial shift A_m <- exp(-t) sum_q C(m,q) (-t)^(m-q) A_q with
// t = gap/h >= 0, an O(alpha^2) update; each evaluation then reads the
// accumulators once per coefficient. Tied sample points (u = 0) only ever
// touch A_0, which is what the derivative combine subtracts (K'(0) = 0).
void exact_sweep(std::span<const double> xs, std::span<const double> ws,
                 std::span<const double> es, double h, const PolyExpKernel& kernel,
                 bool want_k, bool want_d, std::span<double> out_k,
                 std::span<double> out_d) {
    const std::size_t n = xs.size(), m = es.size();
    const std::size_t p = kernel.order() + 1;
    const long double hl = h;

    // C(k,j) for k, j <= order
    std::vector<long double> choose(p * p, 0.0L);
    for (std::size_t k = 0; k < p; ++k) {
        choose[k * p] = 1.0L;
        for (std::size_t j = 1; j <= k; ++j)
            choose[k * p + j] = choose[(k - 1) * p + j - 1] +
                                (j <= k - 1 ? choose[(k - 1) * p + j] : 0.0L);
    }

    std::vector<long double> acc(p), tmp(p), tpow(p);

    // past this point exp(-t) underflows even in extended precision
    constexpr long double kWashout = 12000.0L;

    auto shift = [&](long double t, bool flip_sign) {
        if (t == 0.0L) return;
        if (t > kWashout) {
            std::fill(acc.begin(), acc.end(), 0.0L);
            return;
        }
        long double decay = std::exp(-t);
        long double base = flip_sign ? -t : t;
        tpow[0] = 1.0L;
        for (std::size_t r = 1; r < p; ++r) tpow[r] = tpow[r - 1] * base;
        for (std::size_t q = 0; q < p; ++q) {
            long double s = 0.0L;
            for (std::size_t r = 0; r <= q; ++r)
                s += choose[q * p + r] * tpow[q - r] * acc[r];
            tmp[q] = decay * s;
        }
        acc.swap(tmp);
    };

    // Ascending pass: left contributions, u_i <= 0.
    std::fill(acc.begin(), acc.end(), 0.0L);
    for (std::size_t i = 0, j = 0; j < m; ++j) {
        if (j > 0) shift(static_cast<long double>(es[j] - es[j - 1]) / hl, true);
        while (i < n && xs[i] <= es[j]) {
            long double u = static_cast<long double>(xs[i] - es[j]) / hl;
            long double pw = ws[i] * std::exp(u);
            for (std::size_t q = 0; q < p; ++q) {
                acc[q] += pw;
                pw *= u;
            }
            ++i;
        }
        long double tie0 = 0.0L;
        for (std::size_t t = i; t-- > 0 && xs[t] == es[j];) tie0 += ws[t];
        if (want_k) {
            long double total = 0.0L;
            long double sign = 1.0L;
            for (std::size_t k = 0; k < p; ++k) {
                total += kernel.beta()[k] * sign * acc[k];
                sign = -sign;
            }
            out_k[j] = static_cast<double>(total);
        }
        if (want_d) {
            long double total = kernel.gamma()[0] * (acc[0] - tie0);
            long double sign = -1.0L;
            for (std::size_t k = 1; k < p; ++k) {
                total += kernel.gamma()[k] * sign * acc[k];
                sign = -sign;
            }
            out_d[j] = static_cast<double>(-total); // odd kernel derivative
        }
    }

    // Descending pass: right contributions, u_i > 0 strictly.
    std::fill(acc.begin(), acc.end(), 0.0L);
    for (std::size_t j = m, i = n; j-- > 0;) {
        if (j + 1 < m) shift(static_cast<long double>(es[j + 1] - es[j]) / hl, false);
        while (i > 0 && xs[i - 1] > es[j]) {
            --i;
            long double u = static_cast<long double>(xs[i] - es[j]) / hl;
            long double pw = ws[i] * std::exp(-u);
            for (std::size_t q = 0; q < p; ++q) {
                acc[q] += pw;
                pw *= u;
            }
        }
        if (want_k) {
            long double total = 0.0L;
            for (std::size_t k = 0; k < p; ++k) total += kernel.beta()[k] * acc[k];
            out_k[j] += static_cast<double>(total);
        }
        if (want_d) {
            long double total = 0.0L;
            for (std::size_t k = 0; k < p; ++k) total += kernel.gamma()[k] * acc[k];
            out_d[j] += static_cast<double>(total);
        }
    }
}

KernelSums run_exact(std::span<const double> sorted_values,
                     std::span<const double> sorted_weights, double h,
                     const PolyExpKernel& kernel, std::span<const double> x_eval,
                     SumMode mode) {
    const std::size_t m = x_eval.size();

    std::vector<std::size_t> eorder(m);
    std::iota(eorder.begin(), eorder.end(), 0);
    std::sort(eorder.begin(), eorder.end(),
              [&](std::size_t a, std::size_t b) { return x_eval[a] < x_eval[b]; });
    std::vector<double> es(m);
    for (std::size_t j = 0; j < m; ++j) es[j] = x_eval[eorder[j]];

    const double center = pooled_median(sorted_values, es);
    std::vector<double> xs(sorted_values.begin(), sorted_values.end());
    for (auto& v : xs) v -= center;
    for (auto& v : es) v -= center;

    const bool want_k = mode != SumMode::dksum;
    const bool want_d = mode != SumMode::ksum;
    std::vector<double> sk(want_k ? m : 0), sd(want_d ? m : 0);
    exact_sweep(xs, sorted_weights, es, h, kernel, want_k, want_d, sk, sd);

    KernelSums out;
    if (want_k) {
        out.ksum.resize(m);
        for (std::size_t j = 0; j < m; ++j) out.ksum[eorder[j]] = sk[j];
    }
    if (want_d) {
        out.dksum.resize(m);
        for (std::size_t j = 0; j < m; ++j) out.dksum[eorder[j]] = sd[j];
    }
    return out;
}

void check_common(std::size_t n, double h, std::span<const double> x_eval,
                  std::optional<int> nbin) {
    if (n == 0) throw invalid_input("fk_sum: empty sample");
    if (!(h > 0.0)) throw invalid_input("fk_sum: bandwidth must be positive");
    if (x_eval.empty()) throw invalid_input("fk_sum: no evaluation points");
    check_finite(x_eval, "fk_sum eval");
    if (nbin && *nbin < 2) throw invalid_input("fk_sum: nbin must be >= 2");
}

} // namespace

SortedSample::SortedSample(std::span<const double> values,
                           std::span<const double> weights) {
    if (values.size() != weights.size())
        throw invalid_input("sample: values and weights differ in length");
    if (values.empty()) throw invalid_input("sample: empty");
    check_finite(values, "sample values");
    check_finite(weights, "sample weights");

    order_.resize(values.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return weights[a] < weights[b];
    });
    values_.resize(values.size());
    weights_.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values_[i] = values[order_[i]];
        weights_[i] = weights[order_[i]];
    }
}

SortedSample::SortedSample(std::span<const double> values) {
    if (values.empty()) throw invalid_input("sample: empty");
    check_finite(values, "sample values");
    order_.resize(values.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    values_.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) values_[i] = values[order_[i]];
    weights_.assign(values.size(), 1.0);
}

void SortedSample::set_weights(std::span<const double> weights) {
    if (weights.size() != values_.size())
        throw invalid_input("sample: weight length mismatch");
    check_finite(weights, "sample weights");
    for (std::size_t i = 0; i < weights.size(); ++i) weights_[i] = weights[order_[i]];
}

KernelSums fk_sum(const SortedSample& sample, double h, const PolyExpKernel& kernel,
                  std::span<const double> x_eval, SumMode mode,
                  std::optional<int> nbin) {
    check_common(sample.size(), h, x_eval, nbin);
    if (nbin) {
        WeightedSample raw{{sample.values().begin(), sample.values().end()},
                           {sample.weights().begin(), sample.weights().end()}};
        WeightedSample binned = bin_sample(raw, *nbin);
        return run_exact(binned.values, binned.weights, h, kernel, x_eval, mode);
    }
    return run_exact(sample.values(), sample.weights(), h, kernel, x_eval, mode);
}

KernelSums fk_sum_presorted(std::span<const double> values,
                            std::span<const double> weights, double h,
                            const PolyExpKernel& kernel, std::span<const double> x_eval,
                            SumMode mode) {
    if (values.size() != weights.size())
        throw invalid_input("fk_sum: values and weights differ in length");
    check_common(values.size(), h, x_eval, std::nullopt);
    return run_exact(values, weights, h, kernel, x_eval, mode);
}

KernelSums fk_sum(const WeightedSample& sample, double h, const PolyExpKernel& kernel,
                  std::span<const double> x_eval, SumMode mode,
                  std::optional<int> nbin) {
    SortedSample sorted(sample.values, sample.weights);
    return fk_sum(sorted, h, kernel, x_eval, mode, nbin);
}

KernelSums fk_sum(const WeightedSample& sample, double h, const PolyExpKernel& kernel,
                  SumMode mode, std::optional<int> nbin) {
    return fk_sum(sample, h, kernel, sample.values, mode, nbin);
}

KernelSums naive_ksum(const WeightedSample& sample, double h,
                      const PolyExpKernel& kernel, std::span<const double> x_eval,
                      SumMode mode) {
    if (sample.values.size() != sample.weights.size())
        throw invalid_input("naive_ksum: values and weights differ in length");
    check_common(sample.values.size(), h, x_eval, std::nullopt);
    check_finite(sample.values, "sample values");
    check_finite(sample.weights, "sample weights");

    const bool want_k = mode != SumMode::dksum;
    const bool want_d = mode != SumMode::ksum;
    KernelSums out;
    if (want_k) out.ksum.resize(x_eval.size());
    if (want_d) out.dksum.resize(x_eval.size());
    for (std::size_t j = 0; j < x_eval.size(); ++j) {
        long double sk = 0.0L, sd = 0.0L;
        for (std::size_t i = 0; i < sample.values.size(); ++i) {
            double u = (sample.values[i] - x_eval[j]) / h;
            if (want_k) sk += static_cast<long double>(kernel.eval(u)) * sample.weights[i];
            if (want_d) sd += static_cast<long double>(kernel.deriv(u)) * sample.weights[i];
        }
        if (want_k) out.ksum[j] = static_cast<double>(sk);
        if (want_d) out.dksum[j] = static_cast<double>(sd);
    }
    return out;
}

WeightedSample bin_sample(const WeightedSample& sample, int nbin) {
    if (nbin < 2) throw invalid_input("bin_sample: nbin must be >= 2");
    if (sample.values.size() != sample.weights.size())
        throw invalid_input("bin_sample: values and weights differ in length");
    if (sample.values.empty()) throw invalid_input("bin_sample: empty sample");
    check_finite(sample.values, "sample values");
    check_finite(sample.weights, "sample weights");

    const auto [lo_it, hi_it] =
        std::minmax_element(sample.values.begin(), sample.values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (lo == hi) {
        double total = std::accumulate(sample.weights.begin(), sample.weights.end(), 0.0);
        return {{lo}, {total}};
    }

    const std::size_t nb = static_cast<std::size_t>(nbin);
    const double step = (hi - lo) / static_cast<double>(nb - 1);
    WeightedSample out;
    out.values.resize(nb);
    out.weights.assign(nb, 0.0);
    for (std::size_t t = 0; t < nb; ++t)
        out.values[t] = lo + step * static_cast<double>(t);

    for (std::size_t i = 0; i < sample.values.size(); ++i) {
        double pos = (sample.values[i] - lo) / step;
        auto t = static_cast<std::size_t>(pos);
        if (t > nb - 2) t = nb - 2;
        double frac = pos - static_cast<double>(t);
        if (frac < 0.0) frac = 0.0;
        if (frac > 1.0) frac = 1.0;
        double w_hi = sample.weights[i] * frac;
        out.weights[t] += sample.weights[i] - w_hi;
        out.weights[t + 1] += w_hi;
    }
    return out;
}

} // namespace ksum
