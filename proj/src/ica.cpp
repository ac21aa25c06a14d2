#include "ksum/ica.hpp"

#include <algorithm>
#include <cmath>

#include "ksum/error.hpp"
#include "ksum/fastsum.hpp"
#include "ksum/smoothers.hpp"

namespace ksum {

namespace {

constexpr double kDenFloor = 1e-20;

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double t : v) s += t * t;
    return std::sqrt(s);
}

std::vector<double> project(const Matrix& xw, std::span<const double> q) {
    if (q.size() != xw.cols()) throw invalid_input("ica: projection length mismatch");
    double nq = norm2(q);
    if (!(nq > 0.0)) throw invalid_input("projection: zero direction");
    std::vector<double> p(xw.rows());
    for (std::size_t i = 0; i < xw.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < xw.cols(); ++j) s += xw(i, j) * q[j];
        p[i] = s / nq;
    }
    return p;
}

// KDE at the sample points, self term included, unit-integral kernel.
std::vector<double> kde_at_points(std::span<const double> p, double h,
                                  const PolyExpKernel& kn, std::optional<int> nbin) {
    WeightedSample s{{p.begin(), p.end()}, std::vector<double>(p.size(), 1.0)};
    KernelSums sums = fk_sum(s, h, kn, p, SumMode::ksum, nbin);
    const double scale = 1.0 / (static_cast<double>(p.size()) * h);
    std::vector<double> f(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        f[i] = std::max(sums.ksum[i] * scale, kDenFloor);
    return f;
}

} // namespace

double entropy_index(std::span<const double> q, const Matrix& xw, double h,
                     const PolyExpKernel& kernel, std::optional<int> nbin) {
    if (!(h > 0.0)) throw invalid_input("entropy_index: bandwidth must be positive");
    const PolyExpKernel kn = kernel.normalized();
    std::vector<double> p = project(xw, q);
    std::vector<double> f = kde_at_points(p, h, kn, nbin);
    double s = 0.0;
    for (double v : f) s += std::log(v);
    return -s / static_cast<double>(p.size());
}

std::vector<double> entropy_grad(std::span<const double> q, const Matrix& xw, double h,
                                 const PolyExpKernel& kernel, std::optional<int> nbin) {
    if (!(h > 0.0)) throw invalid_input("entropy_grad: bandwidth must be positive");
    const PolyExpKernel kn = kernel.normalized();
    const std::size_t n = xw.rows(), d = xw.cols();
    const double nq = norm2(q);
    std::vector<double> p = project(xw, q);
    std::vector<double> f = kde_at_points(p, h, kn, nbin);

    // dE/dp_t = (D'(1/f)_t + D'(1)_t / f_t) / (n^2 h^2), where D' denotes the
    // kernel-derivative sum over the projections.
    std::vector<double> inv_f(n);
    for (std::size_t i = 0; i < n; ++i) inv_f[i] = 1.0 / f[i];
    WeightedSample sample{{p.begin(), p.end()}, std::move(inv_f)};
    KernelSums d_invf = fk_sum(sample, h, kn, p, SumMode::dksum, nbin);
    sample.weights.assign(n, 1.0);
    KernelSums d_one = fk_sum(sample, h, kn, p, SumMode::dksum, nbin);

    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n) * h * h);
    std::vector<double> dp(n);
    for (std::size_t i = 0; i < n; ++i)
        dp[i] = scale * (d_invf.dksum[i] + d_one.dksum[i] / f[i]);

    // Pull back through p = Xw q / ||q||: D_q p = Xw/||q|| - p q^T/||q||^2.
    std::vector<double> grad(d, 0.0);
    double pdotdp = 0.0;
    for (std::size_t i = 0; i < n; ++i) pdotdp += p[i] * dp[i];
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += xw(i, j) * dp[i];
        grad[j] = s / nq - pdotdp * q[j] / (nq * nq);
    }
    return grad;
}

ICAModel ica_fit(const Matrix& x, const ICAOptions& opt, const PolyExpKernel& kernel) {
    const std::size_t d = x.cols();
    if (opt.ncomp < 1 || opt.ncomp > d) throw invalid_input("ica_fit: ncomp out of range");
    if (x.rows() <= opt.ncomp) throw invalid_input("ica_fit: need more rows than ncomp");
    if (opt.it < 1) throw invalid_input("ica_fit: it must be >= 1");

    WhitenedData wd = whiten(x, opt.ncomp);
    const Matrix& xw = wd.whitened;
    const std::size_t k = opt.ncomp;

    std::vector<std::vector<double>> qs;
    std::vector<double> bandwidths;

    auto orthonormalize = [&](std::vector<double>& q) {
        for (const auto& prev : qs) {
            double c = 0.0;
            for (std::size_t j = 0; j < k; ++j) c += q[j] * prev[j];
            for (std::size_t j = 0; j < k; ++j) q[j] -= c * prev[j];
        }
        double nq = norm2(q);
        if (nq > 1e-12)
            for (auto& t : q) t /= nq;
        return nq > 1e-12;
    };

    for (std::size_t comp = 0; comp < k; ++comp) {
        std::vector<double> q(k, 0.0);
        q[comp] = 1.0;
        if (!orthonormalize(q)) {
            // identity column already spanned; fall back to any free axis
            for (std::size_t alt = 0; alt < k; ++alt) {
                std::fill(q.begin(), q.end(), 0.0);
                q[alt] = 1.0;
                if (orthonormalize(q)) break;
            }
        }

        std::vector<double> p = project(xw, q);
        double h = opt.hmult * silverman_bandwidth(p, kernel);
        bandwidths.push_back(h);

        double f = entropy_index(q, xw, h, kernel, opt.nbin);
        double angle = 0.5; // step measured as rotation magnitude on the sphere
        for (int iter = 0; iter < opt.it; ++iter) {
            std::vector<double> g = entropy_grad(q, xw, h, kernel, opt.nbin);
            // tangent component: drop directions along fixed earlier q's
            for (const auto& prev : qs) {
                double c = 0.0;
                for (std::size_t j = 0; j < k; ++j) c += g[j] * prev[j];
                for (std::size_t j = 0; j < k; ++j) g[j] -= c * prev[j];
            }
            double gn = norm2(g);
            if (gn < 1e-12) break;

            bool moved = false;
            angle = std::min(angle * 2.0, 1.0);
            for (int ls = 0; ls < 40; ++ls) {
                std::vector<double> trial(k);
                for (std::size_t j = 0; j < k; ++j)
                    trial[j] = q[j] - (angle / gn) * g[j];
                if (orthonormalize(trial)) {
                    double ft = entropy_index(trial, xw, h, kernel, opt.nbin);
                    if (ft < f) {
                        q = std::move(trial);
                        f = ft;
                        moved = true;
                        break;
                    }
                }
                angle *= 0.5;
            }
            if (!moved) break;
        }
        qs.push_back(std::move(q));
    }

    ICAModel model{wd.whitener, Matrix(k, k), Matrix(), wd.center, std::move(bandwidths),
                   kernel};
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < k; ++i) model.unmixing(i, j) = qs[j][i];
    model.sources = xw * model.unmixing;
    return model;
}

} // namespace ksum
