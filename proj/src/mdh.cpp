#include "ksum/mdh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ksum/error.hpp"
#include "ksum/optim.hpp"
#include "ksum/smoothers.hpp"

namespace ksum {

namespace {

constexpr int kGridSize = 200;
constexpr int kAlphaStages = 11;

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double t : v) s += t * t;
    return std::sqrt(s);
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

// KDE of sorted projections at arbitrary points, unit-integral kernel.
std::vector<double> kde_sorted(const ProjectedData& p, std::span<const double> at,
                               double h, const PolyExpKernel& kn) {
    std::vector<double> w = ones(p.points.size());
    KernelSums sums = fk_sum_presorted(p.points, w, h, kn, at, SumMode::ksum);
    const double scale = 1.0 / (static_cast<double>(p.points.size()) * h);
    for (auto& v : sums.ksum) v = std::max(0.0, v * scale);
    return sums.ksum;
}

double penalty(double b, double mean, double sd, double C, double alpha) {
    double lo = mean - alpha * sd, hi = mean + alpha * sd;
    double dist = b < lo ? lo - b : (b > hi ? b - hi : 0.0);
    return C * dist * dist;
}

std::vector<double> grid_over(const ProjectedData& p, double alpha) {
    double span = (alpha + 1.0) * p.sd;
    std::vector<double> grid(kGridSize);
    for (int t = 0; t < kGridSize; ++t)
        grid[static_cast<std::size_t>(t)] =
            p.mean - span + 2.0 * span * static_cast<double>(t) / (kGridSize - 1);
    return grid;
}

// Valley test on the discrete KDE grid: higher density must exist on both
// sides of the split.
bool passes_between_modes(const ProjectedData& p, double b, double h,
                          const PolyExpKernel& kn, double alpha) {
    std::vector<double> grid = grid_over(p, alpha);
    std::vector<double> dens = kde_sorted(p, grid, h, kn);
    std::size_t j = 0;
    double bestdist = std::abs(grid[0] - b);
    for (std::size_t t = 1; t < grid.size(); ++t) {
        double dd = std::abs(grid[t] - b);
        if (dd < bestdist) {
            bestdist = dd;
            j = t;
        }
    }
    double left = 0.0, right = 0.0;
    for (std::size_t t = 0; t < j; ++t) left = std::max(left, dens[t]);
    for (std::size_t t = j + 1; t < grid.size(); ++t) right = std::max(right, dens[t]);
    return left > dens[j] && right > dens[j];
}

} // namespace

ProjectedData project_data(const Matrix& x, std::span<const double> v) {
    if (v.size() != x.cols()) throw invalid_input("project: direction length mismatch");
    double nv = norm2(v);
    if (!(nv > 0.0)) throw invalid_input("project: zero direction");
    ProjectedData out;
    out.points.resize(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * v[j];
        out.points[i] = s / nv;
    }
    out.mean = std::accumulate(out.points.begin(), out.points.end(), 0.0) /
               static_cast<double>(out.points.size());
    double ss = 0.0;
    for (double t : out.points) ss += (t - out.mean) * (t - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(out.points.size() - 1));
    std::sort(out.points.begin(), out.points.end());
    return out;
}

double mdh_penalized_density(const ProjectedData& p, double b, double h,
                             const PolyExpKernel& kernel, double C, double alpha) {
    if (!(h > 0.0)) throw invalid_input("mdh: bandwidth must be positive");
    if (C < 0.0 || alpha < 0.0) throw invalid_input("mdh: C and alpha must be >= 0");
    const PolyExpKernel kn = kernel.normalized();
    double at[1] = {b};
    double dens = kde_sorted(p, at, h, kn)[0];
    return dens + penalty(b, p.mean, p.sd, C, alpha);
}

MinBResult mdh_min_b(const ProjectedData& p, double h, const PolyExpKernel& kernel,
                     double C, double alpha) {
    if (!(h > 0.0)) throw invalid_input("mdh: bandwidth must be positive");
    const PolyExpKernel kn = kernel.normalized();
    std::vector<double> grid = grid_over(p, alpha);
    std::vector<double> vals = kde_sorted(p, grid, h, kn);
    for (std::size_t t = 0; t < grid.size(); ++t)
        vals[t] += penalty(grid[t], p.mean, p.sd, C, alpha);

    std::size_t best = 0;
    for (std::size_t t = 1; t < grid.size(); ++t)
        if (vals[t] < vals[best]) best = t;

    auto objective = [&](double b) {
        double at[1] = {b};
        return kde_sorted(p, at, h, kn)[0] + penalty(b, p.mean, p.sd, C, alpha);
    };

    double lo = grid[best > 0 ? best - 1 : 0];
    double hi = grid[std::min(best + 1, grid.size() - 1)];
    const double width_target = 1e-6 * p.sd;
    while (hi - lo > width_target) {
        double m1 = lo + (hi - lo) / 3.0;
        double m2 = hi - (hi - lo) / 3.0;
        if (objective(m1) <= objective(m2))
            hi = m2;
        else
            lo = m1;
    }
    double b = (lo + hi) / 2.0;
    double v = objective(b);
    // keep the grid value if refinement landed worse (non-unimodal cell)
    if (vals[best] < v) {
        b = grid[best];
        v = vals[best];
    }
    return {b, v};
}

MDHModel mdh_fit(const Matrix& x, const MDHOptions& opt, const PolyExpKernel& kernel) {
    if (x.rows() < 10) throw invalid_input("mdh_fit: need at least 10 rows");
    if (x.cols() < 2) throw invalid_input("mdh_fit: need at least 2 columns");
    x.require_finite("mdh_fit");
    const std::size_t n = x.rows(), d = x.cols();

    std::vector<double> v0;
    if (opt.v0) {
        v0 = *opt.v0;
        if (v0.size() != d) throw invalid_input("mdh_fit: v0 length mismatch");
    } else {
        EigenDecomposition eig = sym_eig(covariance(x));
        v0.resize(d);
        for (std::size_t i = 0; i < d; ++i) v0[i] = eig.vectors(i, 0);
    }
    double nv = norm2(v0);
    if (!(nv > 0.0)) throw invalid_input("mdh_fit: zero initial direction");
    for (auto& t : v0) t /= nv;

    const PolyExpKernel kn = kernel.normalized();
    ProjectedData p0 = project_data(x, v0);
    const double h = opt.hmult * silverman_bandwidth(p0.points, kernel);

    double C;
    if (opt.C) {
        C = *opt.C;
        if (C < 0.0) throw invalid_input("mdh_fit: C must be >= 0");
    } else {
        std::vector<double> dens = kde_sorted(p0, grid_over(p0, 1.0), h, kn);
        C = 10.0 * *std::max_element(dens.begin(), dens.end()) / (p0.sd * p0.sd);
    }

    // Envelope gradient: b* held fixed; density part through the projections,
    // penalty part through the projected mean and sd.
    auto stage_objective = [&](double alpha) {
        return [&, alpha](std::span<const double> w, std::span<double> grad) {
            const double nw = norm2(w);
            ProjectedData pd = project_data(x, w);
            MinBResult mb = mdh_min_b(pd, h, kernel, C, alpha);
            const double b = mb.b;

            // dPhi/dp_i, with projections in the matrix row order
            std::vector<double> proj(n);
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) s += x(i, j) * w[j];
                proj[i] = s / nw;
            }
            const double scale = 1.0 / (static_cast<double>(n) * h * h);
            std::vector<double> dp(n);
            for (std::size_t i = 0; i < n; ++i)
                dp[i] = scale * kn.deriv((proj[i] - b) / h);

            double lo = pd.mean - alpha * pd.sd, hi = pd.mean + alpha * pd.sd;
            double dP_dmu = 0.0, dP_dsd = 0.0;
            if (b > hi) {
                double dist = b - hi;
                dP_dmu = -2.0 * C * dist;
                dP_dsd = -2.0 * C * dist * alpha;
            } else if (b < lo) {
                double dist = lo - b;
                dP_dmu = 2.0 * C * dist;
                dP_dsd = -2.0 * C * dist * alpha;
            }
            for (std::size_t i = 0; i < n; ++i)
                dp[i] += dP_dmu / static_cast<double>(n) +
                         dP_dsd * (proj[i] - pd.mean) /
                             (static_cast<double>(n - 1) * pd.sd);

            // through D_w p = X/||w|| - p w^T/||w||^2
            double pdotdp = 0.0;
            for (std::size_t i = 0; i < n; ++i) pdotdp += proj[i] * dp[i];
            for (std::size_t j = 0; j < d; ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += x(i, j) * dp[i];
                grad[j] = s / nw - pdotdp * w[j] / (nw * nw);
            }
            return mb.value;
        };
    };

    std::vector<double> v = v0;
    MDHModel result{v0, 0.0, 0.0, 0.0, false, h, kernel};
    bool have_alpha0 = false;

    for (int stage = 0; stage < kAlphaStages; ++stage) {
        double alpha = opt.alphamax * static_cast<double>(stage) / (kAlphaStages - 1);
        QnResult qr = qn_minimize(stage_objective(alpha), v, opt.qn_max_iter,
                                  opt.qn_grad_tol);
        v = qr.x;
        double nrm = norm2(v);
        if (nrm > 0.0)
            for (auto& t : v) t /= nrm;

        ProjectedData pd = project_data(x, v);
        MinBResult mb = mdh_min_b(pd, h, kernel, C, alpha);
        double at[1] = {mb.b};
        double dens = kde_sorted(pd, at, h, kn)[0];

        if (!have_alpha0) {
            result.v = v;
            result.b = mb.b;
            result.alpha_final = alpha;
            result.density_at_b = dens;
            have_alpha0 = true;
        }
        if (passes_between_modes(pd, mb.b, h, kn, alpha)) {
            result.v = v;
            result.b = mb.b;
            result.alpha_final = alpha;
            result.density_at_b = dens;
            result.separating = true;
        }
    }
    return result;
}

} // namespace ksum
