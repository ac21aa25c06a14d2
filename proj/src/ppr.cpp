#include "ksum/ppr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ksum/error.hpp"
#include "ksum/fastsum.hpp"
#include "ksum/optim.hpp"
#include "ksum/smoothers.hpp"

namespace ksum {

namespace {

constexpr double kDenFloor = 1e-20;

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double t : v) s += t * t;
    return std::sqrt(s);
}

std::vector<double> project(const Matrix& x, std::span<const double> w) {
    if (w.size() != x.cols()) throw invalid_input("ppr: projection length mismatch");
    double nw = norm2(w);
    if (!(nw > 0.0)) throw invalid_input("ppr: zero projection vector");
    std::vector<double> p(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * w[j];
        p[i] = s / nw;
    }
    return p;
}

} // namespace

double ppr_phi(std::span<const double> w, const Matrix& x, std::span<const double> r,
               double h, const PolyExpKernel& kernel) {
    if (!(h > 0.0)) throw invalid_input("ppr_phi: bandwidth must be positive");
    if (r.size() != x.rows()) throw invalid_input("ppr_phi: residual length mismatch");
    const PolyExpKernel kn = kernel.normalized();
    const double b0 = kn.beta()[0];
    std::vector<double> p = project(x, w);

    WeightedSample s{p, {r.begin(), r.end()}};
    KernelSums sr = fk_sum(s, h, kn, p, SumMode::ksum);
    s.weights.assign(p.size(), 1.0);
    KernelSums s1 = fk_sum(s, h, kn, p, SumMode::ksum);

    double phi = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double den = std::max(s1.ksum[i] - b0, kDenFloor);
        double rhat = (sr.ksum[i] - b0 * r[i]) / den;
        phi += (r[i] - rhat) * (r[i] - rhat);
    }
    return phi;
}

std::vector<double> ppr_grad(std::span<const double> w, const Matrix& x,
                             std::span<const double> r, double h,
                             const PolyExpKernel& kernel) {
    if (!(h > 0.0)) throw invalid_input("ppr_grad: bandwidth must be positive");
    if (r.size() != x.rows()) throw invalid_input("ppr_grad: residual length mismatch");
    const PolyExpKernel kn = kernel.normalized();
    const double b0 = kn.beta()[0];
    const std::size_t n = x.rows(), d = x.cols();
    const double nw = norm2(w);
    std::vector<double> p = project(x, w);

    WeightedSample s{p, std::vector<double>(n, 1.0)};
    KernelSums s1 = fk_sum(s, h, kn, p, SumMode::both);
    s.weights.assign(r.begin(), r.end());
    KernelSums sr = fk_sum(s, h, kn, p, SumMode::both);

    std::vector<double> s1_loo(n), rhat(n), ratio(n);
    for (std::size_t i = 0; i < n; ++i) {
        s1_loo[i] = std::max(s1.ksum[i] - b0, kDenFloor);
        rhat[i] = (sr.ksum[i] - b0 * r[i]) / s1_loo[i];
        ratio[i] = (rhat[i] - r[i]) / s1_loo[i];
    }

    std::vector<double> w1(n);
    for (std::size_t i = 0; i < n; ++i) w1[i] = rhat[i] * ratio[i];
    s.weights = w1;
    KernelSums t1 = fk_sum(s, h, kn, p, SumMode::dksum);
    s.weights.assign(ratio.begin(), ratio.end());
    KernelSums t2 = fk_sum(s, h, kn, p, SumMode::dksum);

    std::vector<double> dp(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t3 = ratio[i] * (rhat[i] * s1.dksum[i] - sr.dksum[i]);
        dp[i] = 2.0 / h * (t1.dksum[i] - r[i] * t2.dksum[i] + t3);
    }

    // D_w p = X/||w|| - p w^T/||w||^2
    std::vector<double> grad(d, 0.0);
    double pdotdp = 0.0;
    for (std::size_t i = 0; i < n; ++i) pdotdp += p[i] * dp[i];
    for (std::size_t j = 0; j < d; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += x(i, j) * dp[i];
        grad[j] = acc / nw - pdotdp * w[j] / (nw * nw);
    }
    return grad;
}

std::vector<double> ppr_component_fit_at(const PPRComponent& comp,
                                         std::span<const double> proj,
                                         const PolyExpKernel& kernel) {
    const PolyExpKernel kn = kernel.normalized();
    WeightedSample s{comp.train_proj, comp.train_resid};
    KernelSums sr = fk_sum(s, comp.h, kn, proj, SumMode::ksum);
    s.weights.assign(comp.train_proj.size(), 1.0);
    KernelSums s1 = fk_sum(s, comp.h, kn, proj, SumMode::ksum);
    std::vector<double> fit(proj.size());
    for (std::size_t i = 0; i < proj.size(); ++i)
        fit[i] = sr.ksum[i] / std::max(s1.ksum[i], kDenFloor);
    return fit;
}

PPRComponent ppr_fit_component(const Matrix& x, std::span<const double> r,
                               const PolyExpKernel& kernel,
                               std::optional<std::span<const double>> w0,
                               const PPROptions& opt) {
    if (x.rows() < 20) throw invalid_input("ppr: need at least 20 rows");
    if (r.size() != x.rows()) throw invalid_input("ppr: residual length mismatch");
    x.require_finite("ppr");
    const std::size_t d = x.cols();

    std::vector<double> w;
    if (w0) {
        if (w0->size() != d) throw invalid_input("ppr: w0 length mismatch");
        w.assign(w0->begin(), w0->end());
    } else {
        w = ridge_ols(x, r, 0.01);
        if (norm2(w) < 1e-12) w.assign(d, 1.0 / std::sqrt(static_cast<double>(d)));
    }

    // Oversmoothing pilot bandwidth from the covariate scale.
    EigenDecomposition eig = sym_eig(covariance(x));
    const double pilot = std::sqrt(std::max(eig.values[0], 0.0)) /
                         std::pow(static_cast<double>(x.rows()), 0.2);
    if (!(pilot > 0.0)) throw numeric_error("ppr: degenerate covariate scale");

    auto objective = [&](std::span<const double> wi, std::span<double> grad) {
        std::vector<double> g = ppr_grad(wi, x, r, pilot, kernel);
        std::copy(g.begin(), g.end(), grad.begin());
        return ppr_phi(wi, x, r, pilot, kernel);
    };
    QnResult qr = qn_minimize(objective, w, opt.qn_max_iter, opt.qn_grad_tol);
    w = qr.x;
    double nw = norm2(w);
    if (!(nw > 0.0)) throw numeric_error("ppr: optimizer collapsed the projection");
    for (auto& t : w) t /= nw;

    PPRComponent comp;
    comp.w = w;
    comp.train_proj = project(x, w);
    comp.train_resid.assign(r.begin(), r.end());

    SortedPairs pairs(comp.train_proj, r);
    comp.h = scalar_minimize(
        [&](double h) { return loo_sse_objective(h, pairs, kernel); }, pilot / 50.0,
        pilot);
    return comp;
}

PPRModel ppr_fit(const Matrix& x, std::span<const double> y, int nterms,
                 const PolyExpKernel& kernel, const PPROptions& opt) {
    if (nterms < 1) throw invalid_input("ppr_fit: nterms must be >= 1");
    if (y.size() != x.rows()) throw invalid_input("ppr_fit: response length mismatch");

    PPRModel model{0.0, {}, kernel};
    model.mu = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    std::vector<double> r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - model.mu;

    for (int term = 0; term < nterms; ++term) {
        PPRComponent comp = ppr_fit_component(x, r, kernel, std::nullopt, opt);
        std::vector<double> fitted =
            ppr_component_fit_at(comp, comp.train_proj, kernel);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= fitted[i];
        model.components.push_back(std::move(comp));
    }
    return model;
}

std::vector<double> ppr_predict(const PPRModel& model, const Matrix& xnew) {
    std::vector<double> pred(xnew.rows(), model.mu);
    for (const auto& comp : model.components) {
        std::vector<double> proj = project(xnew, comp.w);
        std::vector<double> fit = ppr_component_fit_at(comp, proj, model.kernel);
        for (std::size_t i = 0; i < pred.size(); ++i) pred[i] += fit[i];
    }
    return pred;
}

} // namespace ksum
