#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ksum/error.hpp"
#include "ksum/ica.hpp"
#include "ksum/mdh.hpp"
#include "ksum/metrics.hpp"
#include "ksum/ppr.hpp"
#include "ksum/smoothers.hpp"
#include "test_helpers.hpp"

using namespace ksum;
using namespace ksum::testing;

namespace {

std::vector<double> unit(std::vector<double> v) {
    double n = 0.0;
    for (double t : v) n += t * t;
    n = std::sqrt(n);
    for (double& t : v) t /= n;
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

// Brute-force entropy of the plain KDE at the sample points.
double brute_entropy(std::span<const double> p, double h, const PolyExpKernel& kernel) {
    const PolyExpKernel kn = kernel.normalized();
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        double f = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) f += kn.eval((p[i] - p[j]) / h);
        f /= static_cast<double>(p.size()) * h;
        s += std::log(std::max(f, 1e-20));
    }
    return -s / static_cast<double>(p.size());
}

double brute_ppr_phi(std::span<const double> p, std::span<const double> r, double h,
                     const PolyExpKernel& kernel) {
    const PolyExpKernel kn = kernel.normalized();
    double phi = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j == i) continue;
            double w = kn.eval((p[j] - p[i]) / h);
            num += w * r[j];
            den += w;
        }
        double rhat = num / std::max(den, 1e-20);
        phi += (r[i] - rhat) * (r[i] - rhat);
    }
    return phi;
}

} // namespace

TEST_CASE("entropy_index approaches the Gaussian entropy") {
    CounterRng rng(1);
    Matrix xw(100000, 1);
    std::vector<double> p(xw.rows());
    for (std::size_t i = 0; i < xw.rows(); ++i) {
        xw(i, 0) = rng.normal();
        p[i] = xw(i, 0);
    }
    double h = silverman_bandwidth(p, PolyExpKernel::default_kernel());
    double idx = entropy_index(std::vector<double>{1.0}, xw, h,
                               PolyExpKernel::default_kernel());
    double gauss = 0.5 * std::log(2.0 * M_PI * std::exp(1.0));
    CHECK(std::abs(idx - gauss) < 0.05);
}

TEST_CASE("entropy_index ignores the scale of q") {
    CounterRng rng(2);
    Matrix xw(300, 3);
    for (std::size_t i = 0; i < xw.rows(); ++i)
        for (std::size_t j = 0; j < 3; ++j) xw(i, j) = rng.normal();
    std::vector<double> q{0.3, -1.2, 0.5};
    PolyExpKernel k = PolyExpKernel::default_kernel();
    double base = entropy_index(q, xw, 0.4, k);
    for (double c : {0.01, 3.0, 1000.0}) {
        std::vector<double> cq = q;
        for (auto& t : cq) t *= c;
        CHECK(rel_err(entropy_index(cq, xw, 0.4, k), base) < 1e-10);
    }
}

TEST_CASE("entropy_index matches the brute-force estimate") {
    CounterRng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        std::size_t n = 50 + static_cast<std::size_t>(rng.uniform() * 250);
        Matrix xw(n, 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < 2; ++j) xw(i, j) = rng.normal();
        std::vector<double> q = unit({rng.normal(), rng.normal()});
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = q[0] * xw(i, 0) + q[1] * xw(i, 1);
        double h = 0.2 + rng.uniform();
        PolyExpKernel k = PolyExpKernel::smooth(static_cast<int>(rng.uniform() * 3));
        CHECK(rel_err(entropy_index(q, xw, h, k), brute_entropy(p, h, k)) < 1e-10);
    }
}

TEST_CASE("entropy_grad matches finite differences") {
    CounterRng rng(4);
    PolyExpKernel k = PolyExpKernel::default_kernel();
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 200, d = 4;
        Matrix xw(n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) xw(i, j) = rng.normal();
        std::vector<double> q = random_normal(d, rng);
        double h = 0.3 + rng.uniform();

        std::vector<double> g = entropy_grad(q, xw, h, k);
        const double eps = 1e-5;
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> qp = q, qm = q;
            qp[j] += eps;
            qm[j] -= eps;
            double fd = (entropy_index(qp, xw, h, k) - entropy_index(qm, xw, h, k)) /
                        (2.0 * eps);
            CHECK(std::abs(g[j] - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("entropy_grad is tangent to the unit sphere") {
    CounterRng rng(5);
    Matrix xw(400, 5);
    for (std::size_t i = 0; i < 400; ++i)
        for (std::size_t j = 0; j < 5; ++j) xw(i, j) = rng.normal();
    std::vector<double> q = unit(random_normal(5, rng));
    std::vector<double> g = entropy_grad(q, xw, 0.5, PolyExpKernel::default_kernel());
    CHECK(std::abs(dot(g, q)) < 1e-8 * std::max(1e-30, norm(g)));
}

TEST_CASE("entropy_grad vanishes on constant data") {
    Matrix xw(50, 3, 0.0);
    std::vector<double> g = entropy_grad(std::vector<double>{1.0, 0.0, 0.0}, xw, 0.5,
                                         PolyExpKernel::default_kernel());
    for (double t : g) CHECK(t == 0.0);
}

TEST_CASE("ica recovers already-unmixed sources") {
    CounterRng rng(6);
    ICAMixture mix = sim_ica_mixture(2000, 4, rng);
    ICAOptions opt;
    opt.ncomp = 4;
    ICAModel model = ica_fit(mix.sources, opt); // identity mixing
    Matrix full = (model.whitener * model.unmixing).transposed();
    CHECK(amari_distance(full, Matrix::identity(4)) < 0.05);
}

TEST_CASE("ica unmixing is orthonormal") {
    CounterRng rng(7);
    ICAMixture mix = sim_ica_mixture(1000, 3, rng);
    ICAOptions opt;
    opt.ncomp = 3;
    ICAModel model = ica_fit(mix.mixed, opt);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < 3; ++i)
                s += model.unmixing(i, a) * model.unmixing(i, b);
            CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
}

TEST_CASE("ica separates a random mixture") {
    CounterRng rng(8);
    ICAMixture mix = sim_ica_mixture(2000, 4, rng);
    ICAOptions opt;
    opt.ncomp = 4;
    ICAModel model = ica_fit(mix.mixed, opt);
    Matrix full = (model.whitener * model.unmixing).transposed();
    CHECK(amari_distance(full, inverse(mix.mixing).transposed()) < 0.25);
}

TEST_CASE("ica sources equal centered data through the transform") {
    CounterRng rng(9);
    ICAMixture mix = sim_ica_mixture(500, 3, rng);
    ICAOptions opt;
    opt.ncomp = 3;
    ICAModel model = ica_fit(mix.mixed, opt);
    Matrix full = model.whitener * model.unmixing;
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < 3; ++c)
                s += (mix.mixed(i, c) - model.center[c]) * full(c, j);
            CHECK(model.sources(i, j) == doctest::Approx(s).epsilon(1e-10));
        }
}

TEST_CASE("mdh penalized density: penalty vanishes at the mean") {
    CounterRng rng(10);
    Matrix x(200, 2);
    for (std::size_t i = 0; i < 200; ++i)
        for (std::size_t j = 0; j < 2; ++j) x(i, j) = rng.normal();
    ProjectedData pd = project_data(x, unit({1.0, 1.0}));
    PolyExpKernel k = PolyExpKernel::default_kernel();
    for (double alpha : {0.0, 0.5, 1.0}) {
        double with_pen = mdh_penalized_density(pd, pd.mean, 0.3, k, 100.0, alpha);
        DensityEstimate dens = kde(pd.points, 0.3, k, std::vector<double>{pd.mean});
        CHECK(with_pen == doctest::Approx(dens.density[0]).epsilon(1e-12));
    }
}

TEST_CASE("mdh penalized density: quadratic penalty beyond the interval") {
    CounterRng rng(11);
    Matrix x(150, 2);
    for (std::size_t i = 0; i < 150; ++i)
        for (std::size_t j = 0; j < 2; ++j) x(i, j) = rng.normal();
    ProjectedData pd = project_data(x, unit({1.0, 0.0}));
    PolyExpKernel k = PolyExpKernel::default_kernel();
    double alpha = 0.5, C = 42.0, delta = 1.7;
    double b = pd.mean + alpha * pd.sd + delta;
    double val = mdh_penalized_density(pd, b, 0.4, k, C, alpha);
    double dens = kde(pd.points, 0.4, k, std::vector<double>{b}).density[0];
    CHECK(val - dens == doctest::Approx(C * delta * delta).epsilon(1e-10));
}

TEST_CASE("mdh_min_b pins to the mean for unimodal data at alpha zero") {
    CounterRng rng(12);
    Matrix x(500, 2);
    for (std::size_t i = 0; i < 500; ++i)
        for (std::size_t j = 0; j < 2; ++j) x(i, j) = rng.normal();
    ProjectedData pd = project_data(x, unit({1.0, 0.0}));
    MinBResult mb = mdh_min_b(pd, 0.4, PolyExpKernel::default_kernel(), 50.0, 0.0);
    double grid_step = 2.0 * pd.sd / 199.0;
    CHECK(std::abs(mb.b - pd.mean) <= 2.0 * grid_step);
}

TEST_CASE("mdh_min_b agrees with a dense grid oracle") {
    CounterRng rng(13);
    for (int trial = 0; trial < 3; ++trial) {
        Matrix x(400, 2);
        for (std::size_t i = 0; i < 400; ++i) {
            double c = rng.uniform() < 0.5 ? -2.0 : 2.0;
            x(i, 0) = c + 0.7 * rng.normal();
            x(i, 1) = rng.normal();
        }
        ProjectedData pd = project_data(x, unit({1.0, 0.0}));
        PolyExpKernel k = PolyExpKernel::default_kernel();
        const double alpha = 1.0, C = 25.0, h = 0.3;
        MinBResult mb = mdh_min_b(pd, h, k, C, alpha);

        double span = (alpha + 1.0) * pd.sd;
        double best_b = 0.0, best_v = 1e300;
        const int fine = 20000;
        for (int t = 0; t <= fine; ++t) {
            double b = pd.mean - span + 2.0 * span * t / fine;
            double v = mdh_penalized_density(pd, b, h, k, C, alpha);
            if (v < best_v) {
                best_v = v;
                best_b = b;
            }
        }
        CHECK(std::abs(mb.b - best_b) <= 2.0 * (2.0 * span / fine) + 1e-6 * pd.sd);
        CHECK(mb.value <= best_v + 1e-10);
    }
}

TEST_CASE("mdh_min_b finds the antimode of a balanced mixture") {
    CounterRng rng(14);
    Matrix x(2000, 2);
    for (std::size_t i = 0; i < 2000; ++i) {
        double c = i % 2 == 0 ? -3.0 : 3.0;
        x(i, 0) = c + rng.normal();
        x(i, 1) = rng.normal();
    }
    ProjectedData pd = project_data(x, unit({1.0, 0.0}));
    PolyExpKernel k = PolyExpKernel::default_kernel();
    MinBResult mb = mdh_min_b(pd, silverman_bandwidth(pd.points, k), k, 50.0, 1.0);
    CHECK(std::abs(mb.b - pd.mean) < 0.35 * pd.sd); // antimode sits midway
}

TEST_CASE("mdh_fit separates two spherical clusters") {
    CounterRng rng(15);
    const std::size_t n = 600, d = 4;
    Matrix x(n, d);
    std::vector<int> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
        truth[i] = rng.uniform() < 0.5 ? 0 : 1;
        for (std::size_t j = 0; j < d; ++j)
            x(i, j) =
                (truth[i] == 0 ? -2.0 : 2.0) * (j == 0 ? 1.0 : 0.3) + rng.normal();
    }
    MDHModel model = mdh_fit(x);
    std::vector<int> side(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += x(i, j) * model.v[j];
        side[i] = s > model.b ? 1 : -1;
    }
    CHECK(separation_error(truth, side) <= 0.02);
    CHECK(model.separating);
    CHECK(std::abs(norm(model.v) - 1.0) < 1e-12);

    // split density no larger than the density at the projected mean
    ProjectedData pd = project_data(x, model.v);
    double at_b =
        kde(pd.points, model.h, model.kernel, std::vector<double>{model.b}).density[0];
    double at_mu =
        kde(pd.points, model.h, model.kernel, std::vector<double>{pd.mean}).density[0];
    CHECK(at_b <= at_mu + 1e-12);
}

TEST_CASE("mdh_fit is equivariant under rotation") {
    CounterRng rng(16);
    const std::size_t n = 500, d = 3;
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        double c = rng.uniform() < 0.5 ? -2.5 : 2.5;
        x(i, 0) = c + rng.normal();
        x(i, 1) = rng.normal();
        x(i, 2) = rng.normal();
    }
    Matrix sym(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            double v = rng.normal();
            sym(i, j) = v;
            sym(j, i) = v;
        }
    Matrix rot = sym_eig(sym).vectors; // orthonormal
    Matrix xr = x * rot;

    MDHModel base = mdh_fit(x);
    MDHModel rotated = mdh_fit(xr);

    std::vector<double> expected(d, 0.0); // R^T v
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) expected[j] += rot(i, j) * base.v[i];
    CHECK(std::abs(dot(rotated.v, expected)) > 0.98);
    CHECK(std::abs(std::abs(rotated.b) - std::abs(base.b)) < 0.1);
}

TEST_CASE("mdh_fit flags unimodal data as non-separating") {
    // enough data and smoothing that the projected estimates have no
    // sampling-noise valleys for the direction search to latch onto
    CounterRng rng(17);
    Matrix x(2000, 3);
    for (std::size_t i = 0; i < 2000; ++i)
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
    MDHOptions opt;
    opt.hmult = 1.5;
    MDHModel model = mdh_fit(x, opt);
    CHECK_FALSE(model.separating);
    CHECK(model.alpha_final == 0.0);
}

TEST_CASE("ppr_phi is zero for zero residuals") {
    CounterRng rng(18);
    Matrix x(100, 3);
    for (std::size_t i = 0; i < 100; ++i)
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
    std::vector<double> r(100, 0.0);
    CHECK(ppr_phi(unit(random_normal(3, rng)), x, r, 0.5,
                  PolyExpKernel::default_kernel()) == 0.0);
}

TEST_CASE("ppr_phi matches the brute-force loo-nw sse") {
    CounterRng rng(19);
    for (int trial = 0; trial < 5; ++trial) {
        std::size_t n = 60 + static_cast<std::size_t>(rng.uniform() * 240);
        Matrix x(n, 3);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
        std::vector<double> r = random_normal(n, rng);
        std::vector<double> w = unit(random_normal(3, rng));
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i)
            p[i] = w[0] * x(i, 0) + w[1] * x(i, 1) + w[2] * x(i, 2);
        double h = 0.2 + rng.uniform();
        PolyExpKernel k = PolyExpKernel::default_kernel();
        CHECK(rel_err(ppr_phi(w, x, r, h, k), brute_ppr_phi(p, r, h, k)) < 1e-9);
    }
}

TEST_CASE("ppr_phi ignores the scale of w") {
    CounterRng rng(20);
    Matrix x(150, 4);
    for (std::size_t i = 0; i < 150; ++i)
        for (std::size_t j = 0; j < 4; ++j) x(i, j) = rng.normal();
    std::vector<double> r = random_normal(150, rng);
    std::vector<double> w = random_normal(4, rng);
    PolyExpKernel k = PolyExpKernel::default_kernel();
    double base = ppr_phi(w, x, r, 0.4, k);
    for (double c : {0.001, 7.5, 400.0}) {
        std::vector<double> cw = w;
        for (auto& t : cw) t *= c;
        CHECK(rel_err(ppr_phi(cw, x, r, 0.4, k), base) < 1e-10);
    }
}

TEST_CASE("ppr_grad matches finite differences") {
    CounterRng rng(21);
    PolyExpKernel k = PolyExpKernel::default_kernel();
    for (int trial = 0; trial < 3; ++trial) {
        const std::size_t n = 300, d = 5;
        Matrix x(n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.normal();
        std::vector<double> r = random_normal(n, rng);
        std::vector<double> w = random_normal(d, rng);
        double h = 0.3 + rng.uniform();

        std::vector<double> g = ppr_grad(w, x, r, h, k);
        const double eps = 1e-5;
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> wp = w, wm = w;
            wp[j] += eps;
            wm[j] -= eps;
            double fd =
                (ppr_phi(wp, x, r, h, k) - ppr_phi(wm, x, r, h, k)) / (2.0 * eps);
            CHECK(std::abs(g[j] / fd - 1.0) < 1e-5);
            CHECK(std::abs(g[j] - fd) < 1e-4 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("ppr_grad is zero for zero residuals and tangent to w") {
    CounterRng rng(22);
    Matrix x(120, 4);
    for (std::size_t i = 0; i < 120; ++i)
        for (std::size_t j = 0; j < 4; ++j) x(i, j) = rng.normal();
    PolyExpKernel k = PolyExpKernel::default_kernel();

    std::vector<double> zero(120, 0.0);
    std::vector<double> g0 = ppr_grad(unit(random_normal(4, rng)), x, zero, 0.5, k);
    for (double t : g0) CHECK(t == 0.0);

    std::vector<double> r = random_normal(120, rng);
    std::vector<double> w = unit(random_normal(4, rng));
    std::vector<double> g = ppr_grad(w, x, r, 0.5, k);
    CHECK(std::abs(dot(g, w)) < 1e-8 * std::max(1e-30, norm(g) * norm(w)));
}

TEST_CASE("ppr_fit_component recovers a single-index direction") {
    CounterRng rng(23);
    const std::size_t n = 600, d = 6;
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.normal();
    std::vector<double> w_true = unit(random_normal(d, rng));
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += x(i, j) * w_true[j];
        r[i] = std::tanh(2.0 * s) + 0.5 * s + 0.05 * rng.normal();
    }
    PPRComponent comp = ppr_fit_component(x, r, PolyExpKernel::default_kernel());
    CHECK(std::abs(dot(comp.w, w_true)) > 0.95);

    // descent from the ridge initializer, and bracket containment for h
    EigenDecomposition eig = sym_eig(covariance(x));
    double pilot = std::sqrt(eig.values[0]) / std::pow(static_cast<double>(n), 0.2);
    std::vector<double> w0 = ridge_ols(x, r, 0.01);
    PolyExpKernel k = PolyExpKernel::default_kernel();
    CHECK(ppr_phi(comp.w, x, r, pilot, k) <= ppr_phi(w0, x, r, pilot, k) + 1e-9);
    CHECK(comp.h >= pilot / 50.0 - 1e-12);
    CHECK(comp.h <= pilot + 1e-12);
}

TEST_CASE("ppr_fit explains linear data with one term") {
    CounterRng rng(24);
    const std::size_t n = 400, d = 5;
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.normal();
    std::vector<double> w_true = unit(random_normal(d, rng));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += x(i, j) * w_true[j];
        y[i] = 2.0 + 3.0 * s;
    }
    PPRModel model = ppr_fit(x, y, 1);
    std::vector<double> fit = ppr_predict(model, x);
    CHECK(r_squared(y, fit) > 0.99);
}

TEST_CASE("ppr held-out performance on the two-term generator") {
    CounterRng rng(25);
    PPRData data = sim_ppr_data(1000, 10, rng);
    Matrix xtrain(500, 10), xtest(500, 10);
    std::vector<double> ytrain(500), ytest(500);
    for (std::size_t i = 0; i < 500; ++i) {
        for (std::size_t j = 0; j < 10; ++j) {
            xtrain(i, j) = data.x(i, j);
            xtest(i, j) = data.x(i + 500, j);
        }
        ytrain[i] = data.y[i];
        ytest[i] = data.y[i + 500];
    }
    PPRModel model = ppr_fit(xtrain, ytrain, 2);
    std::vector<double> pred = ppr_predict(model, xtest);
    CHECK(r_squared(ytest, pred) > 0.5);
}

TEST_CASE("adding components never increases the training sse") {
    CounterRng rng(26);
    PPRData data = sim_ppr_data(300, 6, rng);
    double prev = 1e300;
    for (int nterms = 1; nterms <= 3; ++nterms) {
        PPRModel model = ppr_fit(data.x, data.y, nterms);
        std::vector<double> fit = ppr_predict(model, data.x);
        double sse = 0.0;
        for (std::size_t i = 0; i < data.y.size(); ++i)
            sse += (data.y[i] - fit[i]) * (data.y[i] - fit[i]);
        CHECK(sse <= prev + 1e-9);
        prev = sse;
    }
}

TEST_CASE("projection methods validate their inputs") {
    Matrix x(5, 2, 1.0);
    CHECK_THROWS_AS(mdh_fit(x), invalid_input); // too few rows
    Matrix x2(100, 1, 1.0);
    CHECK_THROWS_AS(mdh_fit(x2), invalid_input); // too few columns
    std::vector<double> r(10, 0.0);
    Matrix x3(10, 2, 0.5);
    CHECK_THROWS_AS(ppr_fit_component(x3, r, PolyExpKernel::default_kernel()),
                    invalid_input); // below the row minimum
    ICAOptions opt;
    opt.ncomp = 5;
    CHECK_THROWS_AS(ica_fit(Matrix(20, 3, 0.0), opt), invalid_input);
}

TEST_CASE("mdh objective at the solution dominates the starting point") {
    CounterRng rng(27);
    const std::size_t n = 500, d = 3;
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        double c = rng.uniform() < 0.5 ? -2.0 : 2.0;
        x(i, 0) = c + rng.normal();
        x(i, 1) = rng.normal();
        x(i, 2) = 0.5 * rng.normal();
    }
    MDHModel model = mdh_fit(x);

    EigenDecomposition eig = sym_eig(covariance(x));
    std::vector<double> v0(d);
    for (std::size_t i = 0; i < d; ++i) v0[i] = eig.vectors(i, 0);
    ProjectedData p0 = project_data(x, v0);
    ProjectedData pv = project_data(x, model.v);

    // reconstruct the automatic penalty constant used by the fit
    PolyExpKernel kn = model.kernel.normalized();
    std::vector<double> grid(200);
    for (int t = 0; t < 200; ++t)
        grid[static_cast<std::size_t>(t)] =
            p0.mean - 2.0 * p0.sd + 4.0 * p0.sd * t / 199.0;
    DensityEstimate dens0 = kde(p0.points, model.h, model.kernel, grid);
    double c_auto = 10.0 *
                    *std::max_element(dens0.density.begin(), dens0.density.end()) /
                    (p0.sd * p0.sd);

    double at_solution = mdh_penalized_density(pv, model.b, model.h, model.kernel,
                                               c_auto, model.alpha_final);
    double at_start = mdh_penalized_density(p0, p0.mean, model.h, model.kernel,
                                            c_auto, model.alpha_final);
    CHECK(at_solution <= at_start + 1e-12);
}
