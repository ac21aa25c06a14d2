#include "ksum/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "ksum/error.hpp"

namespace ksum {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

} // namespace

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return mix64(seed_ + counter_ * 0x9e3779b97f4a7c15ULL);
}

double CounterRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    have_spare_ = true;
    spare_ = r * std::sin(kTwoPi * u2);
    return r * std::cos(kTwoPi * u2);
}

double CounterRng::exponential() {
    double u;
    do {
        u = uniform();
    } while (u >= 1.0);
    return -std::log1p(-u);
}

std::vector<double> sim_bimodal(std::size_t n, CounterRng& rng) {
    std::vector<double> x(n);
    for (auto& v : x)
        v = rng.uniform() < 2.0 / 3.0 ? rng.normal() : 1.0 + rng.exponential();
    return x;
}

SineKink sim_sine_kink(std::size_t n, CounterRng& rng) {
    SineKink out;
    out.x.resize(n);
    out.y.resize(n);
    out.fx.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Beta(2,2) is the median of three uniforms
        double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
        double x = 10.0 * std::max(std::min(u1, u2), std::min(std::max(u1, u2), u3));
        double fx = 3.0 * std::sin(2.0 * x) + (x > 5.0 ? 10.0 * (x - 5.0) : 0.0);

        double z = rng.normal();
        double chi3 = 0.0;
        for (int k = 0; k < 3; ++k) {
            double t = rng.normal();
            chi3 += t * t;
        }
        double t3 = z / std::sqrt(chi3 / 3.0);
        double gamma22 = (rng.exponential() + rng.exponential()) / 2.0;
        double resid = t3 + (gamma22 - 1.0) * ((x - 5.0) * (x - 5.0) + 3.0);

        out.x[i] = x;
        out.fx[i] = fx;
        out.y[i] = fx + resid;
    }
    return out;
}

GaussMixture sim_gauss_mixture(std::size_t n, std::size_t d, std::size_t ncomp,
                               CounterRng& rng) {
    if (ncomp < 1) throw invalid_input("sim_gauss_mixture: ncomp must be >= 1");
    Matrix mu(ncomp, d), sd(ncomp, d);
    for (std::size_t c = 0; c < ncomp; ++c)
        for (std::size_t j = 0; j < d; ++j) mu(c, j) = rng.uniform();
    for (std::size_t c = 0; c < ncomp; ++c)
        for (std::size_t j = 0; j < d; ++j) sd(c, j) = rng.exponential() / 7.0;

    std::vector<double> ps(ncomp);
    double total = 0.0;
    for (auto& p : ps) {
        p = rng.uniform() + 0.1;
        total += p;
    }
    for (auto& p : ps) p /= total;

    GaussMixture out;
    out.x = Matrix(n, d);
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform(), acc = 0.0;
        std::size_t c = ncomp - 1;
        for (std::size_t k = 0; k < ncomp; ++k) {
            acc += ps[k];
            if (u < acc) {
                c = k;
                break;
            }
        }
        out.labels[i] = static_cast<int>(c);
        for (std::size_t j = 0; j < d; ++j)
            out.x(i, j) = mu(c, j) + rng.normal() * sd(c, j);
    }
    return out;
}

namespace {

// Zero-mean, unit-variance source laws.
double ica_source(int law, CounterRng& rng) {
    switch (law % 4) {
        case 0: // uniform on [-sqrt(3), sqrt(3)]
            return (2.0 * rng.uniform() - 1.0) * std::sqrt(3.0);
        case 1: { // Laplace, scale 1/sqrt(2)
            double e = rng.exponential() / std::sqrt(2.0);
            return rng.uniform() < 0.5 ? -e : e;
        }
        case 2: { // balanced Gaussian mixture at +-0.8, sd 0.6
            double m = rng.uniform() < 0.5 ? -0.8 : 0.8;
            return m + 0.6 * rng.normal();
        }
        default: // centered exponential
            return rng.exponential() - 1.0;
    }
}

} // namespace

ICAMixture sim_ica_mixture(std::size_t n, std::size_t d, CounterRng& rng) {
    ICAMixture out;
    out.sources = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            out.sources(i, j) = ica_source(static_cast<int>(j), rng);

    // Mixing with controlled conditioning: Q1 diag(s) Q2^T with random
    // orthogonal factors and singular values in [1, 2].
    auto random_orthogonal = [&](std::size_t dim) {
        Matrix sym(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i; j < dim; ++j) {
                double v = rng.normal();
                sym(i, j) = v;
                sym(j, i) = v;
            }
        return sym_eig(sym).vectors;
    };
    Matrix q1 = random_orthogonal(d);
    Matrix q2 = random_orthogonal(d);
    std::vector<double> s(d);
    for (auto& v : s) v = 1.0 + rng.uniform();

    out.mixing = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += q1(i, k) * s[k] * q2(j, k);
            out.mixing(i, j) = acc;
        }
    out.mixed = out.sources * out.mixing;
    return out;
}

PPRData sim_ppr_data(std::size_t n, std::size_t d, CounterRng& rng) {
    Matrix z(n, d), a(d, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) z(i, j) = rng.normal();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a(i, j) = 2.0 * rng.uniform() - 1.0;

    std::vector<double> w1(d), w2(d);
    double n1 = 0.0, n2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        w1[j] = rng.normal();
        w2[j] = rng.normal();
        n1 += w1[j] * w1[j];
        n2 += w2[j] * w2[j];
    }
    for (std::size_t j = 0; j < d; ++j) {
        w1[j] /= std::sqrt(n1);
        w2[j] /= std::sqrt(n2);
    }

    PPRData out;
    out.x = z * a;
    out.y.resize(n);
    out.signal.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            s1 += out.x(i, j) * w1[j];
            s2 += out.x(i, j) * w2[j];
        }
        out.signal[i] = s1 + 0.5 * s1 * s1 + 2.0 * std::sin(s2);
        out.y[i] = out.signal[i] + rng.normal();
    }
    return out;
}

Dataset simulate_dataset(const std::string& kind, std::size_t n, std::size_t d,
                         std::uint64_t seed) {
    if (n < 1) throw invalid_input("simulate: n must be >= 1");
    CounterRng rng(seed);
    if (kind == "bimodal") {
        Dataset out;
        out.names = {"x"};
        out.columns = {sim_bimodal(n, rng)};
        return out;
    }
    if (kind == "sinekink") {
        SineKink s = sim_sine_kink(n, rng);
        Dataset out;
        out.names = {"x", "y", "fx"};
        out.columns = {std::move(s.x), std::move(s.y), std::move(s.fx)};
        return out;
    }
    if (kind == "gaussmix") {
        GaussMixture g = sim_gauss_mixture(n, d == 0 ? 10 : d, 10, rng);
        Dataset out = from_matrix(g.x);
        out.names.push_back("label");
        out.columns.emplace_back(g.labels.begin(), g.labels.end());
        return out;
    }
    if (kind == "icamix") {
        ICAMixture m = sim_ica_mixture(n, d == 0 ? 4 : d, rng);
        Dataset out = from_matrix(m.mixed);
        Dataset src = from_matrix(m.sources, "s");
        for (std::size_t j = 0; j < src.ncol(); ++j) {
            out.names.push_back(src.names[j]);
            out.columns.push_back(std::move(src.columns[j]));
        }
        return out;
    }
    if (kind == "ppr") {
        PPRData p = sim_ppr_data(n, d == 0 ? 10 : d, rng);
        Dataset out = from_matrix(p.x);
        out.names.push_back("y");
        out.columns.push_back(std::move(p.y));
        out.names.push_back("signal");
        out.columns.push_back(std::move(p.signal));
        return out;
    }
    throw invalid_input("simulate: unknown kind '" + kind + "'");
}

} // namespace ksum
