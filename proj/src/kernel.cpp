#include "ksum/kernel.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "ksum/error.hpp"

namespace ksum {

namespace {

constexpr std::size_t kMaxOrder = 20;

// k! for k up to 42 ((j+k)! with j,k <= 20, and (k+2)! with k <= 20).
double factorial(int k) {
    static const auto table = [] {
        std::array<double, 43> t{};
        t[0] = 1.0;
        for (int i = 1; i < 43; ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    return table[static_cast<std::size_t>(k)];
}

} // namespace

PolyExpKernel::PolyExpKernel(std::vector<double> beta) : beta_(std::move(beta)) {
    if (beta_.empty()) throw invalid_input("kernel: empty coefficient vector");
    if (beta_.size() - 1 > kMaxOrder)
        throw invalid_input("kernel: order exceeds 20 (factorial terms overflow)");
    for (double b : beta_) {
        if (!std::isfinite(b)) throw invalid_input("kernel: non-finite coefficient");
        if (b < 0.0) throw invalid_input("kernel: negative coefficient");
    }
    if (beta_[0] <= 0.0) throw invalid_input("kernel: beta[0] must be positive");

    // gamma[k] = (k+1) beta[k+1] - beta[k], taking beta[order+1] = 0
    gamma_.resize(beta_.size());
    for (std::size_t k = 0; k < beta_.size(); ++k) {
        double next = (k + 1 < beta_.size()) ? beta_[k + 1] : 0.0;
        gamma_[k] = static_cast<double>(k + 1) * next - beta_[k];
    }
}

double PolyExpKernel::eval(double u) const {
    double a = std::abs(u);
    double poly = 0.0;
    for (std::size_t k = beta_.size(); k-- > 0;) poly = poly * a + beta_[k];
    return poly * std::exp(-a);
}

double PolyExpKernel::deriv(double u) const {
    if (u == 0.0) return 0.0; // odd function; one-sided slopes cancel
    double a = std::abs(u);
    double poly = 0.0;
    for (std::size_t k = gamma_.size(); k-- > 0;) poly = poly * a + gamma_[k];
    double d = poly * std::exp(-a);
    return u > 0.0 ? d : -d;
}

KernelConstants PolyExpKernel::constants() const {
    // int |x|^k exp(-c|x|) dx = 2 k! / c^(k+1); with c = 1 (integral) and the
    // squared kernel giving c = 2 (roughness).
    const std::size_t p = beta_.size();
    double normalizer = 0.0;
    for (std::size_t k = 0; k < p; ++k)
        normalizer += 2.0 * beta_[k] * factorial(static_cast<int>(k));

    std::vector<double> bn(p);
    for (std::size_t k = 0; k < p; ++k) bn[k] = beta_[k] / normalizer;

    double variance = 0.0;
    for (std::size_t k = 0; k < p; ++k)
        variance += 2.0 * bn[k] * factorial(static_cast<int>(k) + 2);

    double roughness = 0.0;
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k)
            roughness += bn[j] * bn[k] * factorial(static_cast<int>(j + k)) /
                         std::pow(2.0, static_cast<double>(j + k));

    return {normalizer, variance, roughness};
}

PolyExpKernel PolyExpKernel::normalized() const {
    double c = constants().normalizer;
    std::vector<double> b(beta_);
    for (double& v : b) v /= c;
    return PolyExpKernel(std::move(b));
}

PolyExpKernel PolyExpKernel::smooth(int order) {
    if (order < 0 || order > 8)
        throw invalid_input("smooth kernel: order must lie in [0, 8]");
    std::vector<double> b(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) b[static_cast<std::size_t>(k)] = 1.0 / factorial(k);
    return PolyExpKernel(std::move(b));
}

PolyExpKernel PolyExpKernel::default_kernel() {
    return PolyExpKernel({0.25, 0.25});
}

std::vector<std::pair<double, double>> kernel_curve(const PolyExpKernel& kernel,
                                                    int grid_size) {
    if (grid_size < 2) throw invalid_input("kernel_curve: grid size must be >= 2");
    const KernelConstants c = kernel.constants();
    const double sigma = std::sqrt(c.variance);
    const PolyExpKernel kn = kernel.normalized();

    // Unit-variance density: K_std(u) = sigma * K_norm(sigma u).
    std::vector<std::pair<double, double>> curve;
    curve.reserve(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) {
        double u = -5.0 + 10.0 * static_cast<double>(i) / (grid_size - 1);
        curve.emplace_back(u, sigma * kn.eval(sigma * u));
    }
    return curve;
}

} // namespace ksum
