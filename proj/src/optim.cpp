#include "ksum/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "ksum/error.hpp"

namespace ksum {

namespace {

constexpr int kMemory = 10;
constexpr double kArmijo = 1e-4;

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double t : v) m = std::max(m, std::abs(t));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double t) { return std::isfinite(t); });
}

} // namespace

QnResult qn_minimize(const ObjectiveFn& f, std::span<const double> x0, int max_iter,
                     double grad_tol) {
    const std::size_t d = x0.size();
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> g(d), x_new(d), g_new(d), dir(d);

    double fx = f(x, g);
    if (!std::isfinite(fx)) throw invalid_input("qn_minimize: f(x0) not finite");
    QnResult best{x, fx, 0, false};
    if (!finite(g)) {
        best.degraded = true;
        return best;
    }

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> mem;

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        if (inf_norm(g) < grad_tol * (1.0 + std::abs(fx))) break;

        // Two-loop recursion for the search direction.
        dir.assign(g.begin(), g.end());
        std::vector<double> alpha(mem.size());
        for (std::size_t i = mem.size(); i-- > 0;) {
            alpha[i] = mem[i].rho * dot(mem[i].s, dir);
            for (std::size_t k = 0; k < d; ++k) dir[k] -= alpha[i] * mem[i].y[k];
        }
        if (!mem.empty()) {
            const Pair& last = mem.back();
            double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            for (auto& t : dir) t *= gamma;
        }
        for (std::size_t i = 0; i < mem.size(); ++i) {
            double beta = mem[i].rho * dot(mem[i].y, dir);
            for (std::size_t k = 0; k < d; ++k) dir[k] += (alpha[i] - beta) * mem[i].s[k];
        }
        for (auto& t : dir) t = -t;

        double slope = dot(g, dir);
        if (!(slope < 0.0)) { // fall back to steepest descent
            for (std::size_t k = 0; k < d; ++k) dir[k] = -g[k];
            slope = -dot(g, g);
            if (slope == 0.0) break;
        }

        double step = mem.empty() ? 1.0 / std::max(1.0, inf_norm(g)) : 1.0;
        bool accepted = false;
        double f_new = fx;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t k = 0; k < d; ++k) x_new[k] = x[k] + step * dir[k];
            f_new = f(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= fx + kArmijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        if (!finite(g_new)) {
            if (f_new < best.value) best = {x_new, f_new, iter + 1, true};
            best.degraded = true;
            return best;
        }

        Pair p;
        p.s.resize(d);
        p.y.resize(d);
        for (std::size_t k = 0; k < d; ++k) {
            p.s[k] = x_new[k] - x[k];
            p.y[k] = g_new[k] - g[k];
        }
        double sy = dot(p.s, p.y);
        if (sy > 1e-12 * std::sqrt(dot(p.s, p.s)) * std::sqrt(dot(p.y, p.y))) {
            p.rho = 1.0 / sy;
            mem.push_back(std::move(p));
            if (mem.size() > kMemory) mem.pop_front();
        }

        x.swap(x_new);
        g.swap(g_new);
        fx = f_new;
        if (fx < best.value) best = {x, fx, iter + 1, false};
    }

    if (fx <= best.value) best = {x, fx, iter, false};
    return best;
}

} // namespace ksum
