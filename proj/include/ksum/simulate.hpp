#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksum/dataset.hpp"
#include "ksum/linalg.hpp"

namespace ksum {

// Counter-based 64-bit generator (splitmix-style mixing of seed + counter).
// Owned by the library so that seeded runs are bit-reproducible across
// builds and platforms.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64();
    double uniform();     // [0, 1)
    double normal();      // Box-Muller
    double exponential(); // inverse CDF, rate 1

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// (2/3) N(0,1) + (1/3) (1 + Exp(1)): bimodal mixture with sd sqrt(17)/3.
std::vector<double> sim_bimodal(std::size_t n, CounterRng& rng);

// x ~ 10 Beta(2,2); f(x) = 3 sin(2x) + 10 (x-5) I(x>5); heteroscedastic
// t/Gamma residuals.
struct SineKink {
    std::vector<double> x, y, fx;
};
SineKink sim_sine_kink(std::size_t n, CounterRng& rng);

// Gaussian mixture with uniform means, Exp(1)/7 axis deviations and random
// mixing proportions.
struct GaussMixture {
    Matrix x;
    std::vector<int> labels;
};
GaussMixture sim_gauss_mixture(std::size_t n, std::size_t d, std::size_t ncomp,
                               CounterRng& rng);

// Independent sources drawn from a four-law catalog (uniform, Laplace,
// bimodal Gaussian mixture, shifted exponential; all zero mean, unit
// variance), mixed by a random matrix with singular values in [1, 2].
struct ICAMixture {
    Matrix sources; // n x d
    Matrix mixing;  // d x d
    Matrix mixed;   // sources * mixing
};
ICAMixture sim_ica_mixture(std::size_t n, std::size_t d, CounterRng& rng);

// Covariates Z A with correlated columns; response built from two nonlinear
// single-index terms, y = s1 + s1^2/2 + 2 sin(s2) + N(0,1) noise.
struct PPRData {
    Matrix x;
    std::vector<double> y;
    std::vector<double> signal; // y minus the noise term
};
PPRData sim_ppr_data(std::size_t n, std::size_t d, CounterRng& rng);

// CLI-facing wrapper; kind is one of bimodal, sinekink, gaussmix, icamix,
// ppr. Ground-truth columns (labels, signal, fx) are included where defined.
Dataset simulate_dataset(const std::string& kind, std::size_t n, std::size_t d,
                         std::uint64_t seed);

} // namespace ksum
