#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace rjmix {

// xoshiro256++ with splitmix64 seeding. Every stochastic routine in the
// library takes one of these by reference, so a run is reproducible from
// its seed and concurrent chains just use separate generators.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1); never returns an endpoint.
    double uniform();

    double normal();  // standard normal via inverse CDF
    double normal(double mean, double var);

    // Shape-rate parameterization (mean = shape/rate).
    double gamma(double shape, double rate);

    double beta(double a, double b);

    std::vector<double> dirichlet(const std::vector<double>& concentrations);

    // Child generator with a decorrelated seed; advances this generator.
    Rng split();

private:
    std::array<std::uint64_t, 4> state_;
};

// Deterministic per-stream seed derivation (e.g. one seed per chain).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream);

}  // namespace rjmix
