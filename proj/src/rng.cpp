#include "rjmix/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "rjmix/special.hpp"

namespace rjmix {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return norm_quantile(uniform()); }

double Rng::normal(double mean, double var) {
    if (!(var > 0.0)) throw std::invalid_argument("Rng::normal: variance must be positive");
    return mean + std::sqrt(var) * normal();
}

double Rng::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("Rng::gamma: shape and rate must be positive");
    // Marsaglia-Tsang squeeze; shape < 1 boosted through G(shape+1).
    double boost = 1.0;
    double a = shape;
    if (a < 1.0) {
        boost = std::pow(uniform(), 1.0 / a);
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
    }
}

double Rng::beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
}

std::vector<double> Rng::dirichlet(const std::vector<double>& concentrations) {
    if (concentrations.empty())
        throw std::invalid_argument("Rng::dirichlet: empty concentration vector");
    std::vector<double> out(concentrations.size());
    double total = 0.0;
    for (std::size_t i = 0; i < concentrations.size(); ++i) {
        out[i] = gamma(concentrations[i], 1.0);
        total += out[i];
    }
    for (auto& v : out) v /= total;
    return out;
}

Rng Rng::split() { return Rng(next_u64() ^ 0xd1b54a32d192ed03ULL); }

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream) {
    std::uint64_t s = base_seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return splitmix64(s);
}

}  // namespace rjmix
