#include "dlm/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dlm {

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

double RngStream::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("RngStream::gamma: shape and rate must be positive");
    if (shape < 1.0) {
        // Boost the shape by one, then scale back (Marsaglia-Tsang trick).
        const double u = uniform_pos();
        return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
            return d * v / rate;
    }
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::span<const std::uint64_t> path) {
    std::uint64_t h = mix64(master + 0x9E3779B97F4A7C15ULL);
    for (std::uint64_t part : path)
        h = mix64(h ^ (part + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return derive_seed(master, std::span<const std::uint64_t>(path.begin(), path.size()));
}

} // namespace dlm
