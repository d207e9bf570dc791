#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace dlm {

/// Deterministic random stream with platform-stable integer output.
///
/// The engine is std::mt19937_64, whose integer sequence is fully specified
/// by the standard, and all floating-point transforms (uniform, normal,
/// gamma) are implemented here rather than via std::*_distribution, whose
/// algorithms are implementation-defined.  Identical seeds therefore give
/// identical draw sequences across runs.  A stream is single-owner: parallel
/// work derives an independent child seed per task via derive_seed().
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller (pair cached).
    double normal();

    /// Gamma(shape, rate) via Marsaglia-Tsang; shape > 0, rate > 0.
    double gamma(double shape, double rate);

    /// Inverse-Gamma(shape, scale): density ~ x^{-shape-1} exp(-scale/x).
    double inv_gamma(double shape, double scale) { return 1.0 / gamma(shape, scale); }

private:
    std::mt19937_64 gen_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// Hash-combines a master seed with a path of integers (scenario, model,
/// replicate, ...) into an independent child seed.  Stable across platforms
/// and scheduling, so parallel replications are reproducible.
std::uint64_t derive_seed(std::uint64_t master, std::span<const std::uint64_t> path);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

} // namespace dlm
