#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace shapebias {

// SplitMix64 finalizer. Used only to derive independent seeds, never as a generator.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

// Derives a sub-stream seed from a master seed and a path of tags
// (e.g. {iteration, replication, block}). Same inputs, same seed, on every platform.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

// A seeded random stream. Cheap to construct, not thread-safe; give each worker its own.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(mix_seed(seed)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Samples are generated in fixed-size blocks, each block with its own derived stream,
// so output depends on (seed, sample index) only and never on the worker count.
inline constexpr std::size_t kSampleBlockSize = 1024;

}  // namespace shapebias
