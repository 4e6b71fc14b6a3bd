#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "foodprov/hash.hpp"

namespace foodprov {

// Digest-derived draws. The standard <random> distributions are
// implementation-defined, so every sampled value in the system comes from
// SHA-256 instead: identical seeds give identical bytes on any platform.

// Full digest keyed by (context, seed, id); used wherever a total order
// over ids is needed (partitioning, stratified splits).
Digest32 keyed_digest(std::string_view context, std::uint64_t seed, std::string_view id);

// One-shot draw keyed by (context, seed, id).
std::uint64_t keyed_u64(std::string_view context, std::uint64_t seed, std::string_view id);

// Bernoulli at basis-point resolution: pass iff draw mod 10000 < rate_bp.
bool keyed_pass(std::string_view context, std::uint64_t seed, std::string_view id,
                std::uint32_t rate_bp);

// Counter-mode stream over sha256(key || counter), 4 draws per block.
class DetRng {
public:
    DetRng(std::string_view label, std::uint64_t seed);

    std::uint64_t next_u64();

    // Unbiased draw in [0, n) via rejection sampling. n must be > 0.
    std::uint64_t below(std::uint64_t n);

    // Inclusive range.
    std::int64_t range(std::int64_t lo, std::int64_t hi);

    // Pick one of n weighted buckets; weights need not normalize.
    std::size_t weighted(const std::uint64_t* weights, std::size_t n);

private:
    void refill();

    Digest32 key_{};
    std::uint64_t counter_ = 0;
    std::uint64_t block_[4] = {0, 0, 0, 0};
    int used_ = 4;
};

}  // namespace foodprov
