#include "foodprov/rng.hpp"

#include <numeric>

#include "foodprov/canonical.hpp"

namespace foodprov {

namespace {

void append_u64_be(std::string& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

}  // namespace

Digest32 keyed_digest(std::string_view context, std::uint64_t seed, std::string_view id) {
    std::string input;
    input.reserve(context.size() + id.size() + 10);
    input += context;
    input.push_back(kFieldSep);
    append_u64_be(input, seed);
    input.push_back(kFieldSep);
    input += id;
    return sha256(input);
}

std::uint64_t keyed_u64(std::string_view context, std::uint64_t seed, std::string_view id) {
    return digest_prefix_u64(keyed_digest(context, seed, id));
}

bool keyed_pass(std::string_view context, std::uint64_t seed, std::string_view id,
                std::uint32_t rate_bp) {
    return keyed_u64(context, seed, id) % 10000 < rate_bp;
}

DetRng::DetRng(std::string_view label, std::uint64_t seed) {
    std::string input;
    input.reserve(label.size() + 9);
    input += label;
    input.push_back(kFieldSep);
    append_u64_be(input, seed);
    key_ = sha256(input);
}

void DetRng::refill() {
    std::string input{reinterpret_cast<const char*>(key_.data()), key_.size()};
    append_u64_be(input, counter_++);
    const Digest32 block = sha256(input);
    for (int i = 0; i < 4; ++i) {
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) {
            v = (v << 8) | block[static_cast<std::size_t>(8 * i + b)];
        }
        block_[i] = v;
    }
    used_ = 0;
}

std::uint64_t DetRng::next_u64() {
    if (used_ == 4) {
        refill();
    }
    return block_[used_++];
}

std::uint64_t DetRng::below(std::uint64_t n) {
    if (n == 0) {
        return 0;
    }
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    while (true) {
        const std::uint64_t draw = next_u64();
        if (draw <= limit) {
            return draw % n;
        }
    }
}

std::int64_t DetRng::range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
}

std::size_t DetRng::weighted(const std::uint64_t* weights, std::size_t n) {
    const std::uint64_t total = std::accumulate(weights, weights + n, std::uint64_t{0});
    std::uint64_t draw = below(total);
    for (std::size_t i = 0; i < n; ++i) {
        if (draw < weights[i]) {
            return i;
        }
        draw -= weights[i];
    }
    return n - 1;
}

}  // namespace foodprov
