#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "foodprov/phash.hpp"
#include "foodprov/rng.hpp"

using namespace foodprov;

namespace {

LuminanceGrid random_grid(DetRng& rng, std::size_t w, std::size_t h) {
    LuminanceGrid g;
    g.width = w;
    g.height = h;
    g.pixels.resize(w * h);
    for (auto& p : g.pixels) p = static_cast<std::uint8_t>(rng.below(256));
    return g;
}

// Per-bit oracle: recompute each comparison directly from the grid.
std::uint64_t oracle_dhash(const LuminanceGrid& g) {
    std::uint64_t bits = 0;
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
            if (g.at(r, c) > g.at(r, c + 1)) {
                bits |= std::uint64_t{1} << (63 - (8 * r + c));
            }
        }
    }
    return bits;
}

// Bit-loop oracle for hamming distance.
int oracle_hamming(std::uint64_t a, std::uint64_t b) {
    int d = 0;
    for (int i = 0; i < 64; ++i) {
        d += static_cast<int>(((a >> i) ^ (b >> i)) & 1ULL);
    }
    return d;
}

// Quadratic union-find oracle for clustering.
struct OracleUf {
    std::vector<std::size_t> parent;
    explicit OracleUf(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Exact floor-mean over the tile rectangle, written with plain double loops.
std::uint8_t oracle_tile_mean(const LuminanceGrid& g, std::size_t tw, std::size_t th,
                              std::size_t i, std::size_t j) {
    const std::size_t c0 = j * g.width / tw;
    const std::size_t c1 = (j + 1) * g.width / tw;
    const std::size_t r0 = i * g.height / th;
    const std::size_t r1 = (i + 1) * g.height / th;
    std::uint64_t sum = 0;
    for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) sum += g.at(r, c);
    }
    return static_cast<std::uint8_t>(sum / ((r1 - r0) * (c1 - c0)));
}

}  // namespace

TEST_CASE("phash hex round-trips and rejects junk") {
    const PHash64 h{0x0123456789abcdefULL};
    CHECK(phash_to_hex(h) == "0123456789abcdef");
    CHECK(phash_from_hex("0123456789abcdef").value() == h);
    CHECK(phash_to_hex(PHash64{}) == "0000000000000000");
    CHECK_FALSE(phash_from_hex("0123").ok());
    CHECK_FALSE(phash_from_hex("0123456789abcdeg").ok());
    CHECK_FALSE(phash_from_hex("0123456789ABCDEF").ok());  // canonical form is lowercase
}

TEST_CASE("dhash64 needs exactly nine by eight") {
    LuminanceGrid g;
    g.width = 8;
    g.height = 8;
    g.pixels.assign(64, 0);
    CHECK(dhash64(g).error().code == ErrorCode::WrongShape);
}

TEST_CASE("constant grids hash to zero") {
    LuminanceGrid g;
    g.width = 9;
    g.height = 8;
    g.pixels.assign(72, 200);
    CHECK(dhash64(g).value() == PHash64{0});
}

TEST_CASE("known gradient grids set the expected bits") {
    LuminanceGrid g;
    g.width = 9;
    g.height = 8;
    g.pixels.resize(72);
    // strictly decreasing rows: every comparison true -> all 64 bits set
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 9; ++c) {
            g.pixels[r * 9 + c] = static_cast<std::uint8_t>(20 - c);
        }
    }
    CHECK(dhash64(g).value().bits == ~std::uint64_t{0});
    // strictly increasing -> no bit set
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 9; ++c) {
            g.pixels[r * 9 + c] = static_cast<std::uint8_t>(c);
        }
    }
    CHECK(dhash64(g).value().bits == 0);
}

TEST_CASE("dhash64 matches the per-bit oracle on random grids") {
    DetRng rng("dhash-oracle", 21);
    for (int i = 0; i < 1000; ++i) {
        const LuminanceGrid g = random_grid(rng, 9, 8);
        CHECK(dhash64(g).value().bits == oracle_dhash(g));
    }
}

TEST_CASE("hamming matches the bit-loop oracle") {
    DetRng rng("hamming-oracle", 22);
    CHECK(hamming(PHash64{0}, PHash64{0}) == 0);
    CHECK(hamming(PHash64{0}, PHash64{~std::uint64_t{0}}) == 64);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t a = rng.next_u64();
        const std::uint64_t b = rng.next_u64();
        CHECK(hamming(PHash64{a}, PHash64{b}) == oracle_hamming(a, b));
        CHECK(hamming(PHash64{a}, PHash64{b}) == hamming(PHash64{b}, PHash64{a}));
        CHECK(hamming(PHash64{a}, PHash64{a}) == 0);
    }
}

TEST_CASE("downsample matches the double-loop floor-mean oracle") {
    DetRng rng("downsample-oracle", 23);
    const std::size_t shapes[][2] = {{9, 8}, {10, 9}, {36, 32}, {640, 480}, {13, 8}};
    for (const auto& shape : shapes) {
        const LuminanceGrid g = random_grid(rng, shape[0], shape[1]);
        const LuminanceGrid small = downsample(g).value();
        REQUIRE(small.width == 9);
        REQUIRE(small.height == 8);
        for (std::size_t i = 0; i < 8; ++i) {
            for (std::size_t j = 0; j < 9; ++j) {
                CHECK(small.at(i, j) == oracle_tile_mean(g, 9, 8, i, j));
            }
        }
    }
}

TEST_CASE("downsample rejects grids smaller than the target") {
    DetRng rng("small", 1);
    const LuminanceGrid g = random_grid(rng, 8, 8);
    CHECK(downsample(g).error().code == ErrorCode::GridTooSmall);
    LuminanceGrid malformed;
    malformed.width = 9;
    malformed.height = 8;
    malformed.pixels.assign(10, 0);  // wrong size
    CHECK_FALSE(downsample(malformed).ok());
}

TEST_CASE("monotone luminance remaps keep the hash") {
    // dhash only compares neighbors, so any strictly increasing remap of
    // pixel values leaves every comparison, and hence the hash, unchanged.
    DetRng rng("monotone", 24);
    for (int i = 0; i < 50; ++i) {
        LuminanceGrid g = random_grid(rng, 9, 8);
        for (auto& p : g.pixels) p = static_cast<std::uint8_t>(p / 2);  // values < 128
        LuminanceGrid brighter = g;
        for (auto& p : brighter.pixels) {
            p = static_cast<std::uint8_t>(p + 100);  // strictly increasing shift
        }
        CHECK(dhash64(g).value() == dhash64(brighter).value());
    }
}

TEST_CASE("clustering matches the quadratic union-find oracle") {
    DetRng rng("cluster-oracle", 25);
    std::vector<HashedRecord> hashes;
    for (int i = 0; i < 200; ++i) {
        std::uint64_t bits;
        if (i > 0 && rng.below(3) == 0) {
            // perturb an earlier hash by a few bits to force clusters
            bits = hashes[rng.below(hashes.size())].hash.bits;
            const int flips = static_cast<int>(rng.below(14));
            for (int f = 0; f < flips; ++f) bits ^= std::uint64_t{1} << rng.below(64);
        } else {
            bits = rng.next_u64();
        }
        hashes.push_back({"id-" + std::to_string(1000 + i), PHash64{bits}});
    }

    const int threshold = 10;
    OracleUf uf(hashes.size());
    for (std::size_t a = 0; a < hashes.size(); ++a) {
        for (std::size_t b = a + 1; b < hashes.size(); ++b) {
            if (hamming(hashes[a].hash, hashes[b].hash) <= threshold) uf.unite(a, b);
        }
    }
    std::vector<std::vector<std::string>> expected_groups(hashes.size());
    for (std::size_t i = 0; i < hashes.size(); ++i) {
        expected_groups[uf.find(i)].push_back(hashes[i].record_id);
    }
    std::vector<std::vector<std::string>> expected;
    for (auto& group : expected_groups) {
        if (group.empty()) continue;
        std::sort(group.begin(), group.end());
        expected.push_back(std::move(group));
    }
    std::sort(expected.begin(), expected.end());

    const auto clusters = cluster_near_duplicates(hashes, threshold);
    REQUIRE(clusters.size() == expected.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        CHECK(clusters[i].members == expected[i]);
        CHECK(clusters[i].survivor == expected[i].front());
    }
}

TEST_CASE("clustering is invariant under input permutation") {
    DetRng rng("cluster-permute", 26);
    std::vector<HashedRecord> hashes;
    for (int i = 0; i < 60; ++i) {
        std::uint64_t bits = rng.next_u64();
        if (i % 3 == 1) bits = hashes.back().hash.bits ^ 0x5;  // close pair
        hashes.push_back({"p-" + std::to_string(100 + i), PHash64{bits}});
    }
    const auto baseline = cluster_near_duplicates(hashes, 10);
    // deterministic shuffle
    for (std::size_t i = hashes.size(); i > 1; --i) {
        std::swap(hashes[i - 1], hashes[rng.below(i)]);
    }
    const auto shuffled = cluster_near_duplicates(hashes, 10);
    REQUIRE(baseline.size() == shuffled.size());
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        CHECK(baseline[i].survivor == shuffled[i].survivor);
        CHECK(baseline[i].members == shuffled[i].members);
    }
}

TEST_CASE("threshold zero groups only exact equals") {
    const std::vector<HashedRecord> hashes = {
        {"a", PHash64{7}}, {"b", PHash64{7}}, {"c", PHash64{8}}};
    const auto clusters = cluster_near_duplicates(hashes, 0);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].members == std::vector<std::string>{"a", "b"});
    CHECK(clusters[1].members == std::vector<std::string>{"c"});
}
