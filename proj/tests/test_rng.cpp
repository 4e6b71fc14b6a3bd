#include <doctest.h>

#include <cstdint>
#include <map>
#include <vector>

#include "foodprov/hash.hpp"
#include "foodprov/rng.hpp"

using namespace foodprov;

// Frozen values computed with an independent Python hashlib implementation
// of the same byte layouts (context 0x1F seed-BE8 0x1F id; counter blocks
// sha256(key || counter-BE8)).

TEST_CASE("keyed_digest matches the frozen cross-implementation value") {
    const Digest32 d = keyed_digest("split", 7, "r-000001");
    CHECK(to_hex(d) == "29fb9b81ec786af4d1d0dbaec0bd7d522f7a322dba5d37d8fd6dff6d0e14052d");
    CHECK(keyed_u64("split", 7, "r-000001") == 3025182557029821172ULL);
}

TEST_CASE("keyed_pass thresholds the frozen draw at basis points") {
    // draw % 10000 == 9393 for this key
    const char* id = "sub-1\x1f" "1\x1f" "stochastic:0.7000";
    CHECK(keyed_u64("review:pass", 42, id) % 10000 == 9393);
    CHECK_FALSE(keyed_pass("review:pass", 42, id, 7000));
    CHECK_FALSE(keyed_pass("review:pass", 42, id, 9393));
    CHECK(keyed_pass("review:pass", 42, id, 9394));
    CHECK(keyed_pass("review:pass", 42, id, 10000));
    CHECK_FALSE(keyed_pass("review:pass", 42, id, 0));
}

TEST_CASE("keyed draws differ across context, seed and id") {
    CHECK(keyed_u64("a", 1, "x") != keyed_u64("b", 1, "x"));
    CHECK(keyed_u64("a", 1, "x") != keyed_u64("a", 2, "x"));
    CHECK(keyed_u64("a", 1, "x") != keyed_u64("a", 1, "y"));
    // the separator prevents (context, id) gluing ambiguity
    CHECK(keyed_u64("ab", 1, "c") != keyed_u64("a", 1, "bc"));
}

TEST_CASE("DetRng replays the frozen stream") {
    DetRng rng("simulate", 7);
    const std::uint64_t expected[5] = {9528127034563471034ULL, 17569128344203602793ULL,
                                       7207026862919983776ULL, 8951593684717409966ULL,
                                       16369770809205621786ULL};
    for (std::uint64_t want : expected) {
        CHECK(rng.next_u64() == want);
    }
}

TEST_CASE("identical DetRng constructions are identical streams") {
    DetRng a("label", 99);
    DetRng b("label", 99);
    DetRng c("label", 100);
    bool any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        any_diff = any_diff || va != c.next_u64();
    }
    CHECK(any_diff);
}

TEST_CASE("below stays in range and hits every residue") {
    DetRng rng("below", 3);
    CHECK(rng.below(0) == 0);
    CHECK(rng.below(1) == 0);
    std::map<std::uint64_t, int> counts;
    for (int i = 0; i < 3000; ++i) {
        const std::uint64_t v = rng.below(7);
        CHECK(v < 7);
        ++counts[v];
    }
    REQUIRE(counts.size() == 7);
    for (const auto& [value, count] : counts) {
        // loose uniformity: expected ~429 each
        CHECK(count > 250);
        CHECK(count < 650);
    }
}

TEST_CASE("range is inclusive on both ends") {
    DetRng rng("range", 5);
    bool saw_lo = false;
    bool saw_hi = false;
    for (int i = 0; i < 500; ++i) {
        const std::int64_t v = rng.range(-2, 2);
        CHECK(v >= -2);
        CHECK(v <= 2);
        saw_lo = saw_lo || v == -2;
        saw_hi = saw_hi || v == 2;
    }
    CHECK(saw_lo);
    CHECK(saw_hi);
}

TEST_CASE("weighted draws respect zero weights and rough proportions") {
    DetRng rng("weighted", 13);
    const std::uint64_t weights[4] = {6, 0, 3, 1};
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 5000; ++i) {
        const std::size_t k = rng.weighted(weights, 4);
        REQUIRE(k < 4);
        ++counts[k];
    }
    CHECK(counts[1] == 0);
    CHECK(counts[0] > counts[2]);
    CHECK(counts[2] > counts[3]);
    CHECK(counts[3] > 300);  // ~10% of 5000
}

TEST_CASE("digest_prefix_u64 is the big-endian first eight bytes") {
    Digest32 d{};
    d[0] = 0x01;
    d[7] = 0xff;
    d[8] = 0xaa;  // beyond the prefix, ignored
    CHECK(digest_prefix_u64(d) == 0x01000000000000ffULL);
}
