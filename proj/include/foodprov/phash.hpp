#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "foodprov/errors.hpp"

namespace foodprov {

// Row-major luminance values in [0,255]. This is the image abstraction the
// hasher works on; decoding real image files is out of scope.
struct LuminanceGrid {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    bool well_formed() const {
        return width > 0 && height > 0 && pixels.size() == width * height;
    }
    std::uint8_t at(std::size_t row, std::size_t col) const {
        return pixels[row * width + col];
    }
};

struct PHash64 {
    std::uint64_t bits = 0;
    friend bool operator==(PHash64 a, PHash64 b) { return a.bits == b.bits; }
};

std::string phash_to_hex(PHash64 h);  // 16 lowercase hex digits
Outcome<PHash64> phash_from_hex(std::string_view text);

// Uniform tiling: output cell (i,j) covers source columns
// [floor(j*W/tw), floor((j+1)*W/tw)) and rows [floor(i*H/th), floor((i+1)*H/th));
// each cell is the floor of the mean over its rectangle.
// Requires grid.width >= target_w and grid.height >= target_h.
Outcome<LuminanceGrid> downsample(const LuminanceGrid& grid,
                                  std::size_t target_w = 9,
                                  std::size_t target_h = 8);

// Difference hash over a 9x8 grid: bit 8*row+col is 1 iff
// pixel(row,col) > pixel(row,col+1), packed most-significant-bit first.
// Constant grids hash to zero (strict inequality, ties clear the bit).
Outcome<PHash64> dhash64(const LuminanceGrid& grid9x8);

int hamming(PHash64 a, PHash64 b);

struct HashedRecord {
    std::string record_id;
    PHash64 hash;
};

// Members sorted ascending; survivor is the lexicographically smallest id,
// so it is always members.front().
struct DuplicateCluster {
    std::string survivor;
    std::vector<std::string> members;
};

// Connected components of the graph joining pairs at hamming distance
// <= threshold. Transitive closure keeps removal order-independent.
// Clusters come back sorted by survivor id.
std::vector<DuplicateCluster> cluster_near_duplicates(
    const std::vector<HashedRecord>& hashes, int threshold = 10);

}  // namespace foodprov
