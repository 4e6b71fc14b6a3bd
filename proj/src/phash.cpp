#include "foodprov/phash.hpp"

#include <algorithm>
#include <bit>

namespace foodprov {

std::string phash_to_hex(PHash64 h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) {
        out[static_cast<std::size_t>(i)] =
            digits[(h.bits >> (60 - 4 * i)) & 0xF];
    }
    return out;
}

Outcome<PHash64> phash_from_hex(std::string_view text) {
    if (text.size() != 16) {
        return make_error(ErrorCode::ParseError, "hash must be 16 hex digits");
    }
    std::uint64_t bits = 0;
    for (char c : text) {
        int nibble;
        if (c >= '0' && c <= '9') {
            nibble = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            nibble = c - 'a' + 10;
        } else {
            return make_error(ErrorCode::ParseError, "hash must be lowercase hex");
        }
        bits = (bits << 4) | static_cast<std::uint64_t>(nibble);
    }
    return PHash64{bits};
}

Outcome<LuminanceGrid> downsample(const LuminanceGrid& grid,
                                  std::size_t target_w, std::size_t target_h) {
    if (!grid.well_formed()) {
        return make_error(ErrorCode::WrongShape,
                          "pixel buffer does not match " + std::to_string(grid.width) +
                              "x" + std::to_string(grid.height));
    }
    if (grid.width < target_w || grid.height < target_h) {
        return make_error(ErrorCode::GridTooSmall,
                          "grid " + std::to_string(grid.width) + "x" +
                              std::to_string(grid.height) + " below " +
                              std::to_string(target_w) + "x" + std::to_string(target_h));
    }
    LuminanceGrid out;
    out.width = target_w;
    out.height = target_h;
    out.pixels.resize(target_w * target_h);
    for (std::size_t i = 0; i < target_h; ++i) {
        const std::size_t row_begin = i * grid.height / target_h;
        const std::size_t row_end = (i + 1) * grid.height / target_h;
        for (std::size_t j = 0; j < target_w; ++j) {
            const std::size_t col_begin = j * grid.width / target_w;
            const std::size_t col_end = (j + 1) * grid.width / target_w;
            std::uint64_t sum = 0;
            for (std::size_t r = row_begin; r < row_end; ++r) {
                for (std::size_t c = col_begin; c < col_end; ++c) {
                    sum += grid.at(r, c);
                }
            }
            const std::uint64_t count =
                static_cast<std::uint64_t>(row_end - row_begin) * (col_end - col_begin);
            out.pixels[i * target_w + j] = static_cast<std::uint8_t>(sum / count);
        }
    }
    return out;
}

Outcome<PHash64> dhash64(const LuminanceGrid& grid9x8) {
    if (grid9x8.width != 9 || grid9x8.height != 8 || !grid9x8.well_formed()) {
        return make_error(ErrorCode::WrongShape,
                          "dhash64 needs a 9x8 grid, got " +
                              std::to_string(grid9x8.width) + "x" +
                              std::to_string(grid9x8.height));
    }
    std::uint64_t bits = 0;
    for (std::size_t row = 0; row < 8; ++row) {
        for (std::size_t col = 0; col < 8; ++col) {
            if (grid9x8.at(row, col) > grid9x8.at(row, col + 1)) {
                bits |= std::uint64_t{1} << (63 - (8 * row + col));
            }
        }
    }
    return PHash64{bits};
}

int hamming(PHash64 a, PHash64 b) {
    return std::popcount(a.bits ^ b.bits);
}

std::vector<DuplicateCluster> cluster_near_duplicates(
    const std::vector<HashedRecord>& hashes, int threshold) {
    const std::size_t n = hashes.size();
    std::vector<std::size_t> component(n, n);
    std::vector<std::size_t> stack;
    std::size_t next_component = 0;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (component[seed] != n) {
            continue;
        }
        const std::size_t id = next_component++;
        component[seed] = id;
        stack.assign(1, seed);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            for (std::size_t other = 0; other < n; ++other) {
                if (component[other] == n &&
                    hamming(hashes[cur].hash, hashes[other].hash) <= threshold) {
                    component[other] = id;
                    stack.push_back(other);
                }
            }
        }
    }

    std::vector<DuplicateCluster> clusters(next_component);
    for (std::size_t i = 0; i < n; ++i) {
        clusters[component[i]].members.push_back(hashes[i].record_id);
    }
    for (DuplicateCluster& cluster : clusters) {
        std::sort(cluster.members.begin(), cluster.members.end());
        cluster.survivor = cluster.members.front();
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const DuplicateCluster& a, const DuplicateCluster& b) {
                  return a.survivor < b.survivor;
              });
    return clusters;
}

}  // namespace foodprov
