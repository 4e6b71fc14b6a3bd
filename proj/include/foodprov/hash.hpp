#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace foodprov {

// 32-byte SHA-256 digest. All content fingerprints in the system are this type.
using Digest32 = std::array<std::uint8_t, 32>;

Digest32 sha256(std::string_view bytes);

// Streaming variant for multi-part inputs (domain prefixes, keyed digests).
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(std::string_view bytes);
    Sha256& update_byte(std::uint8_t b);
    Digest32 finish();

private:
    void* ctx_;
};

std::string to_hex(const Digest32& digest);
std::string to_hex(std::string_view bytes);
std::optional<Digest32> digest_from_hex(std::string_view hex);
std::optional<std::string> bytes_from_hex(std::string_view hex);

// First 8 digest bytes as a big-endian 64-bit value. Used to derive
// deterministic uniform draws and synthetic identifiers.
std::uint64_t digest_prefix_u64(const Digest32& digest);

}  // namespace foodprov
