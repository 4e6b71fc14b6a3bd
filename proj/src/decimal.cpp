#include "foodprov/decimal.hpp"

#include <cmath>
#include <cstdlib>

namespace foodprov {

namespace {

std::int64_t pow10(int n) {
    std::int64_t v = 1;
    for (int i = 0; i < n; ++i) {
        v *= 10;
    }
    return v;
}

}  // namespace

Outcome<std::int64_t> parse_scaled(std::string_view text, int max_frac) {
    if (text.empty()) {
        return make_error(ErrorCode::NonCanonicalValue, "empty decimal");
    }
    std::size_t i = 0;
    bool negative = false;
    if (text[0] == '-') {
        negative = true;
        i = 1;
    }
    std::int64_t int_part = 0;
    std::size_t int_digits = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
        int_part = int_part * 10 + (text[i] - '0');
        ++i;
        ++int_digits;
        if (int_digits > 15) {
            return make_error(ErrorCode::NonCanonicalValue, "decimal too large");
        }
    }
    if (int_digits == 0) {
        return make_error(ErrorCode::NonCanonicalValue,
                          "decimal must start with a digit: '" + std::string(text) + "'");
    }
    std::int64_t frac_part = 0;
    int frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            frac_part = frac_part * 10 + (text[i] - '0');
            ++i;
            ++frac_digits;
            if (frac_digits > max_frac) {
                return make_error(ErrorCode::NonCanonicalValue,
                                  "more than " + std::to_string(max_frac) +
                                      " fractional digits: '" + std::string(text) + "'");
            }
        }
        if (frac_digits == 0) {
            return make_error(ErrorCode::NonCanonicalValue,
                              "trailing decimal point: '" + std::string(text) + "'");
        }
    }
    if (i != text.size()) {
        return make_error(ErrorCode::NonCanonicalValue,
                          "invalid decimal: '" + std::string(text) + "'");
    }
    std::int64_t scaled = int_part * pow10(max_frac) + frac_part * pow10(max_frac - frac_digits);
    return negative ? -scaled : scaled;
}

Outcome<std::int64_t> scaled_from_double(double value, int max_frac) {
    if (!std::isfinite(value)) {
        return make_error(ErrorCode::NonCanonicalValue, "non-finite number");
    }
    const double scaled = value * static_cast<double>(pow10(max_frac));
    if (std::fabs(scaled) > 9.0e14) {
        return make_error(ErrorCode::NonCanonicalValue, "number out of range");
    }
    const double rounded = std::nearbyint(scaled);
    // Tolerance covers double round-trip error for values within range; real
    // excess precision (e.g. 0.805 at scale 100) stays far outside it.
    if (std::fabs(scaled - rounded) > 1e-6 * std::max(1.0, std::fabs(scaled))) {
        return make_error(ErrorCode::NonCanonicalValue,
                          "more than " + std::to_string(max_frac) + " fractional digits");
    }
    return static_cast<std::int64_t>(rounded);
}

std::string format_fixed(std::int64_t scaled, int frac) {
    const bool negative = scaled < 0;
    std::uint64_t mag =
        negative ? 0ULL - static_cast<std::uint64_t>(scaled) : static_cast<std::uint64_t>(scaled);
    const std::uint64_t scale = static_cast<std::uint64_t>(pow10(frac));
    std::string out;
    if (negative) {
        out.push_back('-');
    }
    out += std::to_string(mag / scale);
    if (frac > 0) {
        out.push_back('.');
        std::string digits = std::to_string(mag % scale);
        out.append(static_cast<std::size_t>(frac) - digits.size(), '0');
        out += digits;
    }
    return out;
}

std::string format_minimal(std::int64_t scaled, int frac) {
    std::string out = format_fixed(scaled, frac);
    if (frac == 0 || out.find('.') == std::string::npos) {
        return out;
    }
    while (out.back() == '0') {
        out.pop_back();
    }
    if (out.back() == '.') {
        out.pop_back();
    }
    return out;
}

std::string format_ratio(std::int64_t num, std::int64_t den, int frac) {
    const bool negative = (num < 0) != (den < 0) && num != 0;
    const std::uint64_t n = static_cast<std::uint64_t>(num < 0 ? -num : num);
    const std::uint64_t d = static_cast<std::uint64_t>(den < 0 ? -den : den);
    const std::uint64_t scale = static_cast<std::uint64_t>(pow10(frac));
    // round half away from zero on the exact rational
    const unsigned __int128 scaled_num = static_cast<unsigned __int128>(n) * scale * 2 + d;
    const std::uint64_t scaled = static_cast<std::uint64_t>(scaled_num / (2 * static_cast<unsigned __int128>(d)));
    std::string out = format_fixed(static_cast<std::int64_t>(scaled), frac);
    return negative ? "-" + out : out;
}

}  // namespace foodprov
