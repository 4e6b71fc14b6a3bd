#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "foodprov/errors.hpp"

namespace foodprov {

// Fixed-point decimals stored as scaled integers. Authenticity probabilities
// use scale 100 and always render with two fractional digits ("0.80");
// quantities (grams, ml, box coordinates) render minimally ("150", "12.5").
// Quality scores and rate configs use scale 10000.

// Parse a decimal literal with at most max_frac fractional digits into
// value * 10^max_frac. Rejects signs other than a leading '-', exponents,
// and excess precision.
Outcome<std::int64_t> parse_scaled(std::string_view text, int max_frac);

// Convert a double (e.g. a parsed JSON number) to value * 10^max_frac,
// rejecting inputs that carry more precision than the scale can hold.
Outcome<std::int64_t> scaled_from_double(double value, int max_frac);

// Render with exactly `frac` fractional digits: format_fixed(80, 2) == "0.80".
std::string format_fixed(std::int64_t scaled, int frac);

// Render with trailing zeros stripped: format_minimal(15000, 2) == "150",
// format_minimal(1250, 2) == "12.5".
std::string format_minimal(std::int64_t scaled, int frac);

// Exact rational rendered with `frac` digits, rounding half away from zero.
std::string format_ratio(std::int64_t num, std::int64_t den, int frac);

}  // namespace foodprov
