#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "foodprov/errors.hpp"

namespace foodprov {

// Ordered list of (name, value) pairs. Values are canonical text: integers
// base-10 without leading zeros, probabilities fixed two-decimal, text UTF-8.
using FieldMap = std::vector<std::pair<std::string, std::string>>;

constexpr char kFieldSep = '\x1f';   // between name and value
constexpr char kRecordSep = '\x1e';  // after each pair

// Serialize a field map to its canonical byte form: pairs sorted by name
// under byte-wise order, each as name 0x1F value 0x1E. Injective for
// distinct maps because 0x00-0x1F bytes are rejected in names and values.
// Duplicate names are NON_CANONICAL_VALUE.
Outcome<std::string> canonicalize(const FieldMap& fields);

// Inverse of canonicalize. Rejects malformed framing and unsorted or
// duplicate names, so parse(canonicalize(m)) == sorted(m) exactly.
Outcome<FieldMap> parse_canonical(std::string_view bytes);

// Lookup in a sorted-or-not field map; nullptr when absent.
const std::string* find_field(const FieldMap& fields, std::string_view name);

}  // namespace foodprov
