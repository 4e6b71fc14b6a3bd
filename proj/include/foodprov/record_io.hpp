#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "foodprov/canonical.hpp"
#include "foodprov/errors.hpp"
#include "foodprov/hash.hpp"
#include "foodprov/schema.hpp"

namespace foodprov {

// Record file format: one JSON object per line, UTF-8, fields documented in
// docs/record-format.md. Parsing is lenient about key order and number
// formatting; serialize_record always emits the canonical form (sorted keys,
// no whitespace, probabilities at two decimals), so
// serialize(parse(x)) == x exactly when x is already canonical.

Outcome<FoodRecord> parse_record(std::string_view line);

std::string serialize_record(const FoodRecord& record);

// SHA-256 over the canonical record line. This is the record's content
// fingerprint carried in ledger public metadata and release manifests.
Digest32 record_fingerprint(const FoodRecord& record);

// Flattened per-field view of the record used as annotation-event payload
// and for field-level disclosure. Nested groups flatten to scalar fields
// (kcal, protein, ...) or canonical JSON text (ingredients, evidence, ...);
// unknown extras keep their value under "extra:<name>".
FieldMap record_payload_fields(const FoodRecord& record);

struct RecordParseFailure {
    std::size_t line_number;  // 1-based
    Error error;
};

struct RecordFileResult {
    std::vector<FoodRecord> records;
    std::vector<RecordParseFailure> failures;
};

// Parses every non-empty line; failures are collected, not fatal.
RecordFileResult parse_record_file(std::string_view text);

}  // namespace foodprov
