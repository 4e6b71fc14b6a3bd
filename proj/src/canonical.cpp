#include "foodprov/canonical.hpp"

#include <algorithm>

namespace foodprov {

namespace {

bool has_control_bytes(std::string_view text) {
    for (unsigned char c : text) {
        if (c < 0x20) {
            return true;
        }
    }
    return false;
}

}  // namespace

Outcome<std::string> canonicalize(const FieldMap& fields) {
    FieldMap sorted = fields;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out;
    std::string_view prev_name;
    bool first = true;
    for (const auto& [name, value] : sorted) {
        if (name.empty()) {
            return make_error(ErrorCode::NonCanonicalValue, "empty field name");
        }
        if (has_control_bytes(name) || has_control_bytes(value)) {
            return make_error(ErrorCode::NonCanonicalValue,
                              "control byte in field '" + name + "'");
        }
        if (!first && name == prev_name) {
            return make_error(ErrorCode::NonCanonicalValue,
                              "duplicate field name '" + name + "'");
        }
        out += name;
        out.push_back(kFieldSep);
        out += value;
        out.push_back(kRecordSep);
        prev_name = name;
        first = false;
    }
    return out;
}

Outcome<FieldMap> parse_canonical(std::string_view bytes) {
    FieldMap out;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const std::size_t rec_end = bytes.find(kRecordSep, pos);
        if (rec_end == std::string_view::npos) {
            return make_error(ErrorCode::NonCanonicalValue, "unterminated field pair",
                              static_cast<std::int64_t>(pos));
        }
        const std::string_view pair = bytes.substr(pos, rec_end - pos);
        const std::size_t sep = pair.find(kFieldSep);
        if (sep == std::string_view::npos || sep == 0) {
            return make_error(ErrorCode::NonCanonicalValue, "malformed field pair",
                              static_cast<std::int64_t>(pos));
        }
        std::string name{pair.substr(0, sep)};
        std::string value{pair.substr(sep + 1)};
        if (value.find(kFieldSep) != std::string::npos) {
            return make_error(ErrorCode::NonCanonicalValue, "stray separator in value",
                              static_cast<std::int64_t>(pos));
        }
        if (!out.empty() && name <= out.back().first) {
            return make_error(ErrorCode::NonCanonicalValue,
                              "fields not in canonical order at '" + name + "'",
                              static_cast<std::int64_t>(pos));
        }
        out.emplace_back(std::move(name), std::move(value));
        pos = rec_end + 1;
    }
    return out;
}

const std::string* find_field(const FieldMap& fields, std::string_view name) {
    for (const auto& [k, v] : fields) {
        if (k == name) {
            return &v;
        }
    }
    return nullptr;
}

}  // namespace foodprov
