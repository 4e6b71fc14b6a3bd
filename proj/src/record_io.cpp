#include "foodprov/record_io.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "foodprov/decimal.hpp"

namespace foodprov {

namespace {

using nlohmann::json;

const char* const kKnownFields[] = {
    "camera_or_phone_prob", "contributor", "cooking_method", "cuisine",  "dish_name",
    "evidence",             "food_prob",   "food_type",      "image_ref", "ingredients",
    "level",                "localizations", "nutritional_profile", "online_download_prob",
    "portion_size",         "record_id",
};

bool is_known_field(std::string_view name) {
    return std::any_of(std::begin(kKnownFields), std::end(kKnownFields),
                       [name](const char* k) { return name == k; });
}

bool has_control_bytes(std::string_view text) {
    return std::any_of(text.begin(), text.end(),
                       [](unsigned char c) { return c < 0x20; });
}

bool is_lower_hex(std::string_view text) {
    return !text.empty() && text.size() % 2 == 0 &&
           std::all_of(text.begin(), text.end(), [](unsigned char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

Error field_error(std::string_view field, std::string_view why) {
    return make_error(ErrorCode::ParseError,
                      "field '" + std::string(field) + "': " + std::string(why));
}

Outcome<std::string> take_string(const json& j, std::string_view field, bool allow_empty = false) {
    if (!j.is_string()) {
        return field_error(field, "expected string");
    }
    std::string s = j.get<std::string>();
    if (s.empty() && !allow_empty) {
        return field_error(field, "must not be empty");
    }
    if (has_control_bytes(s)) {
        return field_error(field, "control character in text");
    }
    return s;
}

Outcome<std::int64_t> take_scaled(const json& j, std::string_view field, int max_frac) {
    if (!j.is_number()) {
        return field_error(field, "expected number");
    }
    auto scaled = scaled_from_double(j.get<double>(), max_frac);
    if (!scaled.ok()) {
        return field_error(field, scaled.error().message);
    }
    return scaled.value();
}

// JSON string escaping identical to nlohmann's dump(): mandatory escapes
// plus \uXXXX for remaining control characters; UTF-8 passes through.
void append_json_string(std::string& out, std::string_view s) {
    out.push_back('"');
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    out.push_back('"');
}

std::string ingredients_json(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out.push_back(',');
        append_json_string(out, items[i]);
    }
    out.push_back(']');
    return out;
}

std::string portion_json(const std::vector<PortionEntry>& portions) {
    std::string out = "[";
    for (std::size_t i = 0; i < portions.size(); ++i) {
        if (i > 0) out.push_back(',');
        out.push_back('[');
        append_json_string(out, portions[i].item);
        out.push_back(',');
        out += format_minimal(portions[i].amount_centi, 2);
        out.push_back(',');
        append_json_string(out, portions[i].unit);
        out.push_back(']');
    }
    out.push_back(']');
    return out;
}

std::string localizations_json(const std::vector<Localization>& locs) {
    std::string out = "[";
    for (std::size_t i = 0; i < locs.size(); ++i) {
        if (i > 0) out.push_back(',');
        out.push_back('[');
        append_json_string(out, locs[i].item);
        out += ",[";
        const BoundingBox& b = locs[i].box;
        out += format_minimal(b.x0, 4);
        out.push_back(',');
        out += format_minimal(b.y0, 4);
        out.push_back(',');
        out += format_minimal(b.x1, 4);
        out.push_back(',');
        out += format_minimal(b.y1, 4);
        out += "]]";
    }
    out.push_back(']');
    return out;
}

std::string evidence_json(const std::vector<EvidenceRef>& evidence) {
    std::string out = "[";
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        if (i > 0) out.push_back(',');
        const EvidenceRef& e = evidence[i];
        out.push_back('{');
        bool first = true;
        if (e.blob_fingerprint.has_value()) {
            out += "\"blob\":";
            append_json_string(out, *e.blob_fingerprint);
            first = false;
        }
        if (!first) out.push_back(',');
        out += "\"kind\":";
        append_json_string(out, evidence_kind_token(e.kind));
        if (e.uri.has_value()) {
            out += ",\"uri\":";
            append_json_string(out, *e.uri);
        }
        out.push_back('}');
    }
    out.push_back(']');
    return out;
}

std::string nutrition_json(const NutritionalProfile& n) {
    std::string out = "{\"carbs\":";
    out += format_minimal(n.carbs_centi, 2);
    out += ",\"fat\":";
    out += format_minimal(n.fat_centi, 2);
    out += ",\"kcal\":";
    out += std::to_string(n.kcal);
    out += ",\"protein\":";
    out += format_minimal(n.protein_centi, 2);
    out.push_back('}');
    return out;
}

Status parse_ingredients(const json& j, FoodRecord& record) {
    if (!j.is_array()) {
        return field_error("ingredients", "expected array of strings");
    }
    for (const json& item : j) {
        auto s = take_string(item, "ingredients");
        if (!s.ok()) return s.error();
        record.ingredients.push_back(std::move(s.value()));
    }
    return Status::success();
}

Status parse_portions(const json& j, FoodRecord& record) {
    if (!j.is_array()) {
        return field_error("portion_size", "expected array");
    }
    for (const json& item : j) {
        if (!item.is_array() || item.size() != 3) {
            return field_error("portion_size", "entry must be [item, amount, unit]");
        }
        PortionEntry p;
        auto name = take_string(item[0], "portion_size.item");
        if (!name.ok()) return name.error();
        p.item = std::move(name.value());
        auto amount = take_scaled(item[1], "portion_size.amount", 2);
        if (!amount.ok()) return amount.error();
        p.amount_centi = amount.value();
        auto unit = take_string(item[2], "portion_size.unit");
        if (!unit.ok()) return unit.error();
        if (unit.value() != "g" && unit.value() != "ml") {
            return field_error("portion_size.unit", "must be 'g' or 'ml'");
        }
        p.unit = std::move(unit.value());
        record.portion_size.push_back(std::move(p));
    }
    return Status::success();
}

Status parse_localizations(const json& j, FoodRecord& record) {
    if (!j.is_array()) {
        return field_error("localizations", "expected array");
    }
    for (const json& item : j) {
        if (!item.is_array() || item.size() != 2 || !item[1].is_array() || item[1].size() != 4) {
            return field_error("localizations", "entry must be [item, [x0,y0,x1,y1]]");
        }
        Localization loc;
        auto name = take_string(item[0], "localizations.item");
        if (!name.ok()) return name.error();
        loc.item = std::move(name.value());
        std::int64_t* coords[4] = {&loc.box.x0, &loc.box.y0, &loc.box.x1, &loc.box.y1};
        for (int i = 0; i < 4; ++i) {
            auto v = take_scaled(item[1][static_cast<std::size_t>(i)], "localizations.box", 4);
            if (!v.ok()) return v.error();
            *coords[i] = v.value();
        }
        record.localizations.push_back(std::move(loc));
    }
    return Status::success();
}

Status parse_evidence(const json& j, FoodRecord& record) {
    if (!j.is_array()) {
        return field_error("evidence", "expected array");
    }
    for (const json& item : j) {
        if (!item.is_object()) {
            return field_error("evidence", "entry must be an object");
        }
        EvidenceRef e;
        if (!item.contains("kind")) {
            return field_error("evidence.kind", "missing");
        }
        auto kind_text = take_string(item.at("kind"), "evidence.kind");
        if (!kind_text.ok()) return kind_text.error();
        const auto kind = evidence_kind_from_token(kind_text.value());
        if (!kind.has_value()) {
            return field_error("evidence.kind", "unknown kind '" + kind_text.value() + "'");
        }
        e.kind = *kind;
        if (item.contains("blob")) {
            auto blob = take_string(item.at("blob"), "evidence.blob");
            if (!blob.ok()) return blob.error();
            if (!is_lower_hex(blob.value())) {
                return field_error("evidence.blob", "must be lowercase hex");
            }
            e.blob_fingerprint = std::move(blob.value());
        }
        if (item.contains("uri")) {
            auto uri = take_string(item.at("uri"), "evidence.uri");
            if (!uri.ok()) return uri.error();
            e.uri = std::move(uri.value());
        }
        if (!e.blob_fingerprint.has_value() && !e.uri.has_value()) {
            return field_error("evidence", "needs blob or uri");
        }
        for (const auto& [k, v] : item.items()) {
            if (k != "kind" && k != "blob" && k != "uri") {
                return field_error("evidence", "unknown key '" + k + "'");
            }
        }
        record.evidence.push_back(std::move(e));
    }
    return Status::success();
}

Status parse_nutrition(const json& j, FoodRecord& record) {
    if (!j.is_object()) {
        return field_error("nutritional_profile", "expected object");
    }
    NutritionalProfile n;
    if (!j.contains("kcal") || !j.at("kcal").is_number_integer()) {
        return field_error("nutritional_profile.kcal", "integer required");
    }
    n.kcal = j.at("kcal").get<std::int64_t>();
    struct MacroField {
        const char* name;
        std::int64_t* dest;
    } macros[] = {{"protein", &n.protein_centi}, {"fat", &n.fat_centi}, {"carbs", &n.carbs_centi}};
    for (const MacroField& m : macros) {
        if (!j.contains(m.name)) {
            return field_error(std::string("nutritional_profile.") + m.name, "missing");
        }
        auto v = take_scaled(j.at(m.name), m.name, 2);
        if (!v.ok()) return v.error();
        *m.dest = v.value();
    }
    for (const auto& [k, v] : j.items()) {
        if (k != "kcal" && k != "protein" && k != "fat" && k != "carbs") {
            return field_error("nutritional_profile", "unknown key '" + k + "'");
        }
    }
    record.nutrition = n;
    return Status::success();
}

}  // namespace

Outcome<FoodRecord> parse_record(std::string_view line) {
    json root;
    try {
        root = json::parse(line);
    } catch (const json::parse_error& e) {
        return make_error(ErrorCode::ParseError, e.what(),
                          static_cast<std::int64_t>(e.byte));
    }
    if (!root.is_object()) {
        return make_error(ErrorCode::ParseError, "record line must be a JSON object", 0);
    }

    FoodRecord record;
    for (const char* required :
         {"record_id", "image_ref", "dish_name", "food_type", "level", "camera_or_phone_prob",
          "online_download_prob", "food_prob", "contributor"}) {
        if (!root.contains(required)) {
            return field_error(required, "missing");
        }
    }

    {
        auto v = take_string(root.at("record_id"), "record_id");
        if (!v.ok()) return v.error();
        record.record_id = std::move(v.value());
    }
    {
        auto v = take_string(root.at("image_ref"), "image_ref");
        if (!v.ok()) return v.error();
        if (!is_lower_hex(v.value())) {
            return field_error("image_ref", "must be lowercase hex");
        }
        record.image_ref = std::move(v.value());
    }
    {
        auto v = take_string(root.at("dish_name"), "dish_name");
        if (!v.ok()) return v.error();
        record.dish_name = std::move(v.value());
    }
    {
        auto v = take_string(root.at("food_type"), "food_type");
        if (!v.ok()) return v.error();
        const auto domain = source_domain_from_token(v.value());
        if (!domain.has_value()) {
            return field_error("food_type", "unknown domain '" + v.value() + "'");
        }
        record.source_domain = *domain;
    }
    {
        const json& j = root.at("level");
        if (!j.is_number_integer()) {
            return field_error("level", "integer required");
        }
        auto level = AnnotationLevel::make(j.get<int>());
        if (!level.ok()) return level.error();
        record.level = level.value();
    }
    if (root.contains("cuisine")) {
        auto v = take_string(root.at("cuisine"), "cuisine");
        if (!v.ok()) return v.error();
        record.cuisine = std::move(v.value());
    }
    if (root.contains("ingredients")) {
        if (auto s = parse_ingredients(root.at("ingredients"), record); !s.ok()) return s.error();
    }
    if (root.contains("portion_size")) {
        if (auto s = parse_portions(root.at("portion_size"), record); !s.ok()) return s.error();
    }
    if (root.contains("nutritional_profile")) {
        if (auto s = parse_nutrition(root.at("nutritional_profile"), record); !s.ok()) return s.error();
    }
    if (root.contains("cooking_method")) {
        auto v = take_string(root.at("cooking_method"), "cooking_method");
        if (!v.ok()) return v.error();
        record.cooking_method = std::move(v.value());
    }
    if (root.contains("localizations")) {
        if (auto s = parse_localizations(root.at("localizations"), record); !s.ok()) return s.error();
    }
    if (root.contains("evidence")) {
        if (auto s = parse_evidence(root.at("evidence"), record); !s.ok()) return s.error();
    }
    {
        auto v = take_string(root.at("contributor"), "contributor");
        if (!v.ok()) return v.error();
        auto wallet = WalletAddress::parse(v.value());
        if (!wallet.ok()) return wallet.error();
        record.contributor = wallet.value();
    }
    struct ProbField {
        const char* name;
        std::int64_t* dest;
    } probs[] = {
        {"camera_or_phone_prob", &record.authenticity.camera_or_phone_prob_centi},
        {"online_download_prob", &record.authenticity.online_download_prob_centi},
        {"food_prob", &record.authenticity.food_prob_centi},
    };
    for (const ProbField& p : probs) {
        auto v = take_scaled(root.at(p.name), p.name, 2);
        if (!v.ok()) return v.error();
        *p.dest = v.value();
    }

    for (const auto& [key, value] : root.items()) {
        if (is_known_field(key)) {
            continue;
        }
        if (key.empty() || has_control_bytes(key)) {
            return field_error(key, "invalid extra field name");
        }
        if (value.is_null()) {
            return field_error(key, "null not allowed");
        }
        record.extras.emplace_back(key, value.dump());
    }
    std::sort(record.extras.begin(), record.extras.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    return record;
}

std::string serialize_record(const FoodRecord& record) {
    std::vector<std::pair<std::string, std::string>> parts;
    auto add_string = [&parts](const char* name, std::string_view value) {
        std::string rendered;
        append_json_string(rendered, value);
        parts.emplace_back(name, std::move(rendered));
    };
    add_string("record_id", record.record_id);
    add_string("image_ref", record.image_ref);
    add_string("dish_name", record.dish_name);
    add_string("food_type", source_domain_token(record.source_domain));
    parts.emplace_back("level", std::to_string(record.level.value));
    if (!record.cuisine.empty()) {
        add_string("cuisine", record.cuisine);
    }
    if (!record.ingredients.empty()) {
        parts.emplace_back("ingredients", ingredients_json(record.ingredients));
    }
    if (!record.portion_size.empty()) {
        parts.emplace_back("portion_size", portion_json(record.portion_size));
    }
    if (record.nutrition.has_value()) {
        parts.emplace_back("nutritional_profile", nutrition_json(*record.nutrition));
    }
    if (record.cooking_method.has_value()) {
        add_string("cooking_method", *record.cooking_method);
    }
    if (!record.localizations.empty()) {
        parts.emplace_back("localizations", localizations_json(record.localizations));
    }
    if (!record.evidence.empty()) {
        parts.emplace_back("evidence", evidence_json(record.evidence));
    }
    parts.emplace_back("camera_or_phone_prob",
                       format_fixed(record.authenticity.camera_or_phone_prob_centi, 2));
    parts.emplace_back("online_download_prob",
                       format_fixed(record.authenticity.online_download_prob_centi, 2));
    parts.emplace_back("food_prob", format_fixed(record.authenticity.food_prob_centi, 2));
    add_string("contributor", record.contributor.to_string());
    for (const auto& [key, value] : record.extras) {
        // extras values are already canonical JSON text
        parts.emplace_back(key, value);
    }

    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out = "{";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out.push_back(',');
        append_json_string(out, parts[i].first);
        out.push_back(':');
        out += parts[i].second;
    }
    out.push_back('}');
    return out;
}

Digest32 record_fingerprint(const FoodRecord& record) {
    return sha256(serialize_record(record));
}

FieldMap record_payload_fields(const FoodRecord& record) {
    FieldMap fields;
    fields.emplace_back("dish_name", record.dish_name);
    fields.emplace_back("food_type", source_domain_token(record.source_domain));
    fields.emplace_back("level", std::to_string(record.level.value));
    fields.emplace_back("image", record.image_ref);
    if (!record.cuisine.empty()) {
        fields.emplace_back("cuisine", record.cuisine);
    }
    fields.emplace_back("camera_or_phone_prob",
                        format_fixed(record.authenticity.camera_or_phone_prob_centi, 2));
    fields.emplace_back("online_download_prob",
                        format_fixed(record.authenticity.online_download_prob_centi, 2));
    fields.emplace_back("food_prob", format_fixed(record.authenticity.food_prob_centi, 2));
    if (record.cooking_method.has_value()) {
        fields.emplace_back("cooking_method", *record.cooking_method);
    }
    if (record.nutrition.has_value()) {
        fields.emplace_back("kcal", std::to_string(record.nutrition->kcal));
        fields.emplace_back("protein", format_minimal(record.nutrition->protein_centi, 2));
        fields.emplace_back("fat", format_minimal(record.nutrition->fat_centi, 2));
        fields.emplace_back("carbs", format_minimal(record.nutrition->carbs_centi, 2));
    }
    if (!record.ingredients.empty()) {
        fields.emplace_back("ingredients", ingredients_json(record.ingredients));
    }
    if (!record.portion_size.empty()) {
        fields.emplace_back("portion_size", portion_json(record.portion_size));
    }
    if (!record.localizations.empty()) {
        fields.emplace_back("localizations", localizations_json(record.localizations));
    }
    if (!record.evidence.empty()) {
        fields.emplace_back("evidence", evidence_json(record.evidence));
    }
    for (const auto& [key, value] : record.extras) {
        fields.emplace_back("extra:" + key, value);
    }
    std::sort(fields.begin(), fields.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return fields;
}

RecordFileResult parse_record_file(std::string_view text) {
    RecordFileResult result;
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = text.substr(pos, end - pos);
        ++line_number;
        if (!line.empty()) {
            auto record = parse_record(line);
            if (record.ok()) {
                result.records.push_back(std::move(record.value()));
            } else {
                result.failures.push_back({line_number, record.error()});
            }
        }
        if (end == text.size()) {
            break;
        }
        pos = end + 1;
    }
    return result;
}

}  // namespace foodprov
