#include "foodprov/schema.hpp"

#include <algorithm>

#include "foodprov/decimal.hpp"
#include "foodprov/hash.hpp"

namespace foodprov {

const char* source_domain_token(SourceDomain d) {
    switch (d) {
        case SourceDomain::Packaged: return "packaged";
        case SourceDomain::ChainRestaurant: return "restaurant";
        case SourceDomain::HomemadeStreet: return "homemade";
        case SourceDomain::RawProduce: return "raw";
        case SourceDomain::Other: return "other";
    }
    return "other";
}

std::optional<SourceDomain> source_domain_from_token(std::string_view token) {
    if (token == "packaged") return SourceDomain::Packaged;
    if (token == "restaurant") return SourceDomain::ChainRestaurant;
    if (token == "homemade") return SourceDomain::HomemadeStreet;
    if (token == "raw") return SourceDomain::RawProduce;
    if (token == "other") return SourceDomain::Other;
    return std::nullopt;
}

Outcome<AnnotationLevel> AnnotationLevel::make(int v) {
    if (v < 1 || v > 5) {
        return make_error(ErrorCode::ParseError, "annotation level must be 1..5, got " +
                                                     std::to_string(v));
    }
    return AnnotationLevel{v};
}

const char* evidence_kind_token(EvidenceKind k) {
    switch (k) {
        case EvidenceKind::LabelPhoto: return "label_photo";
        case EvidenceKind::MenuScreenshot: return "menu_screenshot";
        case EvidenceKind::Url: return "url";
        case EvidenceKind::Receipt: return "receipt";
        case EvidenceKind::Note: return "note";
    }
    return "note";
}

std::optional<EvidenceKind> evidence_kind_from_token(std::string_view token) {
    if (token == "label_photo") return EvidenceKind::LabelPhoto;
    if (token == "menu_screenshot") return EvidenceKind::MenuScreenshot;
    if (token == "url") return EvidenceKind::Url;
    if (token == "receipt") return EvidenceKind::Receipt;
    if (token == "note") return EvidenceKind::Note;
    return std::nullopt;
}

std::string WalletAddress::to_string() const {
    return "0x" + to_hex(std::string_view{reinterpret_cast<const char*>(bytes.data()),
                                          bytes.size()});
}

WalletAddress wallet_from_label(std::string_view label) {
    const Digest32 digest = sha256(label);
    WalletAddress wallet;
    std::copy_n(digest.begin(), wallet.bytes.size(), wallet.bytes.begin());
    return wallet;
}

Outcome<WalletAddress> WalletAddress::parse(std::string_view text) {
    if (text.size() != 42 || text.substr(0, 2) != "0x") {
        return make_error(ErrorCode::ParseError,
                          "wallet address must be 0x followed by 40 hex digits");
    }
    const auto raw = bytes_from_hex(text.substr(2));
    if (!raw.has_value()) {
        return make_error(ErrorCode::ParseError, "wallet address has non-hex digits");
    }
    WalletAddress out;
    std::copy(raw->begin(), raw->end(), out.bytes.begin());
    return out;
}

DomainPolicy DomainPolicy::defaults() {
    DomainPolicy p;
    p.packaged = DomainRule{AnnotationLevel{2}, {EvidenceKind::LabelPhoto}, false};
    p.chain_restaurant =
        DomainRule{AnnotationLevel{2}, {EvidenceKind::MenuScreenshot, EvidenceKind::Url}, false};
    p.homemade_street =
        DomainRule{AnnotationLevel{3}, {EvidenceKind::Note, EvidenceKind::Receipt}, true};
    return p;
}

const DomainRule& DomainPolicy::rule_for(SourceDomain d) const {
    switch (d) {
        case SourceDomain::Packaged: return packaged;
        case SourceDomain::ChainRestaurant: return chain_restaurant;
        case SourceDomain::HomemadeStreet:
        case SourceDomain::RawProduce:
        case SourceDomain::Other: return homemade_street;
    }
    return homemade_street;
}

AnnotationLevel required_level(SourceDomain domain, const DomainPolicy& policy) {
    return policy.rule_for(domain).min_level;
}

const char* violation_code_name(ViolationCode code) {
    switch (code) {
        case ViolationCode::LevelTooLow: return "LEVEL_TOO_LOW";
        case ViolationCode::MissingFieldForLevel: return "MISSING_FIELD_FOR_LEVEL";
        case ViolationCode::MissingEvidence: return "MISSING_EVIDENCE";
        case ViolationCode::RangeViolation: return "RANGE_VIOLATION";
    }
    return "RANGE_VIOLATION";
}

bool ValidationReport::has(ViolationCode code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [code](const Violation& v) { return v.code == code; });
}

std::vector<std::string> ValidationReport::codes() const {
    std::vector<std::string> out;
    out.reserve(violations.size());
    for (const Violation& v : violations) {
        out.emplace_back(violation_code_name(v.code));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

void check_prob(std::int64_t centi, const char* name, ValidationReport& report) {
    if (centi < 0 || centi > 100) {
        report.violations.push_back(
            {ViolationCode::RangeViolation,
             std::string(name) + " out of [0,1]: " + format_fixed(centi, 2)});
    }
}

// The "present iff level >= k" rule is enforced in both directions; detail
// text distinguishes missing from premature.
void check_level_gated(bool present, int level, int gate, const char* name,
                       ValidationReport& report) {
    if (level >= gate && !present) {
        report.violations.push_back({ViolationCode::MissingFieldForLevel,
                                     std::string(name) + " required at level >= " +
                                         std::to_string(gate)});
    }
    if (level < gate && present) {
        report.violations.push_back({ViolationCode::MissingFieldForLevel,
                                     std::string(name) + " present but level < " +
                                         std::to_string(gate)});
    }
}

}  // namespace

ValidationReport validate_record(const FoodRecord& record, const DomainPolicy& policy) {
    ValidationReport report;
    const DomainRule& rule = policy.rule_for(record.source_domain);
    const int level = record.level.value;

    if (record.level < rule.min_level) {
        report.violations.push_back(
            {ViolationCode::LevelTooLow,
             "level " + std::to_string(level) + " below domain minimum " +
                 std::to_string(rule.min_level.value)});
    }

    check_level_gated(!record.ingredients.empty(), level, 3, "ingredients", report);
    check_level_gated(!record.portion_size.empty(), level, 4, "portion_size", report);
    check_level_gated(!record.localizations.empty(), level, 5, "localizations", report);
    // nutrition is required from L2 upward but may be volunteered at L1
    if (level >= 2 && !record.nutrition.has_value()) {
        report.violations.push_back(
            {ViolationCode::MissingFieldForLevel, "nutritional_profile required at level >= 2"});
    }

    if (record.nutrition.has_value()) {
        const NutritionalProfile& n = *record.nutrition;
        if (n.kcal < 0) {
            report.violations.push_back(
                {ViolationCode::RangeViolation, "kcal negative: " + std::to_string(n.kcal)});
        }
        if (n.protein_centi < 0 || n.fat_centi < 0 || n.carbs_centi < 0) {
            report.violations.push_back({ViolationCode::RangeViolation, "negative macro amount"});
        }
    }
    for (const PortionEntry& p : record.portion_size) {
        if (p.amount_centi <= 0) {
            report.violations.push_back(
                {ViolationCode::RangeViolation,
                 "portion amount must be positive: " + p.item});
        }
    }
    for (const Localization& loc : record.localizations) {
        const BoundingBox& b = loc.box;
        const bool in_unit = b.x0 >= 0 && b.y0 >= 0 && b.x1 <= 10000 && b.y1 <= 10000;
        if (!in_unit || b.x0 > b.x1 || b.y0 > b.y1) {
            report.violations.push_back(
                {ViolationCode::RangeViolation, "bounding box outside unit square: " + loc.item});
        }
    }
    check_prob(record.authenticity.camera_or_phone_prob_centi, "camera_or_phone_prob", report);
    check_prob(record.authenticity.online_download_prob_centi, "online_download_prob", report);
    check_prob(record.authenticity.food_prob_centi, "food_prob", report);

    if (!rule.evidence_optional) {
        const bool has_accepted =
            std::any_of(record.evidence.begin(), record.evidence.end(),
                        [&rule](const EvidenceRef& e) {
                            return rule.accepted_evidence.empty() ||
                                   std::find(rule.accepted_evidence.begin(),
                                             rule.accepted_evidence.end(),
                                             e.kind) != rule.accepted_evidence.end();
                        });
        if (!has_accepted) {
            std::string kinds;
            for (const EvidenceKind k : rule.accepted_evidence) {
                if (!kinds.empty()) kinds += "|";
                kinds += evidence_kind_token(k);
            }
            report.violations.push_back(
                {ViolationCode::MissingEvidence,
                 kinds.empty() ? "evidence required" : "evidence of kind " + kinds + " required"});
        }
    }
    return report;
}

}  // namespace foodprov
