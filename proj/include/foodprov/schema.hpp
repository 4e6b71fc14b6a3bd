#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foodprov/canonical.hpp"
#include "foodprov/errors.hpp"

namespace foodprov {

// Submission origin classes. Packaged, ChainRestaurant and HomemadeStreet
// carry their own evidence and minimum-level rules; RawProduce and Other
// appear in corpus statistics and inherit HomemadeStreet's rules.
enum class SourceDomain {
    Packaged,
    ChainRestaurant,
    HomemadeStreet,
    RawProduce,
    Other,
};

const char* source_domain_token(SourceDomain d);  // packaged|restaurant|homemade|raw|other
std::optional<SourceDomain> source_domain_from_token(std::string_view token);

// Progressive enrichment tiers:
//   L1 image + dish name, L2 + nutrition, L3 + visible ingredients,
//   L4 + per-ingredient portions, L5 + per-ingredient localization.
struct AnnotationLevel {
    int value = 1;

    static Outcome<AnnotationLevel> make(int v);
    auto operator<=>(const AnnotationLevel&) const = default;
};

enum class EvidenceKind { LabelPhoto, MenuScreenshot, Url, Receipt, Note };

const char* evidence_kind_token(EvidenceKind k);
std::optional<EvidenceKind> evidence_kind_from_token(std::string_view token);

struct EvidenceRef {
    EvidenceKind kind = EvidenceKind::Note;
    std::optional<std::string> blob_fingerprint;  // hex digest of the proof blob
    std::optional<std::string> uri;
    // at least one of blob_fingerprint / uri must be present
};

// Probabilities in [0,1] stored at fixed two-decimal precision (scale 100).
struct AuthenticitySignals {
    std::int64_t camera_or_phone_prob_centi = 0;
    std::int64_t online_download_prob_centi = 0;
    std::int64_t food_prob_centi = 0;
};

struct WalletAddress {
    std::array<std::uint8_t, 20> bytes{};

    std::string to_string() const;  // 0x + 40 lowercase hex digits
    static Outcome<WalletAddress> parse(std::string_view text);
    auto operator<=>(const WalletAddress&) const = default;
};

// First 20 bytes of sha256(label). Used for synthetic identities in tests and
// simulations; real deployments import externally owned addresses instead.
WalletAddress wallet_from_label(std::string_view label);

struct PortionEntry {
    std::string item;
    std::int64_t amount_centi = 0;  // grams or milliliters, scale 100
    std::string unit;               // "g" or "ml"
};

struct NutritionalProfile {
    std::int64_t kcal = 0;
    std::int64_t protein_centi = 0;  // grams, scale 100
    std::int64_t fat_centi = 0;
    std::int64_t carbs_centi = 0;
};

// Axis-aligned box in relative image coordinates, scale 10000 per axis.
struct BoundingBox {
    std::int64_t x0 = 0;
    std::int64_t y0 = 0;
    std::int64_t x1 = 0;
    std::int64_t y1 = 0;
};

struct Localization {
    std::string item;
    BoundingBox box;
};

struct FoodRecord {
    std::string record_id;
    std::string image_ref;  // hex content fingerprint of the image blob
    std::string dish_name;
    SourceDomain source_domain = SourceDomain::Other;
    AnnotationLevel level;
    std::string cuisine;  // free text, stratification key only; may be empty
    std::vector<std::string> ingredients;        // present iff level >= 3
    std::vector<PortionEntry> portion_size;      // present iff level >= 4
    std::optional<NutritionalProfile> nutrition; // required at level >= 2
    std::optional<std::string> cooking_method;
    std::vector<Localization> localizations;     // present iff level >= 5
    std::vector<EvidenceRef> evidence;
    AuthenticitySignals authenticity;
    WalletAddress contributor;
    // Unknown top-level fields, preserved verbatim (canonical JSON text) so
    // fingerprints cover the whole submission. Sorted by name.
    FieldMap extras;
};

// Per-domain submission rules. Lookups for RawProduce and Other fall back to
// the HomemadeStreet entry, keeping the policy total over all five domains.
struct DomainRule {
    AnnotationLevel min_level;
    std::vector<EvidenceKind> accepted_evidence;  // empty = any kind accepted
    bool evidence_optional = false;
};

struct DomainPolicy {
    DomainRule packaged;
    DomainRule chain_restaurant;
    DomainRule homemade_street;

    static DomainPolicy defaults();
    const DomainRule& rule_for(SourceDomain d) const;
};

AnnotationLevel required_level(SourceDomain domain, const DomainPolicy& policy);

enum class ViolationCode {
    LevelTooLow,
    MissingFieldForLevel,
    MissingEvidence,
    RangeViolation,
};

const char* violation_code_name(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
    bool has(ViolationCode code) const;
    std::vector<std::string> codes() const;
};

// Pure rule evaluation; every problem is a report entry, never an error.
ValidationReport validate_record(const FoodRecord& record, const DomainPolicy& policy);

}  // namespace foodprov
