#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "foodprov/errors.hpp"
#include "foodprov/hash.hpp"
#include "foodprov/phash.hpp"
#include "foodprov/review.hpp"
#include "foodprov/schema.hpp"

namespace foodprov {

enum class AccessTier { Public, Commercial };
enum class SplitAssignment { Train, Validation, Test };

const char* access_tier_token(AccessTier t);
const char* split_token(SplitAssignment s);

// Keyed-digest ordering: ids sorted by SHA-256(key || seed || id), first
// floor(N * ratio_bp / 10000) become Public. Order-independent and exact.
std::map<std::string, AccessTier> partition_access(const std::vector<std::string>& record_ids,
                                                   std::uint64_t seed,
                                                   std::uint32_t public_ratio_bp = 1000);

// Largest-remainder apportionment of (0.8, 0.1, 0.1) over n, remainder
// ties resolved Train > Validation > Test.
std::array<std::size_t, 3> apportion_split(std::size_t n);

struct SplitItem {
    std::string record_id;
    std::string cuisine;  // may be empty
    SourceDomain source_domain = SourceDomain::Other;
};

// Within each (cuisine, source domain) stratum, records are ordered by
// keyed digest and assigned per apportion_split.
std::map<std::string, SplitAssignment> stratified_split(const std::vector<SplitItem>& items,
                                                        std::uint64_t seed);

struct ManifestEntry {
    std::string record_id;
    Digest32 fingerprint{};
    AccessTier tier = AccessTier::Commercial;
    SplitAssignment split = SplitAssignment::Train;
    bool deduped = false;  // survived a multi-member duplicate cluster
};

struct ReleaseManifest {
    std::string release_id;
    std::string schema_version;
    std::string check_logic_version;
    std::uint64_t seed = 0;
    int dedup_threshold = 10;
    std::vector<ManifestEntry> entries;  // sorted by record_id
    Digest32 manifest_digest{};          // over everything above, serialized
};

std::string manifest_to_text(const ReleaseManifest& manifest);  // digest line last
Outcome<ReleaseManifest> manifest_from_text(std::string_view text);  // recomputes digest

struct CurationConfig {
    std::string release_id;
    std::string schema_version = "1.0.0";
    std::string check_logic_version = "1.0.0";
    std::uint64_t seed = 0;
    int dedup_threshold = 10;
    std::uint32_t public_ratio_bp = 1000;
};

// Dedup -> access partition -> stratified split over the pipeline's
// Accepted submissions. Appends one Adoption event per included record and
// marks those submissions Curated. Records without a supplied hash fall
// back to a digest of their image reference, so exact re-uploads still
// cluster. NO_ACCEPTED_RECORDS when nothing is accepted.
Outcome<ReleaseManifest> curate(ReviewPipeline& pipeline,
                                const std::map<std::string, PHash64>& hashes,
                                const CurationConfig& config, std::int64_t ts);

struct DatasetStats {
    std::map<SourceDomain, std::uint64_t> by_domain;
    std::map<std::int64_t, std::uint64_t> by_camera_prob_centi;  // exact stored values
    std::uint64_t total = 0;
};

struct CardRow {
    SourceDomain domain = SourceDomain::Other;
    std::int64_t camera_prob_centi = 0;
};

// Card file: one "<domain-token> TAB <prob>" line per record.
Outcome<std::vector<CardRow>> parse_card(std::string_view text);

DatasetStats dataset_stats(const std::vector<CardRow>& rows);
DatasetStats dataset_stats(const std::vector<FoodRecord>& records);

// Fixed rendering: domain counts in corpus order, then probability bins
// in descending value order, then the total.
std::string stats_to_text(const DatasetStats& stats);

}  // namespace foodprov
