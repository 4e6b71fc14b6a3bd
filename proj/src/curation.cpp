#include "foodprov/curation.hpp"

#include <algorithm>

#include "foodprov/decimal.hpp"
#include "foodprov/record_io.hpp"
#include "foodprov/rng.hpp"

namespace foodprov {

namespace {

struct RankedId {
    Digest32 rank;
    const std::string* id;
};

void sort_by_rank(std::vector<RankedId>& ranked) {
    std::sort(ranked.begin(), ranked.end(), [](const RankedId& a, const RankedId& b) {
        if (a.rank != b.rank) {
            return a.rank < b.rank;
        }
        return *a.id < *b.id;
    });
}

PHash64 fallback_hash(const std::string& image_ref) {
    return PHash64{digest_prefix_u64(sha256("image:" + image_ref))};
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    return lines;
}

std::vector<std::string_view> columns_of(std::string_view line) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            parts.push_back(line.substr(pos));
            return parts;
        }
        parts.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
}

}  // namespace

const char* access_tier_token(AccessTier t) {
    return t == AccessTier::Public ? "public" : "commercial";
}

const char* split_token(SplitAssignment s) {
    switch (s) {
        case SplitAssignment::Train: return "train";
        case SplitAssignment::Validation: return "validation";
        case SplitAssignment::Test: return "test";
    }
    return "?";
}

std::map<std::string, AccessTier> partition_access(const std::vector<std::string>& record_ids,
                                                   std::uint64_t seed,
                                                   std::uint32_t public_ratio_bp) {
    std::vector<RankedId> ranked;
    ranked.reserve(record_ids.size());
    for (const std::string& id : record_ids) {
        ranked.push_back(RankedId{keyed_digest("access", seed, id), &id});
    }
    sort_by_rank(ranked);
    const std::size_t public_count =
        static_cast<std::size_t>(static_cast<std::uint64_t>(record_ids.size()) *
                                 public_ratio_bp / 10000);
    std::map<std::string, AccessTier> out;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        out[*ranked[i].id] = i < public_count ? AccessTier::Public : AccessTier::Commercial;
    }
    return out;
}

std::array<std::size_t, 3> apportion_split(std::size_t n) {
    constexpr std::size_t weights[3] = {8, 1, 1};
    std::array<std::size_t, 3> counts{};
    std::size_t remainders[3];
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        counts[static_cast<std::size_t>(i)] = n * weights[i] / 10;
        remainders[i] = n * weights[i] % 10;
        assigned += counts[static_cast<std::size_t>(i)];
    }
    std::size_t leftover = n - assigned;
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&remainders](int a, int b) {
        if (remainders[a] != remainders[b]) {
            return remainders[a] > remainders[b];
        }
        return a < b;  // ties: Train, then Validation, then Test
    });
    for (int i = 0; i < 3 && leftover > 0; ++i, --leftover) {
        counts[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] += 1;
    }
    return counts;
}

std::map<std::string, SplitAssignment> stratified_split(const std::vector<SplitItem>& items,
                                                        std::uint64_t seed) {
    std::map<std::string, std::vector<const SplitItem*>> strata;
    for (const SplitItem& item : items) {
        std::string key = item.cuisine;
        key.push_back(kFieldSep);
        key += source_domain_token(item.source_domain);
        strata[key].push_back(&item);
    }

    std::map<std::string, SplitAssignment> out;
    for (const auto& [key, members] : strata) {
        std::vector<RankedId> ranked;
        ranked.reserve(members.size());
        for (const SplitItem* item : members) {
            ranked.push_back(RankedId{keyed_digest("split", seed, item->record_id),
                                      &item->record_id});
        }
        sort_by_rank(ranked);
        const auto counts = apportion_split(ranked.size());
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            SplitAssignment split;
            if (i < counts[0]) {
                split = SplitAssignment::Train;
            } else if (i < counts[0] + counts[1]) {
                split = SplitAssignment::Validation;
            } else {
                split = SplitAssignment::Test;
            }
            out[*ranked[i].id] = split;
        }
    }
    return out;
}

std::string manifest_to_text(const ReleaseManifest& manifest) {
    std::string out = "#release v1\n";
    out += "release\t" + manifest.release_id + "\n";
    out += "schema_version\t" + manifest.schema_version + "\n";
    out += "check_logic_version\t" + manifest.check_logic_version + "\n";
    out += "seed\t" + std::to_string(manifest.seed) + "\n";
    out += "dedup_threshold\t" + std::to_string(manifest.dedup_threshold) + "\n";
    for (const ManifestEntry& entry : manifest.entries) {
        out += "entry\t" + entry.record_id + "\t" + to_hex(entry.fingerprint) + "\t";
        out += access_tier_token(entry.tier);
        out.push_back('\t');
        out += split_token(entry.split);
        out.push_back('\t');
        out += entry.deduped ? "1" : "0";
        out.push_back('\n');
    }
    out += "digest\t" + to_hex(sha256(out)) + "\n";
    return out;
}

Outcome<ReleaseManifest> manifest_from_text(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.size() < 7 || lines[0] != "#release v1") {
        return make_error(ErrorCode::ParseError, "not a release manifest");
    }
    ReleaseManifest manifest;
    const struct {
        const char* key;
        std::size_t line;
    } headers[] = {{"release", 1}, {"schema_version", 2}, {"check_logic_version", 3},
                   {"seed", 4},    {"dedup_threshold", 5}};
    std::string header_values[5];
    for (int i = 0; i < 5; ++i) {
        const auto cols = columns_of(lines[headers[i].line]);
        if (cols.size() != 2 || cols[0] != headers[i].key) {
            return make_error(ErrorCode::ParseError,
                              std::string("bad header line ") + headers[i].key,
                              static_cast<std::int64_t>(headers[i].line + 1));
        }
        header_values[i] = std::string(cols[1]);
    }
    manifest.release_id = header_values[0];
    manifest.schema_version = header_values[1];
    manifest.check_logic_version = header_values[2];
    try {
        manifest.seed = std::stoull(header_values[3]);
        manifest.dedup_threshold = std::stoi(header_values[4]);
    } catch (const std::exception&) {
        return make_error(ErrorCode::ParseError, "bad numeric header");
    }

    std::size_t digest_line = lines.size();
    for (std::size_t i = 6; i < lines.size(); ++i) {
        const auto cols = columns_of(lines[i]);
        if (cols[0] == "digest") {
            if (cols.size() != 2 || i + 1 != lines.size()) {
                return make_error(ErrorCode::ParseError, "digest line misplaced",
                                  static_cast<std::int64_t>(i + 1));
            }
            digest_line = i;
            const auto digest = digest_from_hex(cols[1]);
            if (!digest.has_value()) {
                return make_error(ErrorCode::ParseError, "bad digest hex",
                                  static_cast<std::int64_t>(i + 1));
            }
            manifest.manifest_digest = *digest;
            break;
        }
        if (cols.size() != 6 || cols[0] != "entry") {
            return make_error(ErrorCode::ParseError, "bad entry line",
                              static_cast<std::int64_t>(i + 1));
        }
        ManifestEntry entry;
        entry.record_id = std::string(cols[1]);
        const auto fp = digest_from_hex(cols[2]);
        if (!fp.has_value()) {
            return make_error(ErrorCode::ParseError, "bad fingerprint hex",
                              static_cast<std::int64_t>(i + 1));
        }
        entry.fingerprint = *fp;
        if (cols[3] == "public") {
            entry.tier = AccessTier::Public;
        } else if (cols[3] == "commercial") {
            entry.tier = AccessTier::Commercial;
        } else {
            return make_error(ErrorCode::ParseError, "bad tier",
                              static_cast<std::int64_t>(i + 1));
        }
        if (cols[4] == "train") {
            entry.split = SplitAssignment::Train;
        } else if (cols[4] == "validation") {
            entry.split = SplitAssignment::Validation;
        } else if (cols[4] == "test") {
            entry.split = SplitAssignment::Test;
        } else {
            return make_error(ErrorCode::ParseError, "bad split",
                              static_cast<std::int64_t>(i + 1));
        }
        if (cols[5] == "1") {
            entry.deduped = true;
        } else if (cols[5] == "0") {
            entry.deduped = false;
        } else {
            return make_error(ErrorCode::ParseError, "bad dedup flag",
                              static_cast<std::int64_t>(i + 1));
        }
        manifest.entries.push_back(std::move(entry));
    }
    if (digest_line == lines.size()) {
        return make_error(ErrorCode::ParseError, "missing digest line");
    }

    // Frozen-index check: the stored digest must match a recomputation
    // over the preceding bytes.
    ReleaseManifest recomputed = manifest;
    const std::string canonical = manifest_to_text(recomputed);
    const auto recomputed_back = lines_of(canonical);
    const auto digest_cols = columns_of(recomputed_back.back());
    if (digest_cols.size() != 2 || std::string(digest_cols[1]) != to_hex(manifest.manifest_digest)) {
        return make_error(ErrorCode::CorruptLog, "manifest digest mismatch",
                          static_cast<std::int64_t>(digest_line + 1));
    }
    return manifest;
}

Outcome<ReleaseManifest> curate(ReviewPipeline& pipeline,
                                const std::map<std::string, PHash64>& hashes,
                                const CurationConfig& config, std::int64_t ts) {
    std::vector<const Submission*> accepted;
    for (const Submission& sub : pipeline.submissions()) {
        if (sub.state == PipelineState::Accepted) {
            accepted.push_back(&sub);
        }
    }
    if (accepted.empty()) {
        return make_error(ErrorCode::NoAcceptedRecords, "nothing accepted to curate");
    }

    std::vector<HashedRecord> hashed;
    hashed.reserve(accepted.size());
    std::map<std::string, const Submission*> by_id;
    for (const Submission* sub : accepted) {
        const auto it = hashes.find(sub->submission_id);
        const PHash64 hash =
            it != hashes.end() ? it->second : fallback_hash(sub->record.image_ref);
        hashed.push_back(HashedRecord{sub->submission_id, hash});
        by_id[sub->submission_id] = sub;
    }
    const auto clusters = cluster_near_duplicates(hashed, config.dedup_threshold);

    std::vector<std::string> survivor_ids;
    std::map<std::string, bool> deduped_flag;
    for (const DuplicateCluster& cluster : clusters) {
        survivor_ids.push_back(cluster.survivor);
        deduped_flag[cluster.survivor] = cluster.members.size() > 1;
    }
    std::sort(survivor_ids.begin(), survivor_ids.end());

    const auto tiers = partition_access(survivor_ids, config.seed, config.public_ratio_bp);
    std::vector<SplitItem> split_items;
    split_items.reserve(survivor_ids.size());
    for (const std::string& id : survivor_ids) {
        const FoodRecord& record = by_id[id]->record;
        split_items.push_back(SplitItem{id, record.cuisine, record.source_domain});
    }
    const auto splits = stratified_split(split_items, config.seed);

    ReleaseManifest manifest;
    manifest.release_id = config.release_id;
    manifest.schema_version = config.schema_version;
    manifest.check_logic_version = config.check_logic_version;
    manifest.seed = config.seed;
    manifest.dedup_threshold = config.dedup_threshold;
    for (const std::string& id : survivor_ids) {
        ManifestEntry entry;
        entry.record_id = id;
        entry.fingerprint = record_fingerprint(by_id[id]->record);
        entry.tier = tiers.at(id);
        entry.split = splits.at(id);
        entry.deduped = deduped_flag[id];
        manifest.entries.push_back(std::move(entry));
    }
    {
        const std::string text = manifest_to_text(manifest);
        const auto parsed_back = manifest_from_text(text);
        manifest.manifest_digest = parsed_back->manifest_digest;
    }

    Ledger& ledger = pipeline.ledger();
    for (const ManifestEntry& entry : manifest.entries) {
        EventDraft adoption;
        adoption.kind = EventKind::Adoption;
        adoption.wallet = by_id[entry.record_id]->record.contributor;
        adoption.timestamp_ms = ts;
        adoption.subject = entry.record_id;
        adoption.role_credit = "provider";
        adoption.payload = {{"release", config.release_id},
                            {"split", split_token(entry.split)},
                            {"tier", access_tier_token(entry.tier)}};
        adoption.meta_fingerprint = entry.fingerprint;
        adoption.meta_dataset = config.release_id;
        if (auto appended = ledger.append(adoption); !appended.ok()) {
            return appended.error();
        }
        if (auto s = pipeline.mark_curated(entry.record_id); !s.ok()) {
            return s.error();
        }
    }
    return manifest;
}

Outcome<std::vector<CardRow>> parse_card(std::string_view text) {
    std::vector<CardRow> rows;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i].front() == '#') {
            continue;
        }
        const auto cols = columns_of(lines[i]);
        if (cols.size() != 2) {
            return make_error(ErrorCode::ParseError, "expected '<domain>\\t<prob>'",
                              static_cast<std::int64_t>(i + 1));
        }
        CardRow row;
        const auto domain = source_domain_from_token(cols[0]);
        if (!domain.has_value()) {
            return make_error(ErrorCode::ParseError,
                              "unknown domain '" + std::string(cols[0]) + "'",
                              static_cast<std::int64_t>(i + 1));
        }
        row.domain = *domain;
        auto prob = parse_scaled(cols[1], 2);
        if (!prob.ok()) {
            return make_error(ErrorCode::ParseError, prob.error().message,
                              static_cast<std::int64_t>(i + 1));
        }
        row.camera_prob_centi = prob.value();
        rows.push_back(row);
    }
    return rows;
}

DatasetStats dataset_stats(const std::vector<CardRow>& rows) {
    DatasetStats stats;
    for (const CardRow& row : rows) {
        stats.by_domain[row.domain] += 1;
        stats.by_camera_prob_centi[row.camera_prob_centi] += 1;
        stats.total += 1;
    }
    return stats;
}

DatasetStats dataset_stats(const std::vector<FoodRecord>& records) {
    DatasetStats stats;
    for (const FoodRecord& record : records) {
        stats.by_domain[record.source_domain] += 1;
        stats.by_camera_prob_centi[record.authenticity.camera_or_phone_prob_centi] += 1;
        stats.total += 1;
    }
    return stats;
}

std::string stats_to_text(const DatasetStats& stats) {
    std::string out;
    constexpr SourceDomain display_order[] = {
        SourceDomain::HomemadeStreet, SourceDomain::ChainRestaurant,
        SourceDomain::RawProduce,     SourceDomain::Packaged,
        SourceDomain::Other,
    };
    for (SourceDomain domain : display_order) {
        const auto it = stats.by_domain.find(domain);
        const std::uint64_t count = it == stats.by_domain.end() ? 0 : it->second;
        out += "source\t";
        out += source_domain_token(domain);
        out.push_back('\t');
        out += std::to_string(count);
        out.push_back('\n');
    }
    for (auto it = stats.by_camera_prob_centi.rbegin();
         it != stats.by_camera_prob_centi.rend(); ++it) {
        out += "prob\t" + format_fixed(it->first, 2) + "\t" + std::to_string(it->second) + "\n";
    }
    out += "total\t" + std::to_string(stats.total) + "\n";
    return out;
}

}  // namespace foodprov
