#include "foodprov/simulate.hpp"

#include <algorithm>
#include <cstdio>
#include <utility>
#include <vector>

#include "foodprov/curation.hpp"
#include "foodprov/record_io.hpp"
#include "foodprov/rng.hpp"

namespace foodprov {

namespace {

const char* const kAdjectives[] = {"braised", "steamed", "stir-fried", "roasted",
                                   "grilled",  "stewed",  "smoked",     "pickled"};
const char* const kMains[] = {"tofu",      "noodles",   "dumplings", "fried rice", "chicken",
                              "eggplant",  "pork belly", "mushrooms", "carp",       "greens"};
const char* const kCuisines[] = {"sichuan", "cantonese", "hunan",    "shandong",
                                 "dongbei", "fujian",    "xinjiang", "yunnan"};
const char* const kMethods[] = {"braise", "steam", "stir-fry", "roast", "grill", "stew"};
const char* const kIngredients[] = {"tofu",     "scallion", "garlic",  "ginger",
                                    "soy sauce", "chili oil", "rice",    "egg",
                                    "pork",     "chicken",  "mushroom", "bok choy",
                                    "carrot",   "onion",    "peanut",   "sesame oil"};

template <std::size_t N>
const char* pick(DetRng& rng, const char* const (&pool)[N]) {
    return pool[rng.below(N)];
}

std::string record_id_for(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "r-%06zu", index + 1);
    return buf;
}

LuminanceGrid random_grid(DetRng& rng, std::size_t w, std::size_t h) {
    LuminanceGrid grid;
    grid.width = w;
    grid.height = h;
    grid.pixels.resize(w * h);
    for (std::uint8_t& p : grid.pixels) {
        p = static_cast<std::uint8_t>(rng.below(256));
    }
    return grid;
}

std::string grid_bytes(const LuminanceGrid& grid) {
    std::string bytes;
    bytes.reserve(grid.pixels.size() + 8);
    bytes += std::to_string(grid.width);
    bytes += 'x';
    bytes += std::to_string(grid.height);
    bytes += ':';
    bytes.append(reinterpret_cast<const char*>(grid.pixels.data()), grid.pixels.size());
    return bytes;
}

EvidenceRef accepted_evidence_for(SourceDomain domain, const std::string& record_id,
                                  DetRng* rng) {
    EvidenceRef ev;
    switch (domain) {
        case SourceDomain::Packaged:
            ev.kind = EvidenceKind::LabelPhoto;
            ev.blob_fingerprint = to_hex(sha256("label:" + record_id));
            break;
        case SourceDomain::ChainRestaurant:
            if (rng != nullptr && rng->below(2) == 0) {
                ev.kind = EvidenceKind::Url;
                ev.uri = "https://menu.example/item/" + record_id;
            } else {
                ev.kind = EvidenceKind::MenuScreenshot;
                ev.blob_fingerprint = to_hex(sha256("menu:" + record_id));
            }
            break;
        default:
            ev.kind = rng != nullptr && rng->below(5) == 0 ? EvidenceKind::Receipt
                                                          : EvidenceKind::Note;
            ev.blob_fingerprint = to_hex(sha256("note:" + record_id));
            break;
    }
    return ev;
}

NutritionalProfile synth_nutrition(DetRng& rng) {
    NutritionalProfile n;
    n.kcal = 80 + static_cast<std::int64_t>(rng.below(1420));
    n.protein_centi = static_cast<std::int64_t>(rng.below(8000));
    n.fat_centi = static_cast<std::int64_t>(rng.below(6000));
    n.carbs_centi = static_cast<std::int64_t>(rng.below(12000));
    return n;
}

void fill_for_level(FoodRecord& record, DetRng& rng) {
    const int level = record.level.value;
    if (level >= 2) record.nutrition = synth_nutrition(rng);
    if (level >= 3) {
        const std::size_t want = 3 + rng.below(4);
        std::vector<const char*> bag(std::begin(kIngredients), std::end(kIngredients));
        for (std::size_t k = 0; k < want && !bag.empty(); ++k) {
            const std::size_t at = rng.below(bag.size());
            record.ingredients.emplace_back(bag[at]);
            bag.erase(bag.begin() + static_cast<std::ptrdiff_t>(at));
        }
    }
    if (level >= 4) {
        const std::size_t portions = std::min<std::size_t>(2, record.ingredients.size());
        for (std::size_t k = 0; k < portions; ++k) {
            PortionEntry p;
            p.item = record.ingredients[k];
            p.amount_centi = 500 + static_cast<std::int64_t>(rng.below(49500));
            p.unit = rng.below(4) == 0 ? "ml" : "g";
            record.portion_size.push_back(std::move(p));
        }
    }
    if (level >= 5) {
        const std::size_t boxes = 1 + rng.below(2);
        for (std::size_t k = 0; k < boxes; ++k) {
            Localization loc;
            loc.item = record.dish_name;
            loc.box.x0 = static_cast<std::int64_t>(rng.below(7001));
            loc.box.y0 = static_cast<std::int64_t>(rng.below(7001));
            loc.box.x1 = loc.box.x0 + 500 +
                         static_cast<std::int64_t>(rng.below(10000 - loc.box.x0 - 500 + 1));
            loc.box.y1 = loc.box.y0 + 500 +
                         static_cast<std::int64_t>(rng.below(10000 - loc.box.y0 - 500 + 1));
            record.localizations.push_back(std::move(loc));
        }
    }
}

// Injected defect classes; each produces feedback the reviser can repair.
enum class Defect { None, LevelBelowMinimum, MissingNutrition, LowCameraProb, BrokenDetail };

FoodRecord generate_record(DetRng& rng, std::size_t index, const std::string& image_ref,
                           const std::vector<WalletAddress>& wallets,
                           const DomainPolicy& policy, bool allow_defects) {
    static const std::uint64_t kDomainWeights[] = {46, 36, 9, 8, 1};
    static const SourceDomain kDomains[] = {SourceDomain::HomemadeStreet,
                                            SourceDomain::ChainRestaurant,
                                            SourceDomain::RawProduce, SourceDomain::Packaged,
                                            SourceDomain::Other};

    FoodRecord record;
    record.record_id = record_id_for(index);
    record.image_ref = image_ref;
    record.source_domain = kDomains[rng.weighted(kDomainWeights, 5)];
    record.contributor = wallets[rng.below(wallets.size())];
    record.dish_name = std::string(pick(rng, kAdjectives)) + " " + pick(rng, kMains);
    record.cuisine = rng.below(10) == 0 ? "" : pick(rng, kCuisines);
    if (rng.below(10) < 8) record.cooking_method = pick(rng, kMethods);

    const int min_level = policy.rule_for(record.source_domain).min_level.value;
    record.level = AnnotationLevel{
        std::min(5, min_level + static_cast<int>(rng.below(5 - min_level + 1)))};

    record.authenticity.camera_or_phone_prob_centi = 60 + static_cast<std::int64_t>(rng.below(40));
    record.authenticity.online_download_prob_centi = static_cast<std::int64_t>(rng.below(35));
    record.authenticity.food_prob_centi = 50 + static_cast<std::int64_t>(rng.below(50));

    Defect defect = Defect::None;
    if (allow_defects && rng.below(100) < 12) {
        defect = static_cast<Defect>(1 + rng.below(4));
    }

    if (defect == Defect::LevelBelowMinimum && min_level > 1) {
        record.level = AnnotationLevel{min_level - 1};
    }
    fill_for_level(record, rng);
    switch (defect) {
        case Defect::MissingNutrition:
            record.nutrition.reset();
            break;
        case Defect::LowCameraProb:
            record.authenticity.camera_or_phone_prob_centi =
                20 + static_cast<std::int64_t>(rng.below(35));
            break;
        case Defect::BrokenDetail:
            if (!record.localizations.empty()) {
                std::swap(record.localizations[0].box.x0, record.localizations[0].box.x1);
            } else if (record.source_domain == SourceDomain::Packaged ||
                       record.source_domain == SourceDomain::ChainRestaurant) {
                // evidence left empty; MISSING_EVIDENCE on review
                return record;
            } else if (record.nutrition.has_value()) {
                record.nutrition->kcal = -record.nutrition->kcal;
            }
            break;
        default:
            break;
    }
    record.evidence.push_back(accepted_evidence_for(record.source_domain, record.record_id, &rng));
    return record;
}

// Deterministic repair: raise the level to the domain minimum, re-align
// every level-gated group in both directions, clamp probabilities clear of
// the review gates and guarantee one accepted evidence item.
FoodRecord repair_record(const FoodRecord& original, const DomainPolicy& policy) {
    FoodRecord record = original;
    const DomainRule& rule = policy.rule_for(record.source_domain);
    record.level = std::max(record.level, rule.min_level);
    const int level = record.level.value;

    if (level >= 2) {
        if (!record.nutrition.has_value()) {
            record.nutrition = NutritionalProfile{450, 1200, 900, 5000};
        }
        NutritionalProfile& n = *record.nutrition;
        n.kcal = std::abs(n.kcal);
        n.protein_centi = std::max<std::int64_t>(0, n.protein_centi);
        n.fat_centi = std::max<std::int64_t>(0, n.fat_centi);
        n.carbs_centi = std::max<std::int64_t>(0, n.carbs_centi);
    }
    if (level >= 3 && record.ingredients.empty()) {
        record.ingredients = {"garlic", "scallion", "soy sauce"};
    }
    if (level < 3) record.ingredients.clear();
    if (level >= 4 && record.portion_size.empty()) {
        record.portion_size.push_back({record.ingredients.front(), 15000, "g"});
    }
    if (level < 4) record.portion_size.clear();
    for (PortionEntry& p : record.portion_size) {
        if (p.amount_centi <= 0) p.amount_centi = 1000;
    }
    if (level >= 5 && record.localizations.empty()) {
        record.localizations.push_back({record.dish_name, BoundingBox{0, 0, 10000, 10000}});
    }
    if (level < 5) record.localizations.clear();
    for (Localization& loc : record.localizations) {
        BoundingBox& b = loc.box;
        if (b.x0 > b.x1) std::swap(b.x0, b.x1);
        if (b.y0 > b.y1) std::swap(b.y0, b.y1);
        b.x0 = std::clamp<std::int64_t>(b.x0, 0, 10000);
        b.y0 = std::clamp<std::int64_t>(b.y0, 0, 10000);
        b.x1 = std::clamp<std::int64_t>(b.x1, 0, 10000);
        b.y1 = std::clamp<std::int64_t>(b.y1, 0, 10000);
    }

    AuthenticitySignals& a = record.authenticity;
    a.camera_or_phone_prob_centi = std::clamp<std::int64_t>(a.camera_or_phone_prob_centi, 60, 100);
    a.online_download_prob_centi = std::clamp<std::int64_t>(a.online_download_prob_centi, 0, 40);
    a.food_prob_centi = std::clamp<std::int64_t>(a.food_prob_centi, 50, 100);

    const bool has_accepted = std::any_of(
        record.evidence.begin(), record.evidence.end(), [&rule](const EvidenceRef& e) {
            return rule.accepted_evidence.empty() ||
                   std::find(rule.accepted_evidence.begin(), rule.accepted_evidence.end(),
                             e.kind) != rule.accepted_evidence.end();
        });
    if (!rule.evidence_optional && !has_accepted) {
        record.evidence.push_back(
            accepted_evidence_for(record.source_domain, record.record_id, nullptr));
    }
    return record;
}

ReviewerPolicy stochastic_policy(ReviewStage stage, std::vector<std::uint32_t> rates) {
    ReviewerPolicy policy;
    policy.stage = stage;
    for (std::uint32_t bp : rates) {
        ReviewRule rule;
        rule.kind = ReviewRule::Kind::StochasticPass;
        rule.pass_rate_bp = bp;
        policy.rules.push_back(rule);
    }
    return policy;
}

}  // namespace

Outcome<SimulateSummary> run_simulation(Workspace& workspace, const SimulateConfig& config) {
    if (!workspace.ledger().events().empty()) {
        return make_error(ErrorCode::InvalidState,
                          "simulation needs an empty workspace, found " +
                              std::to_string(workspace.ledger().events().size()) + " events");
    }
    if (config.submissions == 0) {
        return make_error(ErrorCode::UsageError, "submissions must be positive");
    }

    const DomainPolicy domain_policy = DomainPolicy::defaults();
    const bool stochastic_only = config.pass_initial_bp > 0;

    DetRng rng("simulate", config.seed);

    std::vector<WalletAddress> wallets;
    wallets.reserve(16);
    for (int i = 0; i < 16; ++i) {
        wallets.push_back(wallet_from_label("contributor:" + std::to_string(config.seed) + ":" +
                                            std::to_string(i)));
    }

    std::vector<FoodRecord> records;
    std::vector<LuminanceGrid> grids;
    records.reserve(config.submissions);
    grids.reserve(config.submissions);
    for (std::size_t i = 0; i < config.submissions; ++i) {
        LuminanceGrid grid;
        if (i > 0 && rng.below(100) < 3) {
            // near-duplicate: an earlier image with a handful of pixels nudged
            grid = grids[rng.below(i)];
            for (int k = 0; k < 5; ++k) {
                grid.pixels[rng.below(grid.pixels.size())] ^= 1;
            }
        } else {
            grid = random_grid(rng, 36, 32);
        }
        const std::string image_ref = to_hex(sha256(grid_bytes(grid)));
        records.push_back(generate_record(rng, i, image_ref, wallets, domain_policy,
                                          !stochastic_only));
        grids.push_back(std::move(grid));
    }

    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::string line = serialize_record(records[i]);
        auto blob = workspace.put_blob(line);
        if (!blob.ok()) return blob.error();
        if (Status s = workspace.index_record(records[i].record_id, blob.value()); !s.ok()) {
            return s.error();
        }
        auto tiles = downsample(grids[i]);
        if (!tiles.ok()) return tiles.error();
        auto hash = dhash64(tiles.value());
        if (!hash.ok()) return hash.error();
        if (Status s = workspace.store_hash(records[i].record_id, hash.value()); !s.ok()) {
            return s.error();
        }
    }

    ReviewerPolicy initial;
    ReviewerPolicy final_stage;
    if (stochastic_only) {
        initial = stochastic_policy(ReviewStage::Initial, {config.pass_initial_bp});
        final_stage = stochastic_policy(ReviewStage::Final,
                                        {config.pass_initial_bp, config.pass_final_bp});
    } else {
        initial = default_initial_policy();
        final_stage = default_final_policy();
    }

    PipelineConfig pipeline_config;
    pipeline_config.domain_policy = domain_policy;
    pipeline_config.max_attempts = config.max_attempts;
    pipeline_config.seed = config.seed;
    auto pipeline = ReviewPipeline::create(workspace.ledger(), initial, final_stage,
                                           pipeline_config);
    if (!pipeline.ok()) return pipeline.error();

    std::optional<Error> reviser_error;
    Reviser reviser = [&](const FoodRecord& current, const std::vector<std::string>&,
                          int) -> FoodRecord {
        FoodRecord revised = stochastic_only ? current : repair_record(current, domain_policy);
        auto blob = workspace.put_blob(serialize_record(revised));
        if (!blob.ok()) {
            if (!reviser_error.has_value()) reviser_error = blob.error();
            return revised;
        }
        if (Status s = workspace.index_record(revised.record_id, blob.value());
            !s.ok() && !reviser_error.has_value()) {
            reviser_error = s.error();
        }
        return revised;
    };

    auto campaign = run_campaign(pipeline.value(), records, config.start_ts_ms,
                                 config.ts_step_ms, config.max_attempts > 1 ? reviser : Reviser{});
    if (!campaign.ok()) return campaign.error();
    if (reviser_error.has_value()) return *reviser_error;

    const auto next_ts = [&]() {
        const auto& events = workspace.ledger().events();
        return events.empty() ? config.start_ts_ms
                              : events.back().timestamp_ms + config.ts_step_ms;
    };

    SimulateSummary summary;
    summary.campaign = campaign.value();

    std::string manifest_text;
    if (summary.campaign.accepted > 0) {
        CurationConfig curation;
        curation.release_id = config.release_id;
        curation.seed = config.seed;
        curation.dedup_threshold = config.dedup_threshold;
        auto manifest = curate(pipeline.value(), workspace.hashes(), curation, next_ts());
        if (!manifest.ok()) return manifest.error();
        summary.manifest_entries = manifest.value().entries.size();
        manifest_text = manifest_to_text(manifest.value());
        if (Status s = workspace.write_manifest(config.release_id, manifest_text); !s.ok()) {
            return s.error();
        }
    }

    auto anchored = workspace.ledger().anchor(next_ts());
    if (!anchored.ok()) return anchored.error();

    if (summary.manifest_entries > 0) {
        RevenuePool pool;
        pool.pool_id = config.pool_id;
        pool.amount_micro = config.pool_micro;
        pool.source = "simulated revenue";
        auto statement =
            settle(pool, workspace.ledger(), RoyaltyParams{},
                   [&workspace](const std::string& line) { return workspace.append_journal(line); });
        if (!statement.ok()) return statement.error();
        summary.payout_total_micro = statement.value().total_paid;
        if (Status s = workspace.write_statement(config.pool_id,
                                                 statement_to_text(statement.value()));
            !s.ok()) {
            return s.error();
        }
    }

    summary.counters = funnel_from_ledger(workspace.ledger(), config.cost_per_review_micro);
    const FunnelReport report = funnel(summary.counters);

    std::string text = "#simulation v1\n";
    text += "seed\t" + std::to_string(config.seed) + "\n";
    text += "submissions\t" + std::to_string(summary.campaign.arrived) + "\n";
    text += "resubmissions\t" + std::to_string(summary.campaign.resubmissions) + "\n";
    text += "accepted\t" + std::to_string(summary.campaign.accepted) + "\n";
    text += "manifest_entries\t" + std::to_string(summary.manifest_entries) + "\n";
    text += "payout_total\t" + std::to_string(summary.payout_total_micro) + "\n";
    text += funnel_to_text(summary.counters, report);
    summary.summary_text = text;
    if (Status s = write_file_atomic(workspace.root() / "summary.txt", text); !s.ok()) {
        return s.error();
    }
    return summary;
}

}  // namespace foodprov
