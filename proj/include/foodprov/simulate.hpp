#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "foodprov/errors.hpp"
#include "foodprov/metrics.hpp"
#include "foodprov/review.hpp"
#include "foodprov/royalty.hpp"
#include "foodprov/workspace.hpp"

namespace foodprov {

struct SimulateConfig {
    std::uint64_t seed = 1;
    std::size_t submissions = 1000;
    // Zero keeps the default policy mix (schema and probability gates plus
    // high-rate stochastic reviewers). Non-zero swaps in purely stochastic
    // gates at the given rates, which is how acceptance-rate studies run.
    std::uint32_t pass_initial_bp = 0;
    std::uint32_t pass_final_bp = 0;
    int max_attempts = 3;
    LedgerConfig ledger;
    std::int64_t pool_micro = 1000000;
    std::int64_t cost_per_review_micro = 2500;
    std::string release_id = "release-0001";
    std::string pool_id = "pool-0001";
    int dedup_threshold = 10;
    std::int64_t start_ts_ms = 1700000000000;
    std::int64_t ts_step_ms = 1000;
};

struct SimulateSummary {
    CampaignResult campaign;
    std::size_t manifest_entries = 0;
    std::int64_t payout_total_micro = 0;
    FunnelCounters counters;
    std::string summary_text;  // also written to <workspace>/summary.txt
};

// Drives a full synthetic campaign through a fresh workspace: generate
// records and images, review them, curate a release, anchor the ledger,
// settle one revenue pool and report the funnel. Every byte written is a
// pure function of the config, so two runs with the same seed produce
// identical workspace trees.
Outcome<SimulateSummary> run_simulation(Workspace& workspace, const SimulateConfig& config);

}  // namespace foodprov
