#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "foodprov/errors.hpp"
#include "foodprov/hash.hpp"
#include "foodprov/ledger.hpp"
#include "foodprov/schema.hpp"

namespace foodprov {

struct ContributorRegistryEntry {
    WalletAddress wallet;
    std::vector<std::string> record_ids;                       // accepted records
    std::vector<std::pair<std::string, std::string>> role_credits;  // (record, role)
};

// Keyed by wallet for deterministic iteration.
using ContributorRegistry = std::map<WalletAddress, ContributorRegistryEntry>;

struct RevenuePool {
    std::string pool_id;
    std::int64_t amount_micro = 0;  // micro-units, fixed at creation
    std::string source;             // license / release id
};

struct WeightedWallet {
    WalletAddress wallet;
    std::int64_t weight = 0;  // quality(1e-4) x usage, summed over records
};

struct PayoutStatement {
    std::string pool_id;
    std::string source;
    std::vector<std::pair<WalletAddress, std::int64_t>> payouts;  // sorted by wallet
    std::int64_t total_paid = 0;  // always equals the pool amount
};

struct RoyaltyParams {
    // Per-role weight multipliers in basis points. Roles absent from the
    // map contribute nothing; default credits providers only.
    std::map<std::string, std::uint32_t> role_multiplier_bp = {{"provider", 10000}};
    // Quality stand-in derived from review outcomes: acceptance at attempt
    // k scores decay^(k-1), at 1e-4 resolution.
    std::uint32_t quality_decay_bp = 8000;
};

// Scans Sourcing/Annotation events for contributor wallets and role credits,
// keeping only wallets with at least one accepted record (final-stage pass
// witnessed by a Verification event).
ContributorRegistry build_registry(const Ledger& ledger);

// Adoption events per record id.
std::map<std::string, std::int64_t> adoption_usage(const Ledger& ledger);

// Quality scores (scale 1e4) for accepted records, from the attempt count
// of the accepted annotation.
std::map<std::string, std::int64_t> quality_scores_from_review(const Ledger& ledger,
                                                               std::uint32_t decay_bp);

// w(wallet) = sum over credited adopted records of quality x usage x
// role multiplier. Pure integer arithmetic. Records missing a quality
// score count as 1.0000. NO_ADOPTIONS if every weight is zero.
Outcome<std::vector<WeightedWallet>> compute_weights(
    const ContributorRegistry& registry,
    const std::map<std::string, std::int64_t>& usage,
    const std::map<std::string, std::int64_t>& quality, const RoyaltyParams& params);

// Largest-remainder split of the pool over the weights: floor of the ideal
// share each, then one leftover unit per largest fractional remainder,
// ties to the lexicographically smaller wallet. Sum of payouts equals the
// pool amount exactly.
Outcome<PayoutStatement> allocate(const RevenuePool& pool,
                                  const std::vector<WeightedWallet>& weights);

// build_registry -> compute_weights -> allocate over the ledger, then one
// journal note per payout via the sink (audit trail, not ledger events).
Outcome<PayoutStatement> settle(const RevenuePool& pool, const Ledger& ledger,
                                const RoyaltyParams& params,
                                const std::function<Status(const std::string&)>& journal_sink);

// Line-oriented statement rendering plus its attestation digest.
std::string statement_to_text(const PayoutStatement& statement);
Digest32 statement_digest(const PayoutStatement& statement);

}  // namespace foodprov
