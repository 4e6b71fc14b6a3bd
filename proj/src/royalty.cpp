#include "foodprov/royalty.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace foodprov {

namespace {

const std::string* payload_value(const ContributionEvent& event, std::string_view name) {
    return find_field(event.payload, name);
}

bool is_final_pass(const ContributionEvent& event) {
    if (event.kind != EventKind::Verification) {
        return false;
    }
    const std::string* stage = payload_value(event, "stage");
    const std::string* verdict = payload_value(event, "verdict");
    return stage != nullptr && verdict != nullptr && *stage == "final" && *verdict == "pass";
}

}  // namespace

ContributorRegistry build_registry(const Ledger& ledger) {
    std::set<std::string> accepted;
    for (const ContributionEvent& event : ledger.events()) {
        if (is_final_pass(event)) {
            accepted.insert(event.subject);
        }
    }

    ContributorRegistry registry;
    std::set<std::tuple<WalletAddress, std::string, std::string>> seen;
    for (const ContributionEvent& event : ledger.events()) {
        if (event.kind != EventKind::Sourcing && event.kind != EventKind::Annotation) {
            continue;
        }
        if (!accepted.contains(event.subject)) {
            continue;
        }
        if (!seen.insert({event.wallet, event.subject, event.role_credit}).second) {
            continue;
        }
        ContributorRegistryEntry& entry = registry[event.wallet];
        entry.wallet = event.wallet;
        entry.record_ids.push_back(event.subject);
        entry.role_credits.emplace_back(event.subject, event.role_credit);
    }
    for (auto& [wallet, entry] : registry) {
        std::sort(entry.record_ids.begin(), entry.record_ids.end());
        entry.record_ids.erase(
            std::unique(entry.record_ids.begin(), entry.record_ids.end()),
            entry.record_ids.end());
        std::sort(entry.role_credits.begin(), entry.role_credits.end());
    }
    return registry;
}

std::map<std::string, std::int64_t> adoption_usage(const Ledger& ledger) {
    std::map<std::string, std::int64_t> usage;
    for (const ContributionEvent& event : ledger.events()) {
        if (event.kind == EventKind::Adoption) {
            usage[event.subject] += 1;
        }
    }
    return usage;
}

std::map<std::string, std::int64_t> quality_scores_from_review(const Ledger& ledger,
                                                               std::uint32_t decay_bp) {
    std::map<std::string, std::int64_t> attempts;
    std::map<std::string, std::int64_t> quality;
    for (const ContributionEvent& event : ledger.events()) {
        if (event.kind == EventKind::Annotation) {
            if (const std::string* attempt = payload_value(event, "attempt")) {
                std::int64_t value = 0;
                for (char c : *attempt) {
                    if (c < '0' || c > '9') {
                        value = 0;
                        break;
                    }
                    value = value * 10 + (c - '0');
                }
                if (value > 0) {
                    attempts[event.subject] = value;
                }
            }
        } else if (is_final_pass(event)) {
            std::int64_t q = 10000;
            const auto it = attempts.find(event.subject);
            const std::int64_t attempt = it == attempts.end() ? 1 : it->second;
            for (std::int64_t k = 1; k < attempt; ++k) {
                q = q * decay_bp / 10000;
            }
            quality[event.subject] = q;
        }
    }
    return quality;
}

Outcome<std::vector<WeightedWallet>> compute_weights(
    const ContributorRegistry& registry,
    const std::map<std::string, std::int64_t>& usage,
    const std::map<std::string, std::int64_t>& quality, const RoyaltyParams& params) {
    std::vector<WeightedWallet> weights;
    for (const auto& [wallet, entry] : registry) {
        std::int64_t w = 0;
        for (const auto& [record_id, role] : entry.role_credits) {
            const auto mult_it = params.role_multiplier_bp.find(role);
            if (mult_it == params.role_multiplier_bp.end() || mult_it->second == 0) {
                continue;
            }
            const auto usage_it = usage.find(record_id);
            if (usage_it == usage.end() || usage_it->second <= 0) {
                continue;
            }
            const auto quality_it = quality.find(record_id);
            const std::int64_t q = quality_it == quality.end() ? 10000 : quality_it->second;
            w += q * usage_it->second * mult_it->second / 10000;
        }
        if (w > 0) {
            weights.push_back(WeightedWallet{wallet, w});
        }
    }
    if (weights.empty()) {
        return make_error(ErrorCode::NoAdoptions, "no positive contributor weights");
    }
    return weights;
}

Outcome<PayoutStatement> allocate(const RevenuePool& pool,
                                  const std::vector<WeightedWallet>& weights) {
    if (pool.amount_micro < 0) {
        return make_error(ErrorCode::UsageError, "negative pool amount");
    }
    unsigned __int128 total_weight = 0;
    for (const WeightedWallet& w : weights) {
        if (w.weight < 0) {
            return make_error(ErrorCode::UsageError, "negative weight");
        }
        total_weight += static_cast<unsigned __int128>(w.weight);
    }
    if (total_weight == 0) {
        return make_error(ErrorCode::ZeroTotalWeight, "all weights zero");
    }

    struct Share {
        WalletAddress wallet;
        std::int64_t floor_payout;
        unsigned __int128 remainder;
    };
    std::vector<Share> shares;
    shares.reserve(weights.size());
    std::int64_t assigned = 0;
    for (const WeightedWallet& w : weights) {
        const unsigned __int128 ideal =
            static_cast<unsigned __int128>(pool.amount_micro) *
            static_cast<unsigned __int128>(w.weight);
        const std::int64_t floor_payout = static_cast<std::int64_t>(ideal / total_weight);
        shares.push_back(Share{w.wallet, floor_payout, ideal % total_weight});
        assigned += floor_payout;
    }

    std::int64_t leftover = pool.amount_micro - assigned;
    std::vector<std::size_t> order(shares.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&shares](std::size_t a, std::size_t b) {
        if (shares[a].remainder != shares[b].remainder) {
            return shares[a].remainder > shares[b].remainder;
        }
        return shares[a].wallet < shares[b].wallet;
    });
    for (std::size_t i = 0; i < order.size() && leftover > 0; ++i, --leftover) {
        shares[order[i]].floor_payout += 1;
    }

    PayoutStatement statement;
    statement.pool_id = pool.pool_id;
    statement.source = pool.source;
    statement.payouts.reserve(shares.size());
    for (const Share& share : shares) {
        statement.payouts.emplace_back(share.wallet, share.floor_payout);
        statement.total_paid += share.floor_payout;
    }
    std::sort(statement.payouts.begin(), statement.payouts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return statement;
}

Outcome<PayoutStatement> settle(const RevenuePool& pool, const Ledger& ledger,
                                const RoyaltyParams& params,
                                const std::function<Status(const std::string&)>& journal_sink) {
    const ContributorRegistry registry = build_registry(ledger);
    const auto usage = adoption_usage(ledger);
    const auto quality = quality_scores_from_review(ledger, params.quality_decay_bp);
    auto weights = compute_weights(registry, usage, quality, params);
    if (!weights.ok()) {
        return weights.error();
    }
    auto statement = allocate(pool, weights.value());
    if (!statement.ok()) {
        return statement.error();
    }
    if (journal_sink) {
        for (const auto& [wallet, amount] : statement->payouts) {
            std::string line = "payout\t" + statement->pool_id + "\t" + wallet.to_string() +
                               "\t" + std::to_string(amount);
            if (auto s = journal_sink(line); !s.ok()) {
                return s.error();
            }
        }
    }
    return statement;
}

std::string statement_to_text(const PayoutStatement& statement) {
    std::string out = "#payout v1\n";
    out += "pool\t" + statement.pool_id + "\n";
    out += "source\t" + statement.source + "\n";
    out += "total\t" + std::to_string(statement.total_paid) + "\n";
    for (const auto& [wallet, amount] : statement.payouts) {
        out += "pay\t" + wallet.to_string() + "\t" + std::to_string(amount) + "\n";
    }
    return out;
}

Digest32 statement_digest(const PayoutStatement& statement) {
    return sha256(statement_to_text(statement));
}

}  // namespace foodprov
