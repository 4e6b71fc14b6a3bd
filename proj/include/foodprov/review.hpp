#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "foodprov/errors.hpp"
#include "foodprov/ledger.hpp"
#include "foodprov/schema.hpp"

namespace foodprov {

enum class PipelineState {
    Submitted,
    InitialRejected,
    InitialPassed,
    FinalRejected,
    Accepted,
    Curated,
};

const char* pipeline_state_name(PipelineState s);

enum class ReviewStage { Initial, Final };

const char* review_stage_token(ReviewStage s);

// One deterministic check. StochasticPass stands in for a model reviewer in
// synthetic studies; its draw is keyed by (seed, submission, attempt, rule),
// not by stage, so re-running the same rule at the final stage reproduces
// the initial-stage outcome. That keeps "final rules contain initial rules"
// meaningful: a record can never pass final after failing initial unrevised.
struct ReviewRule {
    enum class Kind { SchemaValid, MinProbability, MaxProbability, StochasticPass };
    enum class Signal { CameraOrPhoneProb, OnlineDownloadProb, FoodProb };

    Kind kind = Kind::SchemaValid;
    Signal signal = Signal::CameraOrPhoneProb;  // Min/Max only
    std::int64_t threshold_centi = 0;           // Min/Max only
    std::uint32_t pass_rate_bp = 10000;         // StochasticPass only

    friend bool operator==(const ReviewRule&, const ReviewRule&) = default;
};

const char* rule_signal_token(ReviewRule::Signal s);
std::optional<ReviewRule::Signal> rule_signal_from_token(std::string_view token);

// Stable text identity of a rule, used as the stochastic draw key and in
// policy files, e.g. "min:camera_or_phone_prob:0.60", "stochastic:0.7000".
std::string rule_token(const ReviewRule& rule);

struct ReviewerPolicy {
    ReviewStage stage = ReviewStage::Initial;
    std::vector<ReviewRule> rules;
};

// Stock two-stage policy: schema plus authenticity gates and a 95% spot
// check at initial; final repeats all of that and adds the food-content
// gate and a second 90% spot check.
ReviewerPolicy default_initial_policy();
ReviewerPolicy default_final_policy();

// Final review is the more thorough stage: every initial rule must appear
// in the final rule list, or POLICY_NOT_MONOTONE.
Status check_final_covers_initial(const ReviewerPolicy& initial, const ReviewerPolicy& final_stage);

struct Submission {
    std::string submission_id;  // equals record_id
    FoodRecord record;
    int attempt = 1;
    PipelineState state = PipelineState::Submitted;
    std::vector<std::string> feedback;  // codes from the latest rejection
};

struct PipelineConfig {
    DomainPolicy domain_policy = DomainPolicy::defaults();
    int max_attempts = 3;
    bool allow_final_resubmit = true;
    std::uint64_t seed = 0;
    // Zero-value wallets are replaced with label-derived defaults.
    WalletAddress initial_reviewer{};
    WalletAddress final_reviewer{};
};

// Two-stage review state machine over a shared ledger. Every submit,
// review and resubmit appends its event before the state advances.
class ReviewPipeline {
public:
    static Outcome<ReviewPipeline> create(Ledger& ledger, ReviewerPolicy initial,
                                          ReviewerPolicy final_stage, PipelineConfig config);

    // New submission in state Submitted; appends one Sourcing and one
    // Annotation event under the contributor's wallet.
    Outcome<std::string> submit(const FoodRecord& record, std::int64_t ts);

    // Submitted -> InitialPassed | InitialRejected, or
    // InitialPassed -> Accepted | FinalRejected. Appends one Verification
    // event. INVALID_STATE elsewhere.
    Status step(std::string_view submission_id, std::int64_t ts);

    // From a rejected state back to Submitted with attempt+1; appends a new
    // Annotation event. The revised record must keep the same record_id.
    Status resubmit(std::string_view submission_id, const FoodRecord& revised, std::int64_t ts);

    // Curation hook; only Accepted submissions can be marked.
    Status mark_curated(std::string_view submission_id);

    const Submission* find(std::string_view submission_id) const;
    const std::vector<Submission>& submissions() const { return submissions_; }
    const PipelineConfig& config() const { return config_; }
    Ledger& ledger() { return *ledger_; }

    // Used by workspace replay to re-seat state reconstructed from the
    // event log without appending anything.
    void adopt_restored(std::vector<Submission> submissions);

private:
    ReviewPipeline(Ledger& ledger, ReviewerPolicy initial, ReviewerPolicy final_stage,
                   PipelineConfig config);

    struct Verdict {
        bool pass = false;
        std::vector<std::string> codes;
    };
    Verdict evaluate(const ReviewerPolicy& policy, const Submission& sub) const;
    std::int64_t synth_review_ms(const Submission& sub, ReviewStage stage) const;

    Ledger* ledger_;
    ReviewerPolicy initial_;
    ReviewerPolicy final_;
    PipelineConfig config_;
    std::vector<Submission> submissions_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct CampaignResult {
    std::uint64_t arrived = 0;        // submissions entered
    std::uint64_t accepted = 0;       // reached Accepted
    std::uint64_t resubmissions = 0;  // revision round-trips
    std::vector<std::string> accepted_ids;
};

// Optional revision hook: (current record, rejection feedback, next attempt)
// -> revised record. Absent hook means rejected submissions stop where
// they are.
using Reviser =
    std::function<FoodRecord(const FoodRecord&, const std::vector<std::string>&, int)>;

// Drives every record to a terminal state (or out of attempts). Timestamps
// advance ts_step_ms per ledger event, so runs are byte-reproducible.
Outcome<CampaignResult> run_campaign(ReviewPipeline& pipeline,
                                     const std::vector<FoodRecord>& records,
                                     std::int64_t start_ts_ms, std::int64_t ts_step_ms,
                                     const Reviser& reviser = {});

}  // namespace foodprov
