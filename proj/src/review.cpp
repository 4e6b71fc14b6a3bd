#include "foodprov/review.hpp"

#include <algorithm>

#include "foodprov/decimal.hpp"
#include "foodprov/record_io.hpp"
#include "foodprov/rng.hpp"

namespace foodprov {

namespace {

std::string upper_token(std::string_view token) {
    std::string out(token);
    for (char& c : out) {
        if (c >= 'a' && c <= 'z') {
            c = static_cast<char>(c - 'a' + 'A');
        }
    }
    return out;
}

std::int64_t signal_value(const FoodRecord& record, ReviewRule::Signal signal) {
    switch (signal) {
        case ReviewRule::Signal::CameraOrPhoneProb:
            return record.authenticity.camera_or_phone_prob_centi;
        case ReviewRule::Signal::OnlineDownloadProb:
            return record.authenticity.online_download_prob_centi;
        case ReviewRule::Signal::FoodProb:
            return record.authenticity.food_prob_centi;
    }
    return 0;
}

std::string join_codes(const std::vector<std::string>& codes) {
    std::string out;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += codes[i];
    }
    return out;
}

}  // namespace

const char* pipeline_state_name(PipelineState s) {
    switch (s) {
        case PipelineState::Submitted: return "submitted";
        case PipelineState::InitialRejected: return "initial_rejected";
        case PipelineState::InitialPassed: return "initial_passed";
        case PipelineState::FinalRejected: return "final_rejected";
        case PipelineState::Accepted: return "accepted";
        case PipelineState::Curated: return "curated";
    }
    return "?";
}

const char* review_stage_token(ReviewStage s) {
    return s == ReviewStage::Initial ? "initial" : "final";
}

const char* rule_signal_token(ReviewRule::Signal s) {
    switch (s) {
        case ReviewRule::Signal::CameraOrPhoneProb: return "camera_or_phone_prob";
        case ReviewRule::Signal::OnlineDownloadProb: return "online_download_prob";
        case ReviewRule::Signal::FoodProb: return "food_prob";
    }
    return "?";
}

std::optional<ReviewRule::Signal> rule_signal_from_token(std::string_view token) {
    if (token == "camera_or_phone_prob") return ReviewRule::Signal::CameraOrPhoneProb;
    if (token == "online_download_prob") return ReviewRule::Signal::OnlineDownloadProb;
    if (token == "food_prob") return ReviewRule::Signal::FoodProb;
    return std::nullopt;
}

ReviewerPolicy default_initial_policy() {
    ReviewerPolicy policy;
    policy.stage = ReviewStage::Initial;
    policy.rules.push_back({ReviewRule::Kind::SchemaValid, {}, 0, 0});
    policy.rules.push_back(
        {ReviewRule::Kind::MinProbability, ReviewRule::Signal::CameraOrPhoneProb, 60, 0});
    policy.rules.push_back(
        {ReviewRule::Kind::MaxProbability, ReviewRule::Signal::OnlineDownloadProb, 40, 0});
    policy.rules.push_back({ReviewRule::Kind::StochasticPass, {}, 0, 9500});
    return policy;
}

ReviewerPolicy default_final_policy() {
    ReviewerPolicy policy;
    policy.stage = ReviewStage::Final;
    policy.rules = default_initial_policy().rules;
    policy.rules.push_back(
        {ReviewRule::Kind::MinProbability, ReviewRule::Signal::FoodProb, 50, 0});
    policy.rules.push_back({ReviewRule::Kind::StochasticPass, {}, 0, 9000});
    return policy;
}

std::string rule_token(const ReviewRule& rule) {
    switch (rule.kind) {
        case ReviewRule::Kind::SchemaValid:
            return "schema";
        case ReviewRule::Kind::MinProbability:
            return std::string("min:") + rule_signal_token(rule.signal) + ":" +
                   format_fixed(rule.threshold_centi, 2);
        case ReviewRule::Kind::MaxProbability:
            return std::string("max:") + rule_signal_token(rule.signal) + ":" +
                   format_fixed(rule.threshold_centi, 2);
        case ReviewRule::Kind::StochasticPass:
            return "stochastic:" + format_fixed(static_cast<std::int64_t>(rule.pass_rate_bp), 4);
    }
    return "?";
}

Status check_final_covers_initial(const ReviewerPolicy& initial,
                                  const ReviewerPolicy& final_stage) {
    for (const ReviewRule& rule : initial.rules) {
        const bool covered =
            std::any_of(final_stage.rules.begin(), final_stage.rules.end(),
                        [&rule](const ReviewRule& r) { return r == rule; });
        if (!covered) {
            return make_error(ErrorCode::PolicyNotMonotone,
                              "final stage drops initial rule " + rule_token(rule));
        }
    }
    return Status::success();
}

ReviewPipeline::ReviewPipeline(Ledger& ledger, ReviewerPolicy initial,
                               ReviewerPolicy final_stage, PipelineConfig config)
    : ledger_(&ledger),
      initial_(std::move(initial)),
      final_(std::move(final_stage)),
      config_(std::move(config)) {
    if (config_.initial_reviewer == WalletAddress{}) {
        config_.initial_reviewer = wallet_from_label("reviewer:initial");
    }
    if (config_.final_reviewer == WalletAddress{}) {
        config_.final_reviewer = wallet_from_label("reviewer:final");
    }
    if (config_.max_attempts < 1) {
        config_.max_attempts = 1;
    }
}

Outcome<ReviewPipeline> ReviewPipeline::create(Ledger& ledger, ReviewerPolicy initial,
                                               ReviewerPolicy final_stage,
                                               PipelineConfig config) {
    if (initial.stage != ReviewStage::Initial || final_stage.stage != ReviewStage::Final) {
        return make_error(ErrorCode::UsageError, "policies must be (initial, final)");
    }
    if (auto s = check_final_covers_initial(initial, final_stage); !s.ok()) {
        return s.error();
    }
    return ReviewPipeline(ledger, std::move(initial), std::move(final_stage),
                          std::move(config));
}

Outcome<std::string> ReviewPipeline::submit(const FoodRecord& record, std::int64_t ts) {
    if (index_.contains(record.record_id)) {
        return make_error(ErrorCode::DuplicateSubmission, record.record_id);
    }

    EventDraft sourcing;
    sourcing.kind = EventKind::Sourcing;
    sourcing.wallet = record.contributor;
    sourcing.timestamp_ms = ts;
    sourcing.subject = record.record_id;
    sourcing.role_credit = "provider";
    sourcing.payload = {{"domain", source_domain_token(record.source_domain)},
                        {"image", record.image_ref}};
    if (auto appended = ledger_->append(sourcing); !appended.ok()) {
        return appended.error();
    }

    EventDraft annotation;
    annotation.kind = EventKind::Annotation;
    annotation.wallet = record.contributor;
    annotation.timestamp_ms = ts;
    annotation.subject = record.record_id;
    annotation.role_credit = "provider";
    annotation.payload = record_payload_fields(record);
    annotation.payload.emplace_back("attempt", "1");
    annotation.meta_fingerprint = record_fingerprint(record);
    if (auto appended = ledger_->append(annotation); !appended.ok()) {
        return appended.error();
    }

    Submission sub;
    sub.submission_id = record.record_id;
    sub.record = record;
    index_.emplace(sub.submission_id, submissions_.size());
    submissions_.push_back(std::move(sub));
    return submissions_.back().submission_id;
}

ReviewPipeline::Verdict ReviewPipeline::evaluate(const ReviewerPolicy& policy,
                                                 const Submission& sub) const {
    Verdict verdict;
    verdict.pass = true;
    for (const ReviewRule& rule : policy.rules) {
        switch (rule.kind) {
            case ReviewRule::Kind::SchemaValid: {
                const ValidationReport report =
                    validate_record(sub.record, config_.domain_policy);
                if (!report.valid()) {
                    verdict.pass = false;
                    for (const std::string& code : report.codes()) {
                        verdict.codes.push_back(code);
                    }
                }
                break;
            }
            case ReviewRule::Kind::MinProbability:
                if (signal_value(sub.record, rule.signal) < rule.threshold_centi) {
                    verdict.pass = false;
                    verdict.codes.push_back(upper_token(rule_signal_token(rule.signal)) +
                                            "_BELOW_MIN");
                }
                break;
            case ReviewRule::Kind::MaxProbability:
                if (signal_value(sub.record, rule.signal) > rule.threshold_centi) {
                    verdict.pass = false;
                    verdict.codes.push_back(upper_token(rule_signal_token(rule.signal)) +
                                            "_ABOVE_MAX");
                }
                break;
            case ReviewRule::Kind::StochasticPass: {
                // Keyed by attempt and rule identity only: a resubmission
                // redraws, the final-stage copy of an initial rule does not.
                std::string key = sub.submission_id;
                key.push_back(kFieldSep);
                key += std::to_string(sub.attempt);
                key.push_back(kFieldSep);
                key += rule_token(rule);
                if (!keyed_pass("review:pass", config_.seed, key, rule.pass_rate_bp)) {
                    verdict.pass = false;
                    verdict.codes.push_back("STOCHASTIC_FAIL");
                }
                break;
            }
        }
    }
    std::sort(verdict.codes.begin(), verdict.codes.end());
    verdict.codes.erase(std::unique(verdict.codes.begin(), verdict.codes.end()),
                        verdict.codes.end());
    return verdict;
}

std::int64_t ReviewPipeline::synth_review_ms(const Submission& sub, ReviewStage stage) const {
    std::string key = sub.submission_id;
    key.push_back(kFieldSep);
    key += std::to_string(sub.attempt);
    key.push_back(kFieldSep);
    key += review_stage_token(stage);
    return static_cast<std::int64_t>(keyed_u64("review:ms", config_.seed, key) % 4501) + 500;
}

Status ReviewPipeline::step(std::string_view submission_id, std::int64_t ts) {
    const auto it = index_.find(std::string(submission_id));
    if (it == index_.end()) {
        return make_error(ErrorCode::InvalidState,
                          "unknown submission " + std::string(submission_id));
    }
    Submission& sub = submissions_[it->second];

    ReviewStage stage;
    const ReviewerPolicy* policy;
    WalletAddress reviewer;
    if (sub.state == PipelineState::Submitted) {
        stage = ReviewStage::Initial;
        policy = &initial_;
        reviewer = config_.initial_reviewer;
    } else if (sub.state == PipelineState::InitialPassed) {
        stage = ReviewStage::Final;
        policy = &final_;
        reviewer = config_.final_reviewer;
    } else {
        return make_error(ErrorCode::InvalidState,
                          std::string("cannot review from state ") +
                              pipeline_state_name(sub.state));
    }

    const Verdict verdict = evaluate(*policy, sub);

    EventDraft review;
    review.kind = EventKind::Verification;
    review.wallet = reviewer;
    review.timestamp_ms = ts;
    review.subject = sub.submission_id;
    review.role_credit =
        stage == ReviewStage::Initial ? "initial_reviewer" : "final_reviewer";
    review.payload = {{"review_ms", std::to_string(synth_review_ms(sub, stage))},
                      {"stage", review_stage_token(stage)},
                      {"verdict", verdict.pass ? "pass" : "fail"}};
    if (!verdict.codes.empty()) {
        review.payload.emplace_back("feedback", join_codes(verdict.codes));
    }
    if (auto appended = ledger_->append(review); !appended.ok()) {
        return appended.error();
    }

    if (stage == ReviewStage::Initial) {
        sub.state = verdict.pass ? PipelineState::InitialPassed : PipelineState::InitialRejected;
    } else {
        sub.state = verdict.pass ? PipelineState::Accepted : PipelineState::FinalRejected;
    }
    sub.feedback = verdict.pass ? std::vector<std::string>{} : verdict.codes;
    return Status::success();
}

Status ReviewPipeline::resubmit(std::string_view submission_id, const FoodRecord& revised,
                                std::int64_t ts) {
    const auto it = index_.find(std::string(submission_id));
    if (it == index_.end()) {
        return make_error(ErrorCode::InvalidState,
                          "unknown submission " + std::string(submission_id));
    }
    Submission& sub = submissions_[it->second];
    const bool resubmittable =
        sub.state == PipelineState::InitialRejected ||
        (sub.state == PipelineState::FinalRejected && config_.allow_final_resubmit);
    if (!resubmittable) {
        return make_error(ErrorCode::InvalidState,
                          std::string("cannot resubmit from state ") +
                              pipeline_state_name(sub.state));
    }
    if (sub.attempt >= config_.max_attempts) {
        return make_error(ErrorCode::InvalidState,
                          "attempt limit reached for " + sub.submission_id);
    }
    if (revised.record_id != sub.submission_id) {
        return make_error(ErrorCode::InvalidState,
                          "revised record id " + revised.record_id + " does not match " +
                              sub.submission_id);
    }

    EventDraft annotation;
    annotation.kind = EventKind::Annotation;
    annotation.wallet = revised.contributor;
    annotation.timestamp_ms = ts;
    annotation.subject = sub.submission_id;
    annotation.role_credit = "provider";
    annotation.payload = record_payload_fields(revised);
    annotation.payload.emplace_back("attempt", std::to_string(sub.attempt + 1));
    annotation.meta_fingerprint = record_fingerprint(revised);
    if (auto appended = ledger_->append(annotation); !appended.ok()) {
        return appended.error();
    }

    sub.record = revised;
    sub.attempt += 1;
    sub.state = PipelineState::Submitted;
    sub.feedback.clear();
    return Status::success();
}

Status ReviewPipeline::mark_curated(std::string_view submission_id) {
    const auto it = index_.find(std::string(submission_id));
    if (it == index_.end()) {
        return make_error(ErrorCode::InvalidState,
                          "unknown submission " + std::string(submission_id));
    }
    Submission& sub = submissions_[it->second];
    if (sub.state != PipelineState::Accepted) {
        return make_error(ErrorCode::InvalidState,
                          std::string("cannot curate from state ") +
                              pipeline_state_name(sub.state));
    }
    sub.state = PipelineState::Curated;
    return Status::success();
}

const Submission* ReviewPipeline::find(std::string_view submission_id) const {
    const auto it = index_.find(std::string(submission_id));
    return it == index_.end() ? nullptr : &submissions_[it->second];
}

void ReviewPipeline::adopt_restored(std::vector<Submission> submissions) {
    submissions_ = std::move(submissions);
    index_.clear();
    for (std::size_t i = 0; i < submissions_.size(); ++i) {
        index_.emplace(submissions_[i].submission_id, i);
    }
}

Outcome<CampaignResult> run_campaign(ReviewPipeline& pipeline,
                                     const std::vector<FoodRecord>& records,
                                     std::int64_t start_ts_ms, std::int64_t ts_step_ms,
                                     const Reviser& reviser) {
    CampaignResult result;
    std::int64_t ts = start_ts_ms;
    const auto tick = [&ts, ts_step_ms] {
        const std::int64_t now = ts;
        ts += ts_step_ms;
        return now;
    };

    for (const FoodRecord& record : records) {
        auto id = pipeline.submit(record, tick());
        if (!id.ok()) {
            return id.error();
        }
        result.arrived += 1;

        while (true) {
            const Submission* sub = pipeline.find(id.value());
            if (sub->state == PipelineState::Submitted ||
                sub->state == PipelineState::InitialPassed) {
                if (auto s = pipeline.step(id.value(), tick()); !s.ok()) {
                    return s.error();
                }
                continue;
            }
            if (sub->state == PipelineState::Accepted) {
                result.accepted += 1;
                result.accepted_ids.push_back(sub->submission_id);
                break;
            }
            const bool rejected_initial = sub->state == PipelineState::InitialRejected;
            const bool rejected_final = sub->state == PipelineState::FinalRejected;
            if ((rejected_initial || rejected_final) && reviser &&
                sub->attempt < pipeline.config().max_attempts &&
                (rejected_initial || pipeline.config().allow_final_resubmit)) {
                const FoodRecord revised =
                    reviser(sub->record, sub->feedback, sub->attempt + 1);
                if (auto s = pipeline.resubmit(id.value(), revised, tick()); !s.ok()) {
                    return s.error();
                }
                result.resubmissions += 1;
                continue;
            }
            break;
        }
    }
    return result;
}

}  // namespace foodprov
