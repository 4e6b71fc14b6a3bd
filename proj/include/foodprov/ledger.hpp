#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foodprov/canonical.hpp"
#include "foodprov/errors.hpp"
#include "foodprov/hash.hpp"
#include "foodprov/merkle.hpp"
#include "foodprov/schema.hpp"

namespace foodprov {

enum class EventKind { Sourcing, Annotation, Verification, Adoption };

const char* event_kind_token(EventKind k);
std::optional<EventKind> event_kind_from_token(std::string_view token);

// One ledger entry. The payload field map is confidential; everything else
// (the envelope) is disclosable. payload_commitment is the root of the
// per-field tree, so single fields can be proven without revealing the rest.
struct ContributionEvent {
    std::uint64_t event_id = 0;
    EventKind kind = EventKind::Sourcing;
    WalletAddress wallet;
    std::int64_t timestamp_ms = 0;
    std::string subject;      // record id the event is about
    std::string role_credit;  // e.g. "provider", "initial_reviewer"
    Digest32 payload_commitment{};
    std::optional<Digest32> meta_fingerprint;  // content fingerprint, if any
    std::string meta_dataset;                  // dataset/version id, empty = none
    FieldMap payload;
};

// What callers hand to append(); the ledger assigns event_id and computes
// the payload commitment.
struct EventDraft {
    EventKind kind = EventKind::Sourcing;
    WalletAddress wallet;
    std::int64_t timestamp_ms = 0;
    std::string subject;
    std::string role_credit;
    FieldMap payload;
    std::optional<Digest32> meta_fingerprint;
    std::string meta_dataset;
};

struct BatchCommitment {
    std::uint64_t batch_id = 0;
    std::uint64_t first_event = 0;
    std::uint64_t last_event = 0;  // inclusive
    std::uint64_t leaf_count = 0;
    Digest32 root{};
};

struct AnchorCheckpoint {
    std::uint64_t anchor_id = 0;
    std::uint64_t first_batch = 0;
    std::uint64_t last_batch = 0;  // inclusive
    Digest32 anchor_digest{};      // over the covered roots, in batch order
    std::int64_t anchored_at = 0;
};

struct InclusionProof {
    std::uint64_t batch_id = 0;
    std::uint64_t leaf_index = 0;
    std::vector<ProofStep> path;
};

// Carries everything a verifier needs: the envelope bytes bind the payload
// commitment into the batch tree, the field path binds one (name, value)
// into the payload commitment. No other payload value is derivable.
struct FieldDisclosure {
    std::uint64_t event_id = 0;
    std::string field_name;
    std::string field_value;
    std::vector<ProofStep> field_path;
    std::string envelope_bytes;
    InclusionProof event_proof;
};

// Envelope serialization used for batch leaves: the canonical field map of
// everything except the payload values themselves.
std::string canonical_event_bytes(const ContributionEvent& event);

// Tab-separated single-line forms for the three ledger files. No trailing
// newline. Lines parse back exactly; any malformed line is CORRUPT_LOG.
std::string event_to_line(const ContributionEvent& event);
Outcome<ContributionEvent> event_from_line(std::string_view line);
std::string batch_to_line(const BatchCommitment& batch);
Outcome<BatchCommitment> batch_from_line(std::string_view line);
std::string anchor_to_line(const AnchorCheckpoint& anchor);
Outcome<AnchorCheckpoint> anchor_from_line(std::string_view line);

Digest32 anchor_digest_over(const std::vector<Digest32>& roots);

struct LedgerConfig {
    std::uint64_t batch_size = 256;   // events per commitment
    std::uint64_t anchor_every = 4;   // batches per checkpoint
};

struct AuditReport {
    bool ok = false;
    std::optional<std::uint64_t> bad_event;   // first payload commitment mismatch
    std::optional<std::uint64_t> bad_batch;   // first root mismatch
    std::optional<std::uint64_t> bad_anchor;  // first digest mismatch
    std::optional<Error> corrupt;             // parse-level failure, position = line
    std::uint64_t committed_events = 0;       // events covered by commitments
    std::uint64_t total_events = 0;
    std::string message;                      // one-line human summary
};

class Ledger {
public:
    explicit Ledger(LedgerConfig config = {});

    // Rebuilds state from the three serialized files. Commitment ranges must
    // tile the committed prefix; anchors must cover a prefix of the batches.
    static Outcome<Ledger> restore(std::string_view log_text,
                                   std::string_view commitments_text,
                                   std::string_view anchors_text,
                                   LedgerConfig config = {});

    // Observers fire after the ledger's own state is updated; a failing
    // observer aborts the append and reports its error.
    std::function<Status(const ContributionEvent&)> on_append;
    std::function<Status(const BatchCommitment&)> on_batch;
    std::function<Status(const AnchorCheckpoint&)> on_anchor;

    // Assigns the next dense event_id. Seals a batch whenever batch_size
    // events are pending and drops an anchor every anchor_every batches.
    Outcome<std::uint64_t> append(const EventDraft& draft);

    // Seals pending events into a (possibly short) batch. No-op when none.
    Status flush();

    // flush, then checkpoint all uncovered batches. Returns the checkpoint,
    // or nullopt when there was nothing to cover.
    Outcome<std::optional<AnchorCheckpoint>> anchor(std::int64_t anchored_at);

    const std::vector<ContributionEvent>& events() const { return events_; }
    const std::vector<BatchCommitment>& batches() const { return batches_; }
    const std::vector<AnchorCheckpoint>& anchors() const { return anchors_; }
    const LedgerConfig& config() const { return config_; }

    // Number of events already covered by a sealed batch.
    std::uint64_t committed_events() const;

    Outcome<InclusionProof> prove_event(std::uint64_t event_id) const;
    Outcome<FieldDisclosure> disclose_field(std::uint64_t event_id,
                                            std::string_view field_name) const;
    Outcome<BatchCommitment> batch_for_event(std::uint64_t event_id) const;

private:
    Status seal_batch();
    Outcome<std::optional<AnchorCheckpoint>> cover_uncovered(std::int64_t anchored_at);
    std::uint64_t covered_batches() const;

    LedgerConfig config_;
    std::vector<ContributionEvent> events_;
    std::vector<BatchCommitment> batches_;
    std::vector<AnchorCheckpoint> anchors_;
};

bool verify_inclusion(const Digest32& root, const InclusionProof& proof,
                      std::string_view leaf_bytes);

bool verify_disclosure(const Digest32& batch_root, const FieldDisclosure& disclosure);

// Full audit from the serialized files: recomputes every payload commitment,
// every batch root, and every anchor digest, reporting the first divergence.
AuditReport verify_ledger(std::string_view log_text,
                          std::string_view commitments_text,
                          std::string_view anchors_text);

// The disclosable projection: envelopes without subjects or payloads, plus
// commitments and checkpoints. Payload field values never appear here.
std::string export_public_projection(const std::vector<ContributionEvent>& events,
                                     const std::vector<BatchCommitment>& batches,
                                     const std::vector<AnchorCheckpoint>& anchors);

}  // namespace foodprov
