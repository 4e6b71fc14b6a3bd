#include "foodprov/ledger.hpp"

#include <algorithm>
#include <limits>

namespace foodprov {

namespace {

bool has_control_bytes(std::string_view text) {
    return std::any_of(text.begin(), text.end(),
                       [](unsigned char c) { return c < 0x20; });
}

// Base-10, no sign, no leading zeros: the only form the ledger ever writes.
Outcome<std::uint64_t> parse_u64(std::string_view text) {
    if (text.empty() || text.size() > 20 ||
        (text.size() > 1 && text.front() == '0')) {
        return make_error(ErrorCode::CorruptLog, "bad integer '" + std::string(text) + "'");
    }
    std::uint64_t value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') {
            return make_error(ErrorCode::CorruptLog, "bad integer '" + std::string(text) + "'");
        }
        const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
        if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
            return make_error(ErrorCode::CorruptLog, "integer overflow '" + std::string(text) + "'");
        }
        value = value * 10 + digit;
    }
    return value;
}

Outcome<std::int64_t> parse_timestamp(std::string_view text) {
    auto raw = parse_u64(text);
    if (!raw.ok()) return raw.error();
    if (raw.value() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        return make_error(ErrorCode::CorruptLog, "timestamp overflow");
    }
    return static_cast<std::int64_t>(raw.value());
}

std::vector<std::string_view> split_columns(std::string_view line) {
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

// Splits into lines; a single trailing newline is tolerated, interior blank
// lines are not (they would hide truncation).
Outcome<std::vector<std::string_view>> split_lines(std::string_view text) {
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
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            return make_error(ErrorCode::CorruptLog, "blank line",
                              static_cast<std::int64_t>(i + 1));
        }
    }
    return lines;
}

Error at_line(Error e, std::size_t line_number, std::string_view file) {
    e.position = static_cast<std::int64_t>(line_number);
    e.message = std::string(file) + " line " + std::to_string(line_number) + ": " + e.message;
    return e;
}

Status check_text_column(std::string_view value, std::string_view what) {
    if (value.empty()) {
        return make_error(ErrorCode::CorruptLog, std::string(what) + " empty");
    }
    if (has_control_bytes(value)) {
        return make_error(ErrorCode::CorruptLog, std::string(what) + " has control bytes");
    }
    return Status::success();
}

constexpr std::string_view kAbsent = "-";

}  // namespace

const char* event_kind_token(EventKind k) {
    switch (k) {
        case EventKind::Sourcing: return "sourcing";
        case EventKind::Annotation: return "annotation";
        case EventKind::Verification: return "verification";
        case EventKind::Adoption: return "adoption";
    }
    return "?";
}

std::optional<EventKind> event_kind_from_token(std::string_view token) {
    if (token == "sourcing") return EventKind::Sourcing;
    if (token == "annotation") return EventKind::Annotation;
    if (token == "verification") return EventKind::Verification;
    if (token == "adoption") return EventKind::Adoption;
    return std::nullopt;
}

std::string canonical_event_bytes(const ContributionEvent& event) {
    FieldMap envelope;
    envelope.emplace_back("event_id", std::to_string(event.event_id));
    envelope.emplace_back("kind", event_kind_token(event.kind));
    if (!event.meta_dataset.empty()) {
        envelope.emplace_back("meta_dataset", event.meta_dataset);
    }
    if (event.meta_fingerprint.has_value()) {
        envelope.emplace_back("meta_fp", to_hex(*event.meta_fingerprint));
    }
    envelope.emplace_back("payload_commitment", to_hex(event.payload_commitment));
    envelope.emplace_back("role", event.role_credit);
    envelope.emplace_back("subject", event.subject);
    envelope.emplace_back("ts", std::to_string(event.timestamp_ms));
    envelope.emplace_back("wallet", event.wallet.to_string());
    return canonicalize(envelope).value();
}

std::string event_to_line(const ContributionEvent& event) {
    std::string line = std::to_string(event.event_id);
    line.push_back('\t');
    line += event_kind_token(event.kind);
    line.push_back('\t');
    line += event.wallet.to_string();
    line.push_back('\t');
    line += std::to_string(event.timestamp_ms);
    line.push_back('\t');
    line += event.subject;
    line.push_back('\t');
    line += event.role_credit;
    line.push_back('\t');
    line += to_hex(event.payload_commitment);
    line.push_back('\t');
    line += event.meta_fingerprint.has_value() ? to_hex(*event.meta_fingerprint)
                                               : std::string(kAbsent);
    line.push_back('\t');
    line += event.meta_dataset.empty() ? std::string(kAbsent) : event.meta_dataset;
    line.push_back('\t');
    const std::string payload_bytes = canonicalize(event.payload).value();
    line += payload_bytes.empty() ? std::string(kAbsent) : to_hex(payload_bytes);
    return line;
}

Outcome<ContributionEvent> event_from_line(std::string_view line) {
    const auto cols = split_columns(line);
    if (cols.size() != 10) {
        return make_error(ErrorCode::CorruptLog,
                          "expected 10 columns, got " + std::to_string(cols.size()));
    }
    ContributionEvent event;
    {
        auto id = parse_u64(cols[0]);
        if (!id.ok()) return id.error();
        event.event_id = id.value();
    }
    {
        const auto kind = event_kind_from_token(cols[1]);
        if (!kind.has_value()) {
            return make_error(ErrorCode::CorruptLog, "unknown kind '" + std::string(cols[1]) + "'");
        }
        event.kind = *kind;
    }
    {
        auto wallet = WalletAddress::parse(cols[2]);
        if (!wallet.ok()) {
            return make_error(ErrorCode::CorruptLog, "bad wallet: " + wallet.error().message);
        }
        event.wallet = wallet.value();
    }
    {
        auto ts = parse_timestamp(cols[3]);
        if (!ts.ok()) return ts.error();
        event.timestamp_ms = ts.value();
    }
    if (auto s = check_text_column(cols[4], "subject"); !s.ok()) return s.error();
    event.subject = std::string(cols[4]);
    if (auto s = check_text_column(cols[5], "role"); !s.ok()) return s.error();
    event.role_credit = std::string(cols[5]);
    {
        const auto digest = digest_from_hex(cols[6]);
        if (!digest.has_value()) {
            return make_error(ErrorCode::CorruptLog, "bad payload commitment hex");
        }
        event.payload_commitment = *digest;
    }
    if (cols[7] != kAbsent) {
        const auto digest = digest_from_hex(cols[7]);
        if (!digest.has_value()) {
            return make_error(ErrorCode::CorruptLog, "bad meta fingerprint hex");
        }
        event.meta_fingerprint = *digest;
    }
    if (cols[8] != kAbsent) {
        if (auto s = check_text_column(cols[8], "meta dataset"); !s.ok()) return s.error();
        event.meta_dataset = std::string(cols[8]);
    }
    if (cols[9] != kAbsent) {
        const auto bytes = bytes_from_hex(cols[9]);
        if (!bytes.has_value()) {
            return make_error(ErrorCode::CorruptLog, "bad payload hex");
        }
        auto payload = parse_canonical(*bytes);
        if (!payload.ok()) {
            return make_error(ErrorCode::CorruptLog,
                              "bad payload bytes: " + payload.error().message);
        }
        event.payload = std::move(payload.value());
    }
    return event;
}

std::string batch_to_line(const BatchCommitment& batch) {
    std::string line = std::to_string(batch.batch_id);
    line.push_back('\t');
    line += std::to_string(batch.first_event);
    line.push_back('\t');
    line += std::to_string(batch.last_event);
    line.push_back('\t');
    line += std::to_string(batch.leaf_count);
    line.push_back('\t');
    line += to_hex(batch.root);
    return line;
}

Outcome<BatchCommitment> batch_from_line(std::string_view line) {
    const auto cols = split_columns(line);
    if (cols.size() != 5) {
        return make_error(ErrorCode::CorruptLog,
                          "expected 5 columns, got " + std::to_string(cols.size()));
    }
    BatchCommitment batch;
    std::uint64_t* numbers[4] = {&batch.batch_id, &batch.first_event, &batch.last_event,
                                 &batch.leaf_count};
    for (int i = 0; i < 4; ++i) {
        auto v = parse_u64(cols[static_cast<std::size_t>(i)]);
        if (!v.ok()) return v.error();
        *numbers[i] = v.value();
    }
    const auto digest = digest_from_hex(cols[4]);
    if (!digest.has_value()) {
        return make_error(ErrorCode::CorruptLog, "bad root hex");
    }
    batch.root = *digest;
    if (batch.last_event < batch.first_event ||
        batch.leaf_count != batch.last_event - batch.first_event + 1) {
        return make_error(ErrorCode::CorruptLog, "inconsistent batch range");
    }
    return batch;
}

std::string anchor_to_line(const AnchorCheckpoint& anchor) {
    std::string line = std::to_string(anchor.anchor_id);
    line.push_back('\t');
    line += std::to_string(anchor.first_batch);
    line.push_back('\t');
    line += std::to_string(anchor.last_batch);
    line.push_back('\t');
    line += to_hex(anchor.anchor_digest);
    line.push_back('\t');
    line += std::to_string(anchor.anchored_at);
    return line;
}

Outcome<AnchorCheckpoint> anchor_from_line(std::string_view line) {
    const auto cols = split_columns(line);
    if (cols.size() != 5) {
        return make_error(ErrorCode::CorruptLog,
                          "expected 5 columns, got " + std::to_string(cols.size()));
    }
    AnchorCheckpoint anchor;
    std::uint64_t* numbers[3] = {&anchor.anchor_id, &anchor.first_batch, &anchor.last_batch};
    for (int i = 0; i < 3; ++i) {
        auto v = parse_u64(cols[static_cast<std::size_t>(i)]);
        if (!v.ok()) return v.error();
        *numbers[i] = v.value();
    }
    const auto digest = digest_from_hex(cols[3]);
    if (!digest.has_value()) {
        return make_error(ErrorCode::CorruptLog, "bad anchor digest hex");
    }
    anchor.anchor_digest = *digest;
    auto ts = parse_timestamp(cols[4]);
    if (!ts.ok()) return ts.error();
    anchor.anchored_at = ts.value();
    if (anchor.last_batch < anchor.first_batch) {
        return make_error(ErrorCode::CorruptLog, "inconsistent anchor range");
    }
    return anchor;
}

Digest32 anchor_digest_over(const std::vector<Digest32>& roots) {
    Sha256 hasher;
    for (const Digest32& root : roots) {
        hasher.update(std::string_view{reinterpret_cast<const char*>(root.data()), root.size()});
    }
    return hasher.finish();
}

Ledger::Ledger(LedgerConfig config) : config_(config) {
    if (config_.batch_size == 0) config_.batch_size = 1;
    if (config_.anchor_every == 0) config_.anchor_every = 1;
}

std::uint64_t Ledger::committed_events() const {
    return batches_.empty() ? 0 : batches_.back().last_event + 1;
}

std::uint64_t Ledger::covered_batches() const {
    return anchors_.empty() ? 0 : anchors_.back().last_batch + 1;
}

Outcome<std::uint64_t> Ledger::append(const EventDraft& draft) {
    if (draft.subject.empty() || has_control_bytes(draft.subject)) {
        return make_error(ErrorCode::NonCanonicalValue, "bad subject");
    }
    if (draft.role_credit.empty() || has_control_bytes(draft.role_credit)) {
        return make_error(ErrorCode::NonCanonicalValue, "bad role credit");
    }
    if (draft.meta_dataset == kAbsent || has_control_bytes(draft.meta_dataset)) {
        return make_error(ErrorCode::NonCanonicalValue, "bad dataset id");
    }
    if (draft.timestamp_ms < 0) {
        return make_error(ErrorCode::NonCanonicalValue, "negative timestamp");
    }
    auto payload_bytes = canonicalize(draft.payload);
    if (!payload_bytes.ok()) {
        return payload_bytes.error();
    }

    ContributionEvent event;
    event.event_id = events_.size();
    event.kind = draft.kind;
    event.wallet = draft.wallet;
    event.timestamp_ms = draft.timestamp_ms;
    event.subject = draft.subject;
    event.role_credit = draft.role_credit;
    event.payload = parse_canonical(payload_bytes.value()).value();  // sorted copy
    event.payload_commitment = field_tree_root(event.payload);
    event.meta_fingerprint = draft.meta_fingerprint;
    event.meta_dataset = draft.meta_dataset;

    events_.push_back(event);
    if (on_append) {
        if (auto s = on_append(events_.back()); !s.ok()) {
            events_.pop_back();
            return s.error();
        }
    }

    const std::uint64_t id = event.event_id;
    if (events_.size() - committed_events() >= config_.batch_size) {
        if (auto s = seal_batch(); !s.ok()) {
            return s.error();
        }
        if (batches_.size() - covered_batches() >= config_.anchor_every) {
            auto anchored = cover_uncovered(event.timestamp_ms);
            if (!anchored.ok()) {
                return anchored.error();
            }
        }
    }
    return id;
}

Status Ledger::seal_batch() {
    const std::uint64_t first = committed_events();
    if (first >= events_.size()) {
        return Status::success();
    }
    std::vector<Digest32> leaves;
    leaves.reserve(events_.size() - first);
    for (std::uint64_t i = first; i < events_.size(); ++i) {
        leaves.push_back(hash_leaf(canonical_event_bytes(events_[i])));
    }
    BatchCommitment batch;
    batch.batch_id = batches_.size();
    batch.first_event = first;
    batch.last_event = events_.size() - 1;
    batch.leaf_count = leaves.size();
    batch.root = MerkleTree::build(std::move(leaves)).root();
    batches_.push_back(batch);
    if (on_batch) {
        if (auto s = on_batch(batches_.back()); !s.ok()) {
            batches_.pop_back();
            return s;
        }
    }
    return Status::success();
}

Status Ledger::flush() {
    return seal_batch();
}

Outcome<std::optional<AnchorCheckpoint>> Ledger::cover_uncovered(std::int64_t anchored_at) {
    const std::uint64_t first = covered_batches();
    if (first >= batches_.size()) {
        return std::optional<AnchorCheckpoint>{};
    }
    std::vector<Digest32> roots;
    for (std::uint64_t b = first; b < batches_.size(); ++b) {
        roots.push_back(batches_[b].root);
    }
    AnchorCheckpoint anchor;
    anchor.anchor_id = anchors_.size();
    anchor.first_batch = first;
    anchor.last_batch = batches_.size() - 1;
    anchor.anchor_digest = anchor_digest_over(roots);
    anchor.anchored_at = anchored_at;
    anchors_.push_back(anchor);
    if (on_anchor) {
        if (auto s = on_anchor(anchors_.back()); !s.ok()) {
            anchors_.pop_back();
            return s.error();
        }
    }
    return std::optional<AnchorCheckpoint>{anchors_.back()};
}

Outcome<std::optional<AnchorCheckpoint>> Ledger::anchor(std::int64_t anchored_at) {
    if (auto s = flush(); !s.ok()) {
        return s.error();
    }
    return cover_uncovered(anchored_at);
}

Outcome<BatchCommitment> Ledger::batch_for_event(std::uint64_t event_id) const {
    if (event_id >= events_.size()) {
        return make_error(ErrorCode::IndexOutOfRange,
                          "event " + std::to_string(event_id) + " of " +
                              std::to_string(events_.size()));
    }
    if (event_id >= committed_events()) {
        return make_error(ErrorCode::InvalidState,
                          "event " + std::to_string(event_id) + " not committed yet");
    }
    auto it = std::upper_bound(batches_.begin(), batches_.end(), event_id,
                               [](std::uint64_t id, const BatchCommitment& b) {
                                   return id < b.first_event;
                               });
    return *std::prev(it);
}

Outcome<InclusionProof> Ledger::prove_event(std::uint64_t event_id) const {
    auto batch = batch_for_event(event_id);
    if (!batch.ok()) return batch.error();
    std::vector<Digest32> leaves;
    leaves.reserve(batch->leaf_count);
    for (std::uint64_t i = batch->first_event; i <= batch->last_event; ++i) {
        leaves.push_back(hash_leaf(canonical_event_bytes(events_[i])));
    }
    const MerkleTree tree = MerkleTree::build(std::move(leaves));
    InclusionProof proof;
    proof.batch_id = batch->batch_id;
    proof.leaf_index = event_id - batch->first_event;
    auto path = tree.prove(proof.leaf_index);
    if (!path.ok()) return path.error();
    proof.path = std::move(path.value());
    return proof;
}

Outcome<FieldDisclosure> Ledger::disclose_field(std::uint64_t event_id,
                                                std::string_view field_name) const {
    if (event_id >= events_.size()) {
        return make_error(ErrorCode::IndexOutOfRange,
                          "event " + std::to_string(event_id) + " of " +
                              std::to_string(events_.size()));
    }
    const ContributionEvent& event = events_[event_id];
    const std::string* value = find_field(event.payload, field_name);
    if (value == nullptr) {
        return make_error(ErrorCode::UnknownField, std::string(field_name));
    }
    auto field_path = field_tree_prove(event.payload, field_name);
    if (!field_path.ok()) return field_path.error();
    auto event_proof = prove_event(event_id);
    if (!event_proof.ok()) return event_proof.error();

    FieldDisclosure disclosure;
    disclosure.event_id = event_id;
    disclosure.field_name = std::string(field_name);
    disclosure.field_value = *value;
    disclosure.field_path = std::move(field_path.value());
    disclosure.envelope_bytes = canonical_event_bytes(event);
    disclosure.event_proof = std::move(event_proof.value());
    return disclosure;
}

bool verify_inclusion(const Digest32& root, const InclusionProof& proof,
                      std::string_view leaf_bytes) {
    return verify_path(hash_leaf(leaf_bytes), proof.path, root);
}

bool verify_disclosure(const Digest32& batch_root, const FieldDisclosure& disclosure) {
    const Digest32 payload_root =
        fold_path(hash_field_leaf(disclosure.field_name, disclosure.field_value),
                  disclosure.field_path);
    auto envelope = parse_canonical(disclosure.envelope_bytes);
    if (!envelope.ok()) {
        return false;
    }
    const std::string* committed = find_field(envelope.value(), "payload_commitment");
    if (committed == nullptr || *committed != to_hex(payload_root)) {
        return false;
    }
    return verify_inclusion(batch_root, disclosure.event_proof, disclosure.envelope_bytes);
}

namespace {

struct ParsedFiles {
    std::vector<ContributionEvent> events;
    std::vector<BatchCommitment> batches;
    std::vector<AnchorCheckpoint> anchors;
};

// Shared structural parse for restore() and verify_ledger(): syntax, dense
// ids, contiguous batch/anchor coverage. Hash checks are the caller's call.
Outcome<ParsedFiles> parse_files(std::string_view log_text,
                                 std::string_view commitments_text,
                                 std::string_view anchors_text) {
    ParsedFiles out;
    {
        auto lines = split_lines(log_text);
        if (!lines.ok()) return at_line(lines.error(),
                                        static_cast<std::size_t>(lines.error().position), "log");
        out.events.reserve(lines->size());
        for (std::size_t i = 0; i < lines->size(); ++i) {
            auto event = event_from_line((*lines)[i]);
            if (!event.ok()) return at_line(event.error(), i + 1, "log");
            if (event->event_id != i) {
                return at_line(make_error(ErrorCode::CorruptLog,
                                          "event id " + std::to_string(event->event_id) +
                                              ", expected " + std::to_string(i)),
                               i + 1, "log");
            }
            out.events.push_back(std::move(event.value()));
        }
    }
    {
        auto lines = split_lines(commitments_text);
        if (!lines.ok()) return at_line(lines.error(),
                                        static_cast<std::size_t>(lines.error().position),
                                        "commitments");
        std::uint64_t next_event = 0;
        for (std::size_t i = 0; i < lines->size(); ++i) {
            auto batch = batch_from_line((*lines)[i]);
            if (!batch.ok()) return at_line(batch.error(), i + 1, "commitments");
            if (batch->batch_id != i || batch->first_event != next_event ||
                batch->last_event >= out.events.size()) {
                return at_line(make_error(ErrorCode::CorruptLog, "batch range out of order"),
                               i + 1, "commitments");
            }
            next_event = batch->last_event + 1;
            out.batches.push_back(std::move(batch.value()));
        }
    }
    {
        auto lines = split_lines(anchors_text);
        if (!lines.ok()) return at_line(lines.error(),
                                        static_cast<std::size_t>(lines.error().position),
                                        "anchors");
        std::uint64_t next_batch = 0;
        for (std::size_t i = 0; i < lines->size(); ++i) {
            auto anchor = anchor_from_line((*lines)[i]);
            if (!anchor.ok()) return at_line(anchor.error(), i + 1, "anchors");
            if (anchor->anchor_id != i || anchor->first_batch != next_batch ||
                anchor->last_batch >= out.batches.size()) {
                return at_line(make_error(ErrorCode::CorruptLog, "anchor range out of order"),
                               i + 1, "anchors");
            }
            next_batch = anchor->last_batch + 1;
            out.anchors.push_back(std::move(anchor.value()));
        }
    }
    return out;
}

}  // namespace

Outcome<Ledger> Ledger::restore(std::string_view log_text,
                                std::string_view commitments_text,
                                std::string_view anchors_text, LedgerConfig config) {
    auto parsed = parse_files(log_text, commitments_text, anchors_text);
    if (!parsed.ok()) return parsed.error();
    // A trustworthy reload also recomputes every digest; a restore that
    // silently accepted a doctored file would defeat the ledger's point.
    for (const ContributionEvent& event : parsed->events) {
        if (field_tree_root(event.payload) != event.payload_commitment) {
            return make_error(ErrorCode::CorruptLog,
                              "payload commitment mismatch at event " +
                                  std::to_string(event.event_id),
                              static_cast<std::int64_t>(event.event_id + 1));
        }
    }
    for (const BatchCommitment& batch : parsed->batches) {
        std::vector<Digest32> leaves;
        leaves.reserve(batch.leaf_count);
        for (std::uint64_t i = batch.first_event; i <= batch.last_event; ++i) {
            leaves.push_back(hash_leaf(canonical_event_bytes(parsed->events[i])));
        }
        if (MerkleTree::build(std::move(leaves)).root() != batch.root) {
            return make_error(ErrorCode::CorruptLog,
                              "root mismatch at batch " + std::to_string(batch.batch_id),
                              static_cast<std::int64_t>(batch.batch_id + 1));
        }
    }
    for (const AnchorCheckpoint& anchor : parsed->anchors) {
        std::vector<Digest32> roots;
        for (std::uint64_t b = anchor.first_batch; b <= anchor.last_batch; ++b) {
            roots.push_back(parsed->batches[b].root);
        }
        if (anchor_digest_over(roots) != anchor.anchor_digest) {
            return make_error(ErrorCode::CorruptLog,
                              "digest mismatch at anchor " + std::to_string(anchor.anchor_id),
                              static_cast<std::int64_t>(anchor.anchor_id + 1));
        }
    }
    Ledger ledger(config);
    ledger.events_ = std::move(parsed->events);
    ledger.batches_ = std::move(parsed->batches);
    ledger.anchors_ = std::move(parsed->anchors);
    return ledger;
}

AuditReport verify_ledger(std::string_view log_text, std::string_view commitments_text,
                          std::string_view anchors_text) {
    AuditReport report;
    auto parsed = parse_files(log_text, commitments_text, anchors_text);
    if (!parsed.ok()) {
        report.corrupt = parsed.error();
        report.message = parsed.error().to_string();
        return report;
    }
    report.total_events = parsed->events.size();
    report.committed_events =
        parsed->batches.empty() ? 0 : parsed->batches.back().last_event + 1;

    for (const ContributionEvent& event : parsed->events) {
        if (field_tree_root(event.payload) != event.payload_commitment) {
            report.bad_event = event.event_id;
            report.message =
                "payload commitment mismatch at event " + std::to_string(event.event_id);
            return report;
        }
    }
    for (const BatchCommitment& batch : parsed->batches) {
        std::vector<Digest32> leaves;
        leaves.reserve(batch.leaf_count);
        for (std::uint64_t i = batch.first_event; i <= batch.last_event; ++i) {
            leaves.push_back(hash_leaf(canonical_event_bytes(parsed->events[i])));
        }
        if (MerkleTree::build(std::move(leaves)).root() != batch.root) {
            report.bad_batch = batch.batch_id;
            report.message = "root mismatch at batch " + std::to_string(batch.batch_id);
            return report;
        }
    }
    for (const AnchorCheckpoint& anchor : parsed->anchors) {
        std::vector<Digest32> roots;
        for (std::uint64_t b = anchor.first_batch; b <= anchor.last_batch; ++b) {
            roots.push_back(parsed->batches[b].root);
        }
        if (anchor_digest_over(roots) != anchor.anchor_digest) {
            report.bad_anchor = anchor.anchor_id;
            report.message = "digest mismatch at anchor " + std::to_string(anchor.anchor_id);
            return report;
        }
    }
    report.ok = true;
    report.message = "ok: " + std::to_string(report.total_events) + " events, " +
                     std::to_string(parsed->batches.size()) + " batches, " +
                     std::to_string(parsed->anchors.size()) + " anchors, " +
                     std::to_string(report.committed_events) + " committed";
    return report;
}

std::string export_public_projection(const std::vector<ContributionEvent>& events,
                                     const std::vector<BatchCommitment>& batches,
                                     const std::vector<AnchorCheckpoint>& anchors) {
    std::string out = "#ledger-public v1\n";
    for (const ContributionEvent& event : events) {
        out += "event\t";
        out += std::to_string(event.event_id);
        out.push_back('\t');
        out += event_kind_token(event.kind);
        out.push_back('\t');
        out += event.wallet.to_string();
        out.push_back('\t');
        out += std::to_string(event.timestamp_ms);
        out.push_back('\t');
        out += event.role_credit;
        out.push_back('\t');
        out += event.meta_fingerprint.has_value() ? to_hex(*event.meta_fingerprint)
                                                  : std::string(kAbsent);
        out.push_back('\t');
        out += event.meta_dataset.empty() ? std::string(kAbsent) : event.meta_dataset;
        out.push_back('\t');
        out += to_hex(event.payload_commitment);
        out.push_back('\n');
    }
    for (const BatchCommitment& batch : batches) {
        out += "batch\t";
        out += batch_to_line(batch);
        out.push_back('\n');
    }
    for (const AnchorCheckpoint& anchor : anchors) {
        out += "anchor\t";
        out += anchor_to_line(anchor);
        out.push_back('\n');
    }
    return out;
}

}  // namespace foodprov
