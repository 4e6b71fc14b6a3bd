#include <doctest.h>

#include <string>
#include <vector>

#include "foodprov/hash.hpp"
#include "foodprov/ledger.hpp"
#include "foodprov/merkle.hpp"

using namespace foodprov;

namespace {

EventDraft make_draft(EventKind kind, const std::string& subject, std::int64_t ts,
                      FieldMap payload = {}) {
    EventDraft d;
    d.kind = kind;
    d.wallet = wallet_from_label("wallet:" + subject);
    d.timestamp_ms = ts;
    d.subject = subject;
    d.role_credit = "provider";
    d.payload = std::move(payload);
    return d;
}

struct SampleLedger {
    Ledger ledger;
    std::string events_text;
    std::string commitments_text;
    std::string anchors_text;
};

SampleLedger build_sample(std::size_t n_events, std::uint64_t batch_size,
                          std::uint64_t anchor_every) {
    SampleLedger out{Ledger{LedgerConfig{batch_size, anchor_every}}, {}, {}, {}};
    for (std::size_t i = 0; i < n_events; ++i) {
        FieldMap payload;
        payload.emplace_back("color", i % 2 == 0 ? "red" : "blue");
        payload.emplace_back("index", std::to_string(i));
        auto draft = make_draft(EventKind::Sourcing, "subj-" + std::to_string(i),
                                static_cast<std::int64_t>(1000 + i), payload);
        REQUIRE(out.ledger.append(draft).ok());
    }
    REQUIRE(out.ledger.flush().ok());
    REQUIRE(out.ledger.anchor(99999).ok());
    for (const auto& e : out.ledger.events()) out.events_text += event_to_line(e) + "\n";
    for (const auto& b : out.ledger.batches()) out.commitments_text += batch_to_line(b) + "\n";
    for (const auto& a : out.ledger.anchors()) out.anchors_text += anchor_to_line(a) + "\n";
    return out;
}

}  // namespace

TEST_CASE("event kind tokens round-trip") {
    const EventKind all[] = {EventKind::Sourcing, EventKind::Annotation,
                             EventKind::Verification, EventKind::Adoption};
    for (const EventKind k : all) {
        CHECK(event_kind_from_token(event_kind_token(k)) == k);
    }
    CHECK_FALSE(event_kind_from_token("minting").has_value());
}

TEST_CASE("event lines round-trip with and without optional columns") {
    ContributionEvent e;
    e.event_id = 42;
    e.kind = EventKind::Annotation;
    e.wallet = wallet_from_label("w");
    e.timestamp_ms = 1700000000123;
    e.subject = "r-000007";
    e.role_credit = "annotator";
    e.payload.emplace_back("alpha", "1");
    e.payload.emplace_back("beta", "two");
    e.payload_commitment = field_tree_root(e.payload);
    e.meta_fingerprint = sha256("blob");
    e.meta_dataset = "release-0001";

    const std::string line = event_to_line(e);
    const ContributionEvent back = event_from_line(line).value();
    CHECK(event_to_line(back) == line);
    CHECK(back.event_id == 42);
    CHECK(back.kind == EventKind::Annotation);
    CHECK(back.subject == "r-000007");
    CHECK(back.payload == e.payload);
    CHECK(back.meta_fingerprint.value() == sha256("blob"));
    CHECK(back.meta_dataset == "release-0001");

    // optional columns collapse to "-"
    ContributionEvent bare;
    bare.subject = "s";
    bare.role_credit = "r";
    bare.payload_commitment = field_tree_root(bare.payload);
    const std::string bare_line = event_to_line(bare);
    CHECK(bare_line.find("\t-\t-\t-") != std::string::npos);
    const ContributionEvent bare_back = event_from_line(bare_line).value();
    CHECK_FALSE(bare_back.meta_fingerprint.has_value());
    CHECK(bare_back.meta_dataset.empty());
    CHECK(bare_back.payload.empty());
    CHECK(event_to_line(bare_back) == bare_line);
}

TEST_CASE("malformed event lines are corrupt-log errors") {
    ContributionEvent e;
    e.subject = "s";
    e.role_credit = "r";
    const std::string good = event_to_line(e);

    auto expect_corrupt = [](const std::string& line) {
        auto r = event_from_line(line);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error().code == ErrorCode::CorruptLog);
    };
    expect_corrupt(good + "\textra");
    expect_corrupt(good.substr(0, good.rfind('\t')));
    std::string bad_kind = good;
    bad_kind.replace(bad_kind.find("sourcing"), 8, "sourcery");
    expect_corrupt(bad_kind);
    std::string bad_wallet = good;
    bad_wallet.replace(bad_wallet.find("0x"), 2, "0z");
    expect_corrupt(bad_wallet);
    expect_corrupt("");
}

TEST_CASE("batch and anchor lines round-trip and reject bad ranges") {
    BatchCommitment b;
    b.batch_id = 3;
    b.first_event = 768;
    b.last_event = 1023;
    b.leaf_count = 256;
    b.root = sha256("root");
    const std::string line = batch_to_line(b);
    const BatchCommitment back = batch_from_line(line).value();
    CHECK(batch_to_line(back) == line);

    std::string shrunk = line;
    shrunk.replace(shrunk.find("256"), 3, "255");  // leaf_count no longer matches range
    CHECK(batch_from_line(shrunk).error().code == ErrorCode::CorruptLog);
    CHECK_FALSE(batch_from_line("1\t2").ok());
    CHECK_FALSE(batch_from_line("01\t0\t0\t1\t" + to_hex(b.root)).ok());  // leading zero

    AnchorCheckpoint a;
    a.anchor_id = 1;
    a.first_batch = 4;
    a.last_batch = 7;
    a.anchor_digest = sha256("anchor");
    a.anchored_at = 1700000000999;
    const std::string aline = anchor_to_line(a);
    CHECK(anchor_to_line(anchor_from_line(aline).value()) == aline);
    std::string flipped = aline;
    flipped.replace(flipped.find("4"), 1, "9");  // first > last
    CHECK_FALSE(anchor_from_line(flipped).ok());
}

TEST_CASE("append assigns dense ids and canonicalizes the payload") {
    Ledger ledger;
    FieldMap unsorted;
    unsorted.emplace_back("zulu", "1");
    unsorted.emplace_back("alpha", "2");
    CHECK(ledger.append(make_draft(EventKind::Sourcing, "a", 1, unsorted)).value() == 0);
    CHECK(ledger.append(make_draft(EventKind::Annotation, "b", 2)).value() == 1);
    REQUIRE(ledger.events().size() == 2);
    const ContributionEvent& e = ledger.events()[0];
    CHECK(e.payload.front().first == "alpha");  // stored sorted
    CHECK(e.payload_commitment == field_tree_root(e.payload));
    CHECK(ledger.committed_events() == 0);  // nothing sealed yet
}

TEST_CASE("append rejects non-canonical drafts") {
    Ledger ledger;
    EventDraft d = make_draft(EventKind::Sourcing, "ok", 5);

    d.subject = "";
    CHECK(ledger.append(d).error().code == ErrorCode::NonCanonicalValue);
    d.subject = "has\ttab";
    CHECK_FALSE(ledger.append(d).ok());
    d.subject = "ok";
    d.role_credit = "";
    CHECK_FALSE(ledger.append(d).ok());
    d.role_credit = "provider";
    d.timestamp_ms = -1;
    CHECK_FALSE(ledger.append(d).ok());
    d.timestamp_ms = 5;
    d.meta_dataset = "-";  // collides with the absent marker
    CHECK_FALSE(ledger.append(d).ok());
    d.meta_dataset.clear();
    d.payload.emplace_back("dup", "1");
    d.payload.emplace_back("dup", "2");
    CHECK_FALSE(ledger.append(d).ok());
    CHECK(ledger.events().empty());
}

TEST_CASE("batches seal at the configured size and anchors at the cadence") {
    Ledger ledger{LedgerConfig{2, 2}};
    for (int i = 0; i < 8; ++i) {
        REQUIRE(ledger.append(make_draft(EventKind::Sourcing, "s" + std::to_string(i),
                                         100 * (i + 1)))
                    .ok());
    }
    REQUIRE(ledger.batches().size() == 4);
    CHECK(ledger.committed_events() == 8);
    CHECK(ledger.batches()[0].first_event == 0);
    CHECK(ledger.batches()[0].last_event == 1);
    CHECK(ledger.batches()[3].first_event == 6);
    REQUIRE(ledger.anchors().size() == 2);
    CHECK(ledger.anchors()[0].first_batch == 0);
    CHECK(ledger.anchors()[0].last_batch == 1);
    // auto-anchor stamps the triggering event's timestamp, *not* wall time
    CHECK(ledger.anchors()[0].anchored_at == 400);
    CHECK(ledger.anchors()[1].anchored_at == 800);

    // a ninth event stays pending until flush
    REQUIRE(ledger.append(make_draft(EventKind::Sourcing, "s8", 900)).ok());
    CHECK(ledger.committed_events() == 8);
    REQUIRE(ledger.flush().ok());
    CHECK(ledger.committed_events() == 9);
    CHECK(ledger.batches().back().leaf_count == 1);

    const auto anchored = ledger.anchor(12345).value();
    REQUIRE(anchored.has_value());
    CHECK(anchored->first_batch == 4);
    CHECK(anchored->last_batch == 4);
    CHECK(anchored->anchored_at == 12345);
    // nothing left to cover
    CHECK_FALSE(ledger.anchor(12346).value().has_value());
}

TEST_CASE("anchor digests hash the covered roots in order") {
    const SampleLedger s = build_sample(6, 2, 100);
    REQUIRE(s.ledger.anchors().size() == 1);
    std::vector<Digest32> roots;
    for (const auto& b : s.ledger.batches()) roots.push_back(b.root);
    CHECK(s.ledger.anchors()[0].anchor_digest == anchor_digest_over(roots));
}

TEST_CASE("restore rebuilds the exact ledger from the three files") {
    const SampleLedger s = build_sample(10, 4, 2);
    const Ledger restored =
        Ledger::restore(s.events_text, s.commitments_text, s.anchors_text).value();
    REQUIRE(restored.events().size() == s.ledger.events().size());
    REQUIRE(restored.batches().size() == s.ledger.batches().size());
    REQUIRE(restored.anchors().size() == s.ledger.anchors().size());
    for (std::size_t i = 0; i < restored.events().size(); ++i) {
        CHECK(event_to_line(restored.events()[i]) == event_to_line(s.ledger.events()[i]));
    }
    for (std::size_t i = 0; i < restored.batches().size(); ++i) {
        CHECK(batch_to_line(restored.batches()[i]) == batch_to_line(s.ledger.batches()[i]));
    }
    for (std::size_t i = 0; i < restored.anchors().size(); ++i) {
        CHECK(anchor_to_line(restored.anchors()[i]) == anchor_to_line(s.ledger.anchors()[i]));
    }
    CHECK(Ledger::restore("", "", "").value().events().empty());
}

TEST_CASE("restore refuses doctored files") {
    const SampleLedger s = build_sample(4, 2, 1);

    SUBCASE("tampered payload value") {
        // payload "color\x1Fred..." -> "color\x1Fsed...": framing stays valid,
        // so the failure must come from the commitment check
        std::string tampered = s.events_text;
        const std::string from = to_hex(std::string("color") + '\x1f' + "red");
        const std::string to = to_hex(std::string("color") + '\x1f' + "sed");
        const auto at = tampered.find(from);
        REQUIRE(at != std::string::npos);
        tampered.replace(at, from.size(), to);
        auto r = Ledger::restore(tampered, s.commitments_text, s.anchors_text);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error().code == ErrorCode::CorruptLog);
        CHECK(r.error().message.find("payload commitment mismatch") != std::string::npos);
    }
    SUBCASE("tampered subject breaks the batch root") {
        std::string tampered = s.events_text;
        tampered.replace(tampered.find("subj-0"), 6, "subj-X");
        auto r = Ledger::restore(tampered, s.commitments_text, s.anchors_text);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error().message.find("root mismatch") != std::string::npos);
    }
    SUBCASE("reordered events") {
        const auto cut = s.events_text.find('\n') + 1;
        const auto second_end = s.events_text.find('\n', cut) + 1;
        const std::string reordered = s.events_text.substr(cut, second_end - cut) +
                                      s.events_text.substr(0, cut) +
                                      s.events_text.substr(second_end);
        CHECK_FALSE(Ledger::restore(reordered, s.commitments_text, s.anchors_text).ok());
    }
    SUBCASE("tampered anchor digest") {
        std::string tampered = s.anchors_text;
        const auto at = tampered.find("\t", tampered.find("\t", tampered.find("\t") + 1) + 1) + 1;
        tampered[at] = tampered[at] == '0' ? '1' : '0';
        auto r = Ledger::restore(s.events_text, s.commitments_text, tampered);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error().message.find("digest mismatch") != std::string::npos);
    }
}

TEST_CASE("inclusion proofs verify against the batch root") {
    const SampleLedger s = build_sample(11, 4, 2);  // 2 full batches + short tail
    for (std::uint64_t id = 0; id < 11; ++id) {
        const InclusionProof proof = s.ledger.prove_event(id).value();
        const BatchCommitment batch = s.ledger.batch_for_event(id).value();
        CHECK(proof.batch_id == batch.batch_id);
        const std::string leaf = canonical_event_bytes(s.ledger.events()[id]);
        CHECK(verify_inclusion(batch.root, proof, leaf));
        // the proof is bound to this exact envelope
        CHECK_FALSE(verify_inclusion(batch.root, proof, leaf + "x"));
    }
    CHECK(s.ledger.prove_event(999).error().code == ErrorCode::IndexOutOfRange);

    Ledger pending;
    REQUIRE(pending.append(make_draft(EventKind::Sourcing, "p", 1)).ok());
    CHECK(pending.prove_event(0).error().code == ErrorCode::InvalidState);
}

TEST_CASE("field disclosure reveals one value and nothing else") {
    const SampleLedger s = build_sample(5, 2, 1);
    const FieldDisclosure d = s.ledger.disclose_field(2, "color").value();
    CHECK(d.field_value == "red");
    const Digest32 root = s.ledger.batch_for_event(2).value().root;
    CHECK(verify_disclosure(root, d));

    // the envelope carries only the commitment, not payload values
    CHECK(d.envelope_bytes.find("red") == std::string::npos);
    CHECK(d.envelope_bytes.find("payload_commitment") != std::string::npos);

    FieldDisclosure lied = d;
    lied.field_value = "blue";
    CHECK_FALSE(verify_disclosure(root, lied));
    FieldDisclosure renamed = d;
    renamed.field_name = "index";
    CHECK_FALSE(verify_disclosure(root, renamed));
    CHECK_FALSE(verify_disclosure(sha256("other"), d));

    CHECK(s.ledger.disclose_field(2, "nope").error().code == ErrorCode::UnknownField);
}

TEST_CASE("audit passes clean files and pinpoints corruption") {
    const SampleLedger s = build_sample(8, 2, 2);

    const AuditReport good = verify_ledger(s.events_text, s.commitments_text, s.anchors_text);
    CHECK(good.ok);
    CHECK(good.total_events == 8);
    CHECK(good.committed_events == 8);
    CHECK(good.message.find("ok:") == 0);

    SUBCASE("payload mutation -> bad event") {
        std::string t = s.events_text;
        const std::string from = to_hex(std::string("color") + '\x1f' + "red");
        t.replace(t.find(from), from.size(), to_hex(std::string("color") + '\x1f' + "sed"));
        const AuditReport r = verify_ledger(t, s.commitments_text, s.anchors_text);
        CHECK_FALSE(r.ok);
        CHECK(r.bad_event.value() == 0);
    }
    SUBCASE("subject mutation -> bad batch") {
        std::string t = s.events_text;
        t.replace(t.find("subj-5"), 6, "subj-Z");
        const AuditReport r = verify_ledger(t, s.commitments_text, s.anchors_text);
        CHECK_FALSE(r.ok);
        CHECK(r.bad_batch.value() == 2);
    }
    SUBCASE("root mutation -> bad batch, digest mutation -> bad anchor") {
        const std::string root0 = to_hex(s.ledger.batches()[0].root);
        std::string t = s.commitments_text;
        std::string wrong = root0;
        wrong[0] = wrong[0] == '0' ? '1' : '0';
        t.replace(t.find(root0), root0.size(), wrong);
        const AuditReport r = verify_ledger(s.events_text, t, s.anchors_text);
        CHECK_FALSE(r.ok);
        CHECK(r.bad_batch.value() == 0);

        const std::string digest1 = to_hex(s.ledger.anchors()[1].anchor_digest);
        std::string a = s.anchors_text;
        wrong = digest1;
        wrong[10] = wrong[10] == 'f' ? 'e' : 'f';
        a.replace(a.find(digest1), digest1.size(), wrong);
        const AuditReport r2 = verify_ledger(s.events_text, s.commitments_text, a);
        CHECK_FALSE(r2.ok);
        CHECK(r2.bad_anchor.value() == 1);
    }
    SUBCASE("structural damage -> corrupt") {
        const AuditReport r =
            verify_ledger("garbage line\n", s.commitments_text, s.anchors_text);
        CHECK_FALSE(r.ok);
        REQUIRE(r.corrupt.has_value());
        CHECK(r.corrupt->code == ErrorCode::CorruptLog);

        std::string dup = s.events_text + s.events_text.substr(0, s.events_text.find('\n') + 1);
        CHECK_FALSE(verify_ledger(dup, s.commitments_text, s.anchors_text).ok);

        std::string blank = s.events_text;
        blank.insert(blank.find('\n') + 1, "\n");
        CHECK_FALSE(verify_ledger(blank, s.commitments_text, s.anchors_text).ok);
    }
}

TEST_CASE("single byte flips anywhere in the committed log are caught") {
    const SampleLedger s = build_sample(6, 2, 2);
    int checked = 0;
    for (std::size_t pos = 0; pos < s.events_text.size(); pos += 7) {
        std::string t = s.events_text;
        if (t[pos] == '\n' || t[pos] == '\t') continue;  // structural separators
        t[pos] = t[pos] == 'x' ? 'y' : 'x';
        const AuditReport r = verify_ledger(t, s.commitments_text, s.anchors_text);
        CHECK_FALSE(r.ok);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("public projection discloses envelopes but never subjects or payloads") {
    Ledger ledger{LedgerConfig{2, 2}};
    FieldMap payload;
    payload.emplace_back("dish_name", "SECRET-VALUE");
    auto draft = make_draft(EventKind::Annotation, "SECRET-SUBJECT", 777, payload);
    draft.meta_dataset = "release-0009";
    draft.meta_fingerprint = sha256("fp");
    REQUIRE(ledger.append(draft).ok());
    REQUIRE(ledger.append(make_draft(EventKind::Sourcing, "SECRET-TWO", 778)).ok());
    REQUIRE(ledger.anchor(779).ok());

    const std::string out =
        export_public_projection(ledger.events(), ledger.batches(), ledger.anchors());
    CHECK(out.rfind("#ledger-public v1\n", 0) == 0);
    CHECK(out.find("SECRET") == std::string::npos);
    CHECK(out.find("dish_name") == std::string::npos);
    CHECK(out.find("annotation") != std::string::npos);
    CHECK(out.find("release-0009") != std::string::npos);
    CHECK(out.find(to_hex(ledger.events()[0].payload_commitment)) != std::string::npos);
    CHECK(out.find("batch\t") != std::string::npos);
    CHECK(out.find("anchor\t") != std::string::npos);
}

TEST_CASE("failing observers roll their step back") {
    Ledger ledger{LedgerConfig{2, 1}};
    ledger.on_append = [](const ContributionEvent&) -> Status {
        return make_error(ErrorCode::IoError, "disk full");
    };
    CHECK(ledger.append(make_draft(EventKind::Sourcing, "a", 1)).error().code ==
          ErrorCode::IoError);
    CHECK(ledger.events().empty());

    ledger.on_append = nullptr;
    REQUIRE(ledger.append(make_draft(EventKind::Sourcing, "a", 1)).ok());
    ledger.on_batch = [](const BatchCommitment&) -> Status {
        return make_error(ErrorCode::IoError, "disk full");
    };
    // the event itself lands; only the seal is rolled back for retry
    CHECK_FALSE(ledger.append(make_draft(EventKind::Sourcing, "b", 2)).ok());
    CHECK(ledger.events().size() == 2);
    CHECK(ledger.batches().empty());
    ledger.on_batch = nullptr;
    REQUIRE(ledger.flush().ok());
    CHECK(ledger.batches().size() == 1);
    CHECK(ledger.committed_events() == 2);
}
