#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "foodprov/errors.hpp"
#include "foodprov/hash.hpp"
#include "foodprov/ledger.hpp"
#include "foodprov/phash.hpp"
#include "foodprov/review.hpp"
#include "foodprov/schema.hpp"

namespace foodprov {

// Plain file helpers shared with read-only tooling (no lock involved).
Outcome<std::string> read_file(const std::filesystem::path& path);
Status write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

struct WorkspaceOptions {
    LedgerConfig ledger;
    bool create_if_missing = true;
    // A crash can leave a half-written final line in an append-only file.
    // With this flag the opener drops that line; without it the open fails
    // with CORRUPT_LOG so the operator has to look first.
    bool repair_truncated = false;
};

// Single-writer store rooted at one directory:
//
//   .lock            advisory writer lock (flock)
//   events.log       one line per appended event
//   commitments.txt  sealed batch commitments
//   anchors.txt      anchor checkpoints
//   records.idx      record_id -> canonical record fingerprint (latest wins)
//   hashes.txt       record_id -> perceptual hash (latest wins)
//   blobs/<hex>      content-addressed bytes (records, evidence)
//   manifests/       release manifests, one file per release
//   payouts/         payout statements plus journal.txt
//
// Event, commitment and anchor lines are written by ledger observers, so the
// files always mirror the in-memory ledger. events.log and commitments.txt
// are fsynced together on every batch seal; that is the durability boundary.
class Workspace {
public:
    static Outcome<Workspace> open(const std::filesystem::path& root,
                                   const WorkspaceOptions& options = {});

    Workspace(Workspace&&) noexcept = default;
    Workspace& operator=(Workspace&&) noexcept = default;
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    Ledger& ledger() { return ledger_; }
    const Ledger& ledger() const { return ledger_; }
    const std::filesystem::path& root() const { return root_; }

    Outcome<Digest32> put_blob(std::string_view bytes);
    Outcome<std::string> get_blob(const Digest32& fingerprint) const;
    bool has_blob(const Digest32& fingerprint) const;

    // Latest canonical fingerprint per record id, mirrored in records.idx.
    Status index_record(const std::string& record_id, const Digest32& fingerprint);
    const std::map<std::string, Digest32>& record_index() const { return record_index_; }
    Outcome<FoodRecord> load_record(const std::string& record_id) const;

    Status store_hash(const std::string& record_id, PHash64 hash);
    const std::map<std::string, PHash64>& hashes() const { return hashes_; }

    // Replays the event log into review-queue state. Records are loaded from
    // the blob store via the fingerprint on each annotation event, so the
    // queue survives process restarts without any extra state file.
    Outcome<std::vector<Submission>> restore_submissions() const;

    Status write_manifest(const std::string& release_id, std::string_view text);
    Outcome<std::string> read_manifest(const std::string& release_id) const;
    Status write_statement(const std::string& pool_id, std::string_view text);
    Status append_journal(const std::string& line);

private:
    struct Sink;  // owns the fds; shared with ledger observers so moves are safe

    Workspace() = default;

    std::filesystem::path root_;
    std::shared_ptr<Sink> sink_;
    Ledger ledger_;
    std::map<std::string, Digest32> record_index_;
    std::map<std::string, PHash64> hashes_;
};

}  // namespace foodprov
