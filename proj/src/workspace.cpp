#include "foodprov/workspace.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "foodprov/canonical.hpp"
#include "foodprov/record_io.hpp"

namespace foodprov {

namespace {

Error errno_error(ErrorCode code, const std::string& what) {
    return Error{code, what + ": " + std::strerror(errno)};
}

Status write_all(int fd, std::string_view bytes, const char* what) {
    std::size_t done = 0;
    while (done < bytes.size()) {
        const ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            return errno_error(ErrorCode::IoError, std::string("write ") + what);
        }
        done += static_cast<std::size_t>(n);
    }
    return Status::success();
}

// Splits off a trailing partial line (no final newline). Returns the byte
// offset where the partial line starts, or npos when the file is whole.
std::size_t partial_line_start(std::string_view text) {
    if (text.empty() || text.back() == '\n') return std::string_view::npos;
    const std::size_t pos = text.rfind('\n');
    return pos == std::string_view::npos ? 0 : pos + 1;
}

}  // namespace

Outcome<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return make_error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        return make_error(ErrorCode::IoError, "cannot read " + path.string());
    }
    return std::move(buf).str();
}

Status write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd < 0) {
            return errno_error(ErrorCode::IoError, "create " + tmp.string());
        }
        const Status written = write_all(fd, bytes, "temp file");
        if (!written.ok()) {
            ::close(fd);
            ::unlink(tmp.c_str());
            return written;
        }
        if (::fsync(fd) != 0) {
            const Error err = errno_error(ErrorCode::IoError, "fsync " + tmp.string());
            ::close(fd);
            ::unlink(tmp.c_str());
            return err;
        }
        ::close(fd);
    }
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        const Error err = errno_error(ErrorCode::IoError, "rename to " + path.string());
        ::unlink(tmp.c_str());
        return err;
    }
    return Status::success();
}

struct Workspace::Sink {
    int lock_fd = -1;
    int events_fd = -1;
    int commitments_fd = -1;
    int anchors_fd = -1;

    Sink() = default;
    Sink(const Sink&) = delete;
    Sink& operator=(const Sink&) = delete;

    ~Sink() {
        for (int fd : {events_fd, commitments_fd, anchors_fd, lock_fd}) {
            if (fd >= 0) ::close(fd);  // closing lock_fd releases the flock
        }
    }

    Status append_line(int fd, std::string line, const char* what) {
        line.push_back('\n');
        return write_all(fd, line, what);
    }

    Status sync(int fd, const char* what) {
        if (::fsync(fd) != 0) {
            return errno_error(ErrorCode::IoError, std::string("fsync ") + what);
        }
        return Status::success();
    }
};

namespace {

// Opens an append-only log, trimming a torn final line when allowed.
Outcome<std::pair<int, std::string>> open_log(const std::filesystem::path& path,
                                              bool repair_truncated) {
    const int fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND, 0644);
    if (fd < 0) {
        return errno_error(ErrorCode::IoError, "open " + path.string());
    }
    auto text = read_file(path);
    if (!text.ok()) {
        ::close(fd);
        return text.error();
    }
    const std::size_t torn = partial_line_start(text.value());
    if (torn != std::string_view::npos) {
        if (!repair_truncated) {
            ::close(fd);
            Error err = make_error(ErrorCode::CorruptLog,
                                   path.filename().string() +
                                       ": truncated final line (reopen with repair to drop it)");
            err.position = static_cast<std::int64_t>(torn);
            return err;
        }
        if (::ftruncate(fd, static_cast<off_t>(torn)) != 0) {
            const Error err = errno_error(ErrorCode::IoError, "truncate " + path.string());
            ::close(fd);
            return err;
        }
        text.value().resize(torn);
    }
    return std::make_pair(fd, std::move(text.value()));
}

}  // namespace

Outcome<Workspace> Workspace::open(const std::filesystem::path& root,
                                   const WorkspaceOptions& options) {
    std::error_code ec;
    if (!std::filesystem::exists(root, ec)) {
        if (!options.create_if_missing) {
            return make_error(ErrorCode::IoError, "no workspace at " + root.string());
        }
    }
    for (const char* sub : {"", "blobs", "manifests", "payouts"}) {
        std::filesystem::create_directories(root / sub, ec);
        if (ec) {
            return make_error(ErrorCode::IoError,
                              "cannot create " + (root / sub).string() + ": " + ec.message());
        }
    }

    auto sink = std::make_shared<Sink>();
    sink->lock_fd = ::open((root / ".lock").c_str(), O_RDWR | O_CREAT, 0644);
    if (sink->lock_fd < 0) {
        return errno_error(ErrorCode::IoError, "open " + (root / ".lock").string());
    }
    if (::flock(sink->lock_fd, LOCK_EX | LOCK_NB) != 0) {
        return make_error(ErrorCode::LockHeld,
                          "workspace already locked by another writer: " + root.string());
    }

    std::string log_text;
    std::string commitments_text;
    std::string anchors_text;
    struct Target {
        const char* file;
        int* fd;
        std::string* text;
    };
    const Target targets[] = {{"events.log", &sink->events_fd, &log_text},
                              {"commitments.txt", &sink->commitments_fd, &commitments_text},
                              {"anchors.txt", &sink->anchors_fd, &anchors_text}};
    for (const Target& t : targets) {
        auto opened = open_log(root / t.file, options.repair_truncated);
        if (!opened.ok()) return opened.error();
        *t.fd = opened.value().first;
        *t.text = std::move(opened.value().second);
    }

    auto restored = Ledger::restore(log_text, commitments_text, anchors_text, options.ledger);
    if (!restored.ok()) return restored.error();

    Workspace ws;
    ws.root_ = root;
    ws.sink_ = sink;
    ws.ledger_ = std::move(restored.value());

    // The observers capture the sink, not the workspace, so the workspace
    // stays movable while the ledger mirrors every mutation to disk.
    ws.ledger_.on_append = [sink](const ContributionEvent& event) {
        return sink->append_line(sink->events_fd, event_to_line(event), "events.log");
    };
    ws.ledger_.on_batch = [sink](const BatchCommitment& batch) {
        if (Status s = sink->append_line(sink->commitments_fd, batch_to_line(batch),
                                         "commitments.txt");
            !s.ok()) {
            return s;
        }
        if (Status s = sink->sync(sink->events_fd, "events.log"); !s.ok()) return s;
        return sink->sync(sink->commitments_fd, "commitments.txt");
    };
    ws.ledger_.on_anchor = [sink](const AnchorCheckpoint& anchor) {
        if (Status s = sink->append_line(sink->anchors_fd, anchor_to_line(anchor),
                                         "anchors.txt");
            !s.ok()) {
            return s;
        }
        return sink->sync(sink->anchors_fd, "anchors.txt");
    };

    // Side tables. Both are append-only with last entry winning, so a torn
    // final line is also repairable.
    const std::filesystem::path idx_path = root / "records.idx";
    if (std::filesystem::exists(idx_path, ec)) {
        auto idx = read_file(idx_path);
        if (!idx.ok()) return idx.error();
        std::size_t lineno = 0;
        std::string_view rest = idx.value();
        while (!rest.empty()) {
            const std::size_t nl = rest.find('\n');
            std::string_view line = rest.substr(0, nl);
            rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
            ++lineno;
            if (line.empty()) continue;
            const std::size_t tab = line.find('\t');
            if (tab == std::string_view::npos) {
                return make_error(ErrorCode::CorruptLog,
                                  "records.idx:" + std::to_string(lineno) + ": missing tab");
            }
            const auto fp = digest_from_hex(line.substr(tab + 1));
            if (!fp.has_value()) {
                return make_error(ErrorCode::CorruptLog,
                                  "records.idx:" + std::to_string(lineno) + ": bad fingerprint");
            }
            ws.record_index_[std::string(line.substr(0, tab))] = *fp;
        }
    }
    const std::filesystem::path hashes_path = root / "hashes.txt";
    if (std::filesystem::exists(hashes_path, ec)) {
        auto txt = read_file(hashes_path);
        if (!txt.ok()) return txt.error();
        std::size_t lineno = 0;
        std::string_view rest = txt.value();
        while (!rest.empty()) {
            const std::size_t nl = rest.find('\n');
            std::string_view line = rest.substr(0, nl);
            rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
            ++lineno;
            if (line.empty()) continue;
            const std::size_t tab = line.find('\t');
            if (tab == std::string_view::npos) {
                return make_error(ErrorCode::CorruptLog,
                                  "hashes.txt:" + std::to_string(lineno) + ": missing tab");
            }
            auto hash = phash_from_hex(line.substr(tab + 1));
            if (!hash.ok()) {
                return make_error(ErrorCode::CorruptLog,
                                  "hashes.txt:" + std::to_string(lineno) + ": bad hash");
            }
            ws.hashes_[std::string(line.substr(0, tab))] = hash.value();
        }
    }
    return ws;
}

Outcome<Digest32> Workspace::put_blob(std::string_view bytes) {
    const Digest32 fingerprint = sha256(bytes);
    const std::filesystem::path path = root_ / "blobs" / to_hex(fingerprint);
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) {
        return fingerprint;  // content-addressed, nothing to rewrite
    }
    if (Status s = write_file_atomic(path, bytes); !s.ok()) {
        return s.error();
    }
    return fingerprint;
}

Outcome<std::string> Workspace::get_blob(const Digest32& fingerprint) const {
    return read_file(root_ / "blobs" / to_hex(fingerprint));
}

bool Workspace::has_blob(const Digest32& fingerprint) const {
    std::error_code ec;
    return std::filesystem::exists(root_ / "blobs" / to_hex(fingerprint), ec);
}

Status Workspace::index_record(const std::string& record_id, const Digest32& fingerprint) {
    const int fd = ::open((root_ / "records.idx").c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) {
        return errno_error(ErrorCode::IoError, "open records.idx");
    }
    const Status s = write_all(fd, record_id + "\t" + to_hex(fingerprint) + "\n", "records.idx");
    ::close(fd);
    if (!s.ok()) return s;
    record_index_[record_id] = fingerprint;
    return Status::success();
}

Outcome<FoodRecord> Workspace::load_record(const std::string& record_id) const {
    const auto it = record_index_.find(record_id);
    if (it == record_index_.end()) {
        return make_error(ErrorCode::IoError, "record not indexed: " + record_id);
    }
    auto bytes = get_blob(it->second);
    if (!bytes.ok()) return bytes.error();
    return parse_record(bytes.value());
}

Status Workspace::store_hash(const std::string& record_id, PHash64 hash) {
    const int fd = ::open((root_ / "hashes.txt").c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) {
        return errno_error(ErrorCode::IoError, "open hashes.txt");
    }
    const Status s = write_all(fd, record_id + "\t" + phash_to_hex(hash) + "\n", "hashes.txt");
    ::close(fd);
    if (!s.ok()) return s;
    hashes_[record_id] = hash;
    return Status::success();
}

Outcome<std::vector<Submission>> Workspace::restore_submissions() const {
    std::vector<Submission> out;
    std::map<std::string, std::size_t> index;

    for (const ContributionEvent& event : ledger_.events()) {
        switch (event.kind) {
            case EventKind::Sourcing: {
                if (index.contains(event.subject)) break;
                Submission sub;
                sub.submission_id = event.subject;
                index.emplace(event.subject, out.size());
                out.push_back(std::move(sub));
                break;
            }
            case EventKind::Annotation: {
                const auto it = index.find(event.subject);
                if (it == index.end()) {
                    return make_error(ErrorCode::CorruptLog,
                                      "annotation before sourcing for " + event.subject);
                }
                Submission& sub = out[it->second];
                const std::string* attempt = find_field(event.payload, "attempt");
                if (attempt == nullptr) {
                    return make_error(ErrorCode::CorruptLog,
                                      "annotation without attempt for " + event.subject);
                }
                sub.attempt = std::stoi(*attempt);
                sub.state = PipelineState::Submitted;
                sub.feedback.clear();
                if (!event.meta_fingerprint.has_value()) {
                    return make_error(ErrorCode::CorruptLog,
                                      "annotation without fingerprint for " + event.subject);
                }
                auto bytes = get_blob(*event.meta_fingerprint);
                if (!bytes.ok()) {
                    return make_error(ErrorCode::IoError,
                                      "record blob missing for " + event.subject);
                }
                auto record = parse_record(bytes.value());
                if (!record.ok()) return record.error();
                sub.record = std::move(record.value());
                break;
            }
            case EventKind::Verification: {
                const auto it = index.find(event.subject);
                if (it == index.end()) {
                    return make_error(ErrorCode::CorruptLog,
                                      "verification before sourcing for " + event.subject);
                }
                Submission& sub = out[it->second];
                const std::string* stage = find_field(event.payload, "stage");
                const std::string* verdict = find_field(event.payload, "verdict");
                if (stage == nullptr || verdict == nullptr) {
                    return make_error(ErrorCode::CorruptLog,
                                      "verification missing stage/verdict for " + event.subject);
                }
                const bool pass = *verdict == "pass";
                if (*stage == review_stage_token(ReviewStage::Initial)) {
                    sub.state = pass ? PipelineState::InitialPassed
                                     : PipelineState::InitialRejected;
                } else {
                    sub.state = pass ? PipelineState::Accepted : PipelineState::FinalRejected;
                }
                sub.feedback.clear();
                if (!pass) {
                    if (const std::string* codes = find_field(event.payload, "feedback")) {
                        std::string_view rest = *codes;
                        while (!rest.empty()) {
                            const std::size_t comma = rest.find(',');
                            sub.feedback.emplace_back(rest.substr(0, comma));
                            rest = comma == std::string_view::npos ? std::string_view{}
                                                                   : rest.substr(comma + 1);
                        }
                    }
                }
                break;
            }
            case EventKind::Adoption: {
                const auto it = index.find(event.subject);
                if (it != index.end()) {
                    out[it->second].state = PipelineState::Curated;
                }
                break;
            }
        }
    }
    return out;
}

Status Workspace::write_manifest(const std::string& release_id, std::string_view text) {
    return write_file_atomic(root_ / "manifests" / (release_id + ".txt"), text);
}

Outcome<std::string> Workspace::read_manifest(const std::string& release_id) const {
    return read_file(root_ / "manifests" / (release_id + ".txt"));
}

Status Workspace::write_statement(const std::string& pool_id, std::string_view text) {
    return write_file_atomic(root_ / "payouts" / (pool_id + ".txt"), text);
}

Status Workspace::append_journal(const std::string& line) {
    const std::filesystem::path path = root_ / "payouts" / "journal.txt";
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) {
        return errno_error(ErrorCode::IoError, "open payouts/journal.txt");
    }
    const Status s = write_all(fd, line + "\n", "payouts/journal.txt");
    ::close(fd);
    return s;
}

}  // namespace foodprov
