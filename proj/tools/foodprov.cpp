// Unified command-line front end. Every subcommand is a thin shell around
// the library: parse flags, open or read the workspace, call one entry
// point, render line-oriented text. Exit 0 on success, 1 on a reported
// domain error, 2 on a usage error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "foodprov/curation.hpp"
#include "foodprov/decimal.hpp"
#include "foodprov/errors.hpp"
#include "foodprov/ledger.hpp"
#include "foodprov/metrics.hpp"
#include "foodprov/record_io.hpp"
#include "foodprov/review.hpp"
#include "foodprov/royalty.hpp"
#include "foodprov/simulate.hpp"
#include "foodprov/workspace.hpp"

namespace fs = std::filesystem;
using namespace foodprov;

namespace {

int fail(const Error& err) {
    std::cerr << "error: " << error_code_name(err.code) << ": " << err.message;
    if (err.position >= 0) {
        std::cerr << " (byte " << err.position << ")";
    }
    std::cerr << "\n";
    return err.code == ErrorCode::UsageError ? 2 : 1;
}

int usage_fail(const std::string& message) {
    return fail(Error{ErrorCode::UsageError, message});
}

// Everything the config file can set. Flags override individual fields.
struct ToolSettings {
    LedgerConfig ledger;
    int max_attempts = 3;
    bool allow_final_resubmit = true;
    std::uint64_t seed = 0;
    int dedup_threshold = 10;
    std::uint32_t public_ratio_bp = 1000;
    std::string schema_version = "1.0.0";
    std::string check_logic_version = "1.0.0";
    RoyaltyParams royalty;
    ReviewerPolicy initial = default_initial_policy();
    ReviewerPolicy final_stage = default_final_policy();
};

Outcome<std::vector<std::string>> split_words(std::string_view line) {
    std::vector<std::string> words;
    std::size_t at = 0;
    while (at < line.size()) {
        while (at < line.size() && line[at] == ' ') ++at;
        const std::size_t start = at;
        while (at < line.size() && line[at] != ' ') ++at;
        if (at > start) words.emplace_back(line.substr(start, at - start));
    }
    return words;
}

Outcome<std::int64_t> config_int(const std::string& word) {
    auto parsed = parse_scaled(word, 0);
    if (!parsed.ok()) {
        return make_error(ErrorCode::ParseError, "bad integer: " + word);
    }
    return parsed.value();
}

// Fraction at 4 decimals -> basis points ("0.95" -> 9500).
Outcome<std::uint32_t> config_bp(const std::string& word) {
    auto parsed = parse_scaled(word, 4);
    if (!parsed.ok() || parsed.value() < 0 || parsed.value() > 10000) {
        return make_error(ErrorCode::ParseError, "bad fraction (want 0..1): " + word);
    }
    return static_cast<std::uint32_t>(parsed.value());
}

Outcome<ToolSettings> parse_settings(std::string_view text) {
    ToolSettings settings;
    ReviewerPolicy* stage = nullptr;
    bool policies_cleared = false;

    std::size_t lineno = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        auto words_out = split_words(line);
        if (!words_out.ok()) return words_out.error();
        const std::vector<std::string>& w = words_out.value();
        const auto bad = [&](const std::string& why) {
            return make_error(ErrorCode::ParseError,
                              "config line " + std::to_string(lineno) + ": " + why);
        };

        if (w[0] == "stage") {
            if (w.size() != 2 || (w[1] != "initial" && w[1] != "final")) {
                return bad("want: stage initial|final");
            }
            if (!policies_cleared) {
                // A config that declares stages replaces the stock policies.
                settings.initial.rules.clear();
                settings.final_stage.rules.clear();
                policies_cleared = true;
            }
            stage = w[1] == "initial" ? &settings.initial : &settings.final_stage;
        } else if (w[0] == "rule") {
            if (stage == nullptr) return bad("rule before any stage line");
            ReviewRule rule;
            if (w.size() == 2 && w[1] == "schema") {
                rule.kind = ReviewRule::Kind::SchemaValid;
            } else if (w.size() == 3 && w[1] == "stochastic") {
                auto bp = config_bp(w[2]);
                if (!bp.ok()) return bad(bp.error().message);
                rule.kind = ReviewRule::Kind::StochasticPass;
                rule.pass_rate_bp = bp.value();
            } else if (w.size() == 4 && (w[1] == "min" || w[1] == "max")) {
                const auto signal = rule_signal_from_token(w[2]);
                auto threshold = parse_scaled(w[3], 2);
                if (!signal.has_value()) return bad("unknown signal " + w[2]);
                if (!threshold.ok()) return bad("bad threshold " + w[3]);
                rule.kind = w[1] == "min" ? ReviewRule::Kind::MinProbability
                                          : ReviewRule::Kind::MaxProbability;
                rule.signal = *signal;
                rule.threshold_centi = threshold.value();
            } else {
                return bad("want: rule schema | rule min|max <signal> <prob> | "
                           "rule stochastic <rate>");
            }
            stage->rules.push_back(rule);
        } else if (w.size() == 2) {
            const std::string& key = w[0];
            if (key == "batch_size" || key == "anchor_every" || key == "max_attempts" ||
                key == "seed" || key == "dedup_threshold") {
                auto n = config_int(w[1]);
                if (!n.ok()) return bad(n.error().message);
                if (key == "batch_size") {
                    settings.ledger.batch_size = static_cast<std::uint64_t>(n.value());
                } else if (key == "anchor_every") {
                    settings.ledger.anchor_every = static_cast<std::uint64_t>(n.value());
                } else if (key == "max_attempts") {
                    settings.max_attempts = static_cast<int>(n.value());
                } else if (key == "seed") {
                    settings.seed = static_cast<std::uint64_t>(n.value());
                } else {
                    settings.dedup_threshold = static_cast<int>(n.value());
                }
            } else if (key == "allow_final_resubmit") {
                if (w[1] != "true" && w[1] != "false") return bad("want true|false");
                settings.allow_final_resubmit = w[1] == "true";
            } else if (key == "public_ratio" || key == "quality_decay") {
                auto bp = config_bp(w[1]);
                if (!bp.ok()) return bad(bp.error().message);
                if (key == "public_ratio") {
                    settings.public_ratio_bp = bp.value();
                } else {
                    settings.royalty.quality_decay_bp = bp.value();
                }
            } else if (key == "schema_version") {
                settings.schema_version = w[1];
            } else if (key == "check_logic_version") {
                settings.check_logic_version = w[1];
            } else {
                return bad("unknown key " + key);
            }
        } else if (w.size() == 3 && w[0] == "role_multiplier") {
            auto bp = config_bp(w[2]);
            if (!bp.ok()) return bad(bp.error().message);
            settings.royalty.role_multiplier_bp[w[1]] = bp.value();
        } else {
            return bad("unknown directive " + w[0]);
        }
    }
    return settings;
}

// Settings come from --config, else <workspace>/config.txt, else defaults.
Outcome<ToolSettings> load_settings(const fs::path& workspace, const std::string& config_flag) {
    fs::path path;
    if (!config_flag.empty()) {
        path = config_flag;
    } else {
        std::error_code ec;
        if (!fs::exists(workspace / "config.txt", ec)) return ToolSettings{};
        path = workspace / "config.txt";
    }
    auto text = read_file(path);
    if (!text.ok()) return text.error();
    return parse_settings(text.value());
}

// Lock-free ledger load for read-only commands; absent files read as empty.
Outcome<Ledger> load_ledger_readonly(const fs::path& root, const LedgerConfig& config) {
    std::string texts[3];
    const char* names[3] = {"events.log", "commitments.txt", "anchors.txt"};
    for (int i = 0; i < 3; ++i) {
        std::error_code ec;
        if (!fs::exists(root / names[i], ec)) continue;
        auto text = read_file(root / names[i]);
        if (!text.ok()) return text.error();
        texts[i] = std::move(text.value());
    }
    return Ledger::restore(texts[0], texts[1], texts[2], config);
}

std::int64_t next_ts(const Ledger& ledger, std::int64_t explicit_ts) {
    if (explicit_ts >= 0) return explicit_ts;
    if (ledger.events().empty()) return 1700000000000;
    return ledger.events().back().timestamp_ms + 1000;
}

PipelineConfig pipeline_config_from(const ToolSettings& settings) {
    PipelineConfig config;
    config.max_attempts = settings.max_attempts;
    config.allow_final_resubmit = settings.allow_final_resubmit;
    config.seed = settings.seed;
    return config;
}

Outcome<ReviewPipeline> open_pipeline(Workspace& ws, const ToolSettings& settings) {
    auto pipeline = ReviewPipeline::create(ws.ledger(), settings.initial, settings.final_stage,
                                           pipeline_config_from(settings));
    if (!pipeline.ok()) return pipeline.error();
    auto restored = ws.restore_submissions();
    if (!restored.ok()) return restored.error();
    pipeline.value().adopt_restored(std::move(restored.value()));
    return pipeline;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (const std::string& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

int cmd_ingest(const fs::path& root, const ToolSettings& settings, const std::string& file,
               std::int64_t ts_flag, bool repair) {
    auto ws = Workspace::open(root, {settings.ledger, true, repair});
    if (!ws.ok()) return fail(ws.error());
    auto pipeline = open_pipeline(ws.value(), settings);
    if (!pipeline.ok()) return fail(pipeline.error());

    auto text = read_file(file);
    if (!text.ok()) return fail(text.error());
    const RecordFileResult parsed = parse_record_file(text.value());
    for (const RecordParseFailure& failure : parsed.failures) {
        std::cerr << file << ":" << failure.line_number << ": "
                  << error_code_name(failure.error.code) << ": " << failure.error.message
                  << "\n";
    }

    std::int64_t ts = next_ts(ws.value().ledger(), ts_flag);
    int rejected = static_cast<int>(parsed.failures.size());
    for (const FoodRecord& record : parsed.records) {
        auto blob = ws.value().put_blob(serialize_record(record));
        if (!blob.ok()) return fail(blob.error());
        if (Status s = ws.value().index_record(record.record_id, blob.value()); !s.ok()) {
            return fail(s.error());
        }
        const Submission* existing = pipeline.value().find(record.record_id);
        if (existing == nullptr) {
            auto id = pipeline.value().submit(record, ts);
            if (!id.ok()) return fail(id.error());
            std::cout << "submitted\t" << record.record_id << "\tattempt\t1\n";
        } else {
            if (Status s = pipeline.value().resubmit(record.record_id, record, ts); !s.ok()) {
                return fail(s.error());
            }
            std::cout << "resubmitted\t" << record.record_id << "\tattempt\t"
                      << pipeline.value().find(record.record_id)->attempt << "\n";
        }
        ts += 1000;
    }
    if (Status s = ws.value().ledger().flush(); !s.ok()) return fail(s.error());
    return rejected == 0 ? 0 : 1;
}

int cmd_review(const fs::path& root, const ToolSettings& settings, const std::string& only_id,
               std::int64_t ts_flag) {
    auto ws = Workspace::open(root, {settings.ledger, false, false});
    if (!ws.ok()) return fail(ws.error());
    auto pipeline = open_pipeline(ws.value(), settings);
    if (!pipeline.ok()) return fail(pipeline.error());

    std::vector<std::string> ids;
    for (const Submission& sub : pipeline.value().submissions()) {
        if (!only_id.empty() && sub.submission_id != only_id) continue;
        ids.push_back(sub.submission_id);
    }
    if (!only_id.empty() && ids.empty()) {
        return fail(Error{ErrorCode::InvalidState, "unknown submission " + only_id});
    }

    std::int64_t ts = next_ts(ws.value().ledger(), ts_flag);
    for (const std::string& id : ids) {
        const Submission* sub = pipeline.value().find(id);
        const bool steppable = sub->state == PipelineState::Submitted ||
                               sub->state == PipelineState::InitialPassed;
        if (!steppable && only_id.empty()) continue;
        while (true) {
            const PipelineState state = pipeline.value().find(id)->state;
            if (state != PipelineState::Submitted && state != PipelineState::InitialPassed) {
                break;
            }
            if (Status s = pipeline.value().step(id, ts); !s.ok()) return fail(s.error());
            ts += 1000;
        }
        sub = pipeline.value().find(id);
        std::cout << id << "\t" << pipeline_state_name(sub->state);
        if (!sub->feedback.empty()) std::cout << "\t" << join(sub->feedback, ',');
        std::cout << "\n";
    }
    if (Status s = ws.value().ledger().flush(); !s.ok()) return fail(s.error());
    return 0;
}

int cmd_curate(const fs::path& root, const ToolSettings& settings, const std::string& release_id,
               std::int64_t ts_flag) {
    auto ws = Workspace::open(root, {settings.ledger, false, false});
    if (!ws.ok()) return fail(ws.error());
    auto pipeline = open_pipeline(ws.value(), settings);
    if (!pipeline.ok()) return fail(pipeline.error());

    CurationConfig config;
    config.release_id = release_id;
    config.schema_version = settings.schema_version;
    config.check_logic_version = settings.check_logic_version;
    config.seed = settings.seed;
    config.dedup_threshold = settings.dedup_threshold;
    config.public_ratio_bp = settings.public_ratio_bp;

    auto manifest = curate(pipeline.value(), ws.value().hashes(), config,
                           next_ts(ws.value().ledger(), ts_flag));
    if (!manifest.ok()) return fail(manifest.error());
    if (Status s = ws.value().write_manifest(release_id, manifest_to_text(manifest.value()));
        !s.ok()) {
        return fail(s.error());
    }
    if (Status s = ws.value().ledger().flush(); !s.ok()) return fail(s.error());
    std::cout << "release\t" << release_id << "\n"
              << "entries\t" << manifest.value().entries.size() << "\n"
              << "digest\t" << to_hex(manifest.value().manifest_digest) << "\n";
    return 0;
}

int cmd_anchor(const fs::path& root, const ToolSettings& settings, std::int64_t ts_flag) {
    auto ws = Workspace::open(root, {settings.ledger, false, false});
    if (!ws.ok()) return fail(ws.error());
    auto anchored = ws.value().ledger().anchor(next_ts(ws.value().ledger(), ts_flag));
    if (!anchored.ok()) return fail(anchored.error());
    if (!anchored.value().has_value()) {
        std::cout << "nothing to anchor\n";
    } else {
        std::cout << anchor_to_line(*anchored.value()) << "\n";
    }
    return 0;
}

int cmd_prove(const fs::path& root, const ToolSettings& settings, std::uint64_t event_id) {
    auto ledger = load_ledger_readonly(root, settings.ledger);
    if (!ledger.ok()) return fail(ledger.error());
    auto proof = ledger.value().prove_event(event_id);
    if (!proof.ok()) return fail(proof.error());
    auto batch = ledger.value().batch_for_event(event_id);
    if (!batch.ok()) return fail(batch.error());

    const ContributionEvent& event = ledger.value().events()[event_id];
    const std::string envelope = canonical_event_bytes(event);
    if (!verify_inclusion(batch.value().root, proof.value(), envelope)) {
        return fail(Error{ErrorCode::CorruptLog, "freshly built proof failed to verify"});
    }
    std::cout << "#inclusion-proof v1\n"
              << "event\t" << event_id << "\n"
              << "envelope\t" << to_hex(envelope) << "\n"
              << "batch\t" << batch_to_line(batch.value()) << "\n"
              << "leaf\t" << proof.value().leaf_index << "\n";
    for (const ProofStep& step : proof.value().path) {
        std::cout << "step\t" << (step.sibling_on_left ? "l" : "r") << "\t"
                  << to_hex(step.sibling) << "\n";
    }
    return 0;
}

int cmd_disclose(const fs::path& root, const ToolSettings& settings, std::uint64_t event_id,
                 const std::string& field) {
    auto ledger = load_ledger_readonly(root, settings.ledger);
    if (!ledger.ok()) return fail(ledger.error());
    auto disclosure = ledger.value().disclose_field(event_id, field);
    if (!disclosure.ok()) return fail(disclosure.error());
    auto batch = ledger.value().batch_for_event(event_id);
    if (!batch.ok()) return fail(batch.error());
    if (!verify_disclosure(batch.value().root, disclosure.value())) {
        return fail(Error{ErrorCode::CorruptLog, "freshly built disclosure failed to verify"});
    }

    const FieldDisclosure& d = disclosure.value();
    std::cout << "#disclosure v1\n"
              << "event\t" << d.event_id << "\n"
              << "field\t" << d.field_name << "\n"
              << "value\t" << d.field_value << "\n"
              << "envelope\t" << to_hex(d.envelope_bytes) << "\n";
    for (const ProofStep& step : d.field_path) {
        std::cout << "fieldstep\t" << (step.sibling_on_left ? "l" : "r") << "\t"
                  << to_hex(step.sibling) << "\n";
    }
    std::cout << "leaf\t" << d.event_proof.leaf_index << "\n";
    for (const ProofStep& step : d.event_proof.path) {
        std::cout << "eventstep\t" << (step.sibling_on_left ? "l" : "r") << "\t"
                  << to_hex(step.sibling) << "\n";
    }
    std::cout << "batch\t" << batch_to_line(batch.value()) << "\n";
    return 0;
}

int cmd_verify(const fs::path& root, const ToolSettings& settings,
               const std::string& export_path) {
    std::string texts[3];
    const char* names[3] = {"events.log", "commitments.txt", "anchors.txt"};
    for (int i = 0; i < 3; ++i) {
        std::error_code ec;
        if (!fs::exists(root / names[i], ec)) continue;
        auto text = read_file(root / names[i]);
        if (!text.ok()) return fail(text.error());
        texts[i] = std::move(text.value());
    }

    const AuditReport report = verify_ledger(texts[0], texts[1], texts[2]);
    std::cout << (report.ok ? "ok" : "not ok") << "\t" << report.message << "\n"
              << "events\t" << report.committed_events << "\t" << report.total_events << "\n";
    if (report.corrupt.has_value()) {
        std::cout << "corrupt_line\t" << report.corrupt->position << "\t"
                  << report.corrupt->message << "\n";
    }
    if (report.bad_event.has_value()) std::cout << "bad_event\t" << *report.bad_event << "\n";
    if (report.bad_batch.has_value()) std::cout << "bad_batch\t" << *report.bad_batch << "\n";
    if (report.bad_anchor.has_value()) std::cout << "bad_anchor\t" << *report.bad_anchor << "\n";
    if (!report.ok) return 1;

    if (!export_path.empty()) {
        auto ledger = Ledger::restore(texts[0], texts[1], texts[2], settings.ledger);
        if (!ledger.ok()) return fail(ledger.error());
        const std::string projection =
            export_public_projection(ledger.value().events(), ledger.value().batches(),
                                     ledger.value().anchors());
        if (Status s = write_file_atomic(export_path, projection); !s.ok()) {
            return fail(s.error());
        }
        std::cout << "exported\t" << export_path << "\n";
    }
    return 0;
}

int cmd_payout(const fs::path& root, const ToolSettings& settings, const std::string& pool_id,
               std::int64_t amount, const std::string& source) {
    auto ws = Workspace::open(root, {settings.ledger, false, false});
    if (!ws.ok()) return fail(ws.error());
    RevenuePool pool{pool_id, amount, source};
    auto statement = settle(pool, ws.value().ledger(), settings.royalty,
                            [&ws](const std::string& line) {
                                return ws.value().append_journal(line);
                            });
    if (!statement.ok()) return fail(statement.error());
    const std::string text = statement_to_text(statement.value());
    if (Status s = ws.value().write_statement(pool_id, text); !s.ok()) return fail(s.error());
    std::cout << text;
    return 0;
}

int cmd_stats(const std::string& file, bool jsonl) {
    auto text = read_file(file);
    if (!text.ok()) return fail(text.error());
    DatasetStats stats;
    if (jsonl) {
        const RecordFileResult parsed = parse_record_file(text.value());
        if (!parsed.failures.empty()) {
            const RecordParseFailure& failure = parsed.failures.front();
            Error e = failure.error;
            e.message = file + ":" + std::to_string(failure.line_number) + ": " + e.message;
            return fail(e);
        }
        stats = dataset_stats(parsed.records);
    } else {
        auto rows = parse_card(text.value());
        if (!rows.ok()) return fail(rows.error());
        stats = dataset_stats(rows.value());
    }
    std::cout << stats_to_text(stats);
    return 0;
}

int cmd_eval(const std::string& regression_file, const std::string& winrate_file) {
    if (regression_file.empty() && winrate_file.empty()) {
        return usage_fail("eval needs --regression and/or --winrate");
    }
    if (!regression_file.empty()) {
        auto text = read_file(regression_file);
        if (!text.ok()) return fail(text.error());
        auto pairs = parse_predictions(text.value());
        if (!pairs.ok()) return fail(pairs.error());
        auto report = regression_metrics(pairs.value());
        if (!report.ok()) return fail(report.error());
        std::cout << regression_to_text(report.value());
    }
    if (!winrate_file.empty()) {
        auto text = read_file(winrate_file);
        if (!text.ok()) return fail(text.error());
        auto judgments = parse_judgments(text.value());
        if (!judgments.ok()) return fail(judgments.error());
        auto report = win_rate(judgments.value());
        if (!report.ok()) return fail(report.error());
        std::cout << win_rate_to_text(report.value());
    }
    return 0;
}

int cmd_funnel(const fs::path& root, const ToolSettings& settings, std::int64_t cost_micro) {
    auto ledger = load_ledger_readonly(root, settings.ledger);
    if (!ledger.ok()) return fail(ledger.error());
    const FunnelCounters counters = funnel_from_ledger(ledger.value(), cost_micro);
    std::cout << funnel_to_text(counters, funnel(counters));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"food data provenance, review and royalty toolkit"};
    app.require_subcommand(1);

    std::string workspace_flag = "workspace";
    std::string config_flag;
    app.add_option("--workspace", workspace_flag, "workspace root directory")
        ->envname("FOODPROV_WORKSPACE");
    app.add_option("--config", config_flag, "settings file (default <workspace>/config.txt)");

    std::string ingest_file;
    std::int64_t ingest_ts = -1;
    bool ingest_repair = false;
    CLI::App* ingest = app.add_subcommand("ingest", "submit records from a JSON-lines file");
    ingest->add_option("file", ingest_file, "records file, one JSON object per line")
        ->required();
    ingest->add_option("--ts", ingest_ts, "timestamp (ms) for the first event");
    ingest->add_flag("--repair-truncated", ingest_repair,
                     "drop a torn final log line instead of failing");

    std::string review_id;
    std::int64_t review_ts = -1;
    CLI::App* review = app.add_subcommand("review", "run pending submissions through review");
    review->add_option("--id", review_id, "review one submission instead of all");
    review->add_option("--ts", review_ts, "timestamp (ms) for the first event");

    std::string curate_release;
    std::int64_t curate_ts = -1;
    CLI::App* curate_cmd = app.add_subcommand("curate", "freeze accepted records into a release");
    curate_cmd->add_option("--release", curate_release, "release id")->required();
    curate_cmd->add_option("--ts", curate_ts, "timestamp (ms) for adoption events");

    std::int64_t anchor_ts = -1;
    CLI::App* anchor_cmd = app.add_subcommand("anchor", "checkpoint all uncovered batches");
    anchor_cmd->add_option("--ts", anchor_ts, "checkpoint timestamp (ms)");

    std::uint64_t prove_event = 0;
    CLI::App* prove = app.add_subcommand("prove", "print an inclusion proof for one event");
    prove->add_option("--event", prove_event, "event id")->required();

    std::uint64_t disclose_event = 0;
    std::string disclose_field;
    CLI::App* disclose =
        app.add_subcommand("disclose", "prove one payload field without revealing the rest");
    disclose->add_option("--event", disclose_event, "event id")->required();
    disclose->add_option("--field", disclose_field, "payload field name")->required();

    std::string export_path;
    CLI::App* verify = app.add_subcommand("verify-ledger", "recompute every commitment");
    verify->add_option("--export-public", export_path,
                       "write the payload-free projection here after a clean audit");

    std::string pool_id = "pool-0001";
    std::int64_t pool_amount = 0;
    std::string pool_source = "manual";
    CLI::App* payout = app.add_subcommand("payout", "settle a revenue pool to contributors");
    payout->add_option("--pool", pool_id, "pool id");
    payout->add_option("--amount", pool_amount, "pool amount in micro-units")->required();
    payout->add_option("--source", pool_source, "revenue source note");

    std::string stats_file;
    bool stats_jsonl = false;
    CLI::App* stats = app.add_subcommand("stats", "dataset composition table");
    stats->add_option("file", stats_file, "card file (or records file with --jsonl)")
        ->required();
    stats->add_flag("--jsonl", stats_jsonl, "input is a JSON-lines records file");

    std::string eval_regression;
    std::string eval_winrate;
    CLI::App* eval = app.add_subcommand("eval", "offline metrics over prediction files");
    eval->add_option("--regression", eval_regression, "kcal prediction file");
    eval->add_option("--winrate", eval_winrate, "pairwise judgment file");

    std::int64_t funnel_cost = 0;
    CLI::App* funnel_cmd = app.add_subcommand("funnel", "arrival/acceptance/adoption ratios");
    funnel_cmd->add_option("--cost-per-review", funnel_cost, "cost per review in micro-units");

    SimulateConfig sim;
    std::string sim_pass_initial;
    std::string sim_pass_final;
    CLI::App* simulate = app.add_subcommand("simulate", "full synthetic campaign end to end");
    simulate->add_option("--seed", sim.seed, "deterministic seed");
    simulate->add_option("--submissions", sim.submissions, "number of synthetic records");
    simulate->add_option("--pass-initial", sim_pass_initial,
                         "stochastic initial pass rate, e.g. 0.70");
    simulate->add_option("--pass-final", sim_pass_final,
                         "stochastic final pass rate, e.g. 0.90");
    simulate->add_option("--max-attempts", sim.max_attempts, "submission attempts allowed");
    simulate->add_option("--pool", sim.pool_micro, "revenue pool in micro-units");
    simulate->add_option("--release", sim.release_id, "release id");
    simulate->add_option("--dedup-threshold", sim.dedup_threshold,
                         "Hamming radius for near-duplicates");
    simulate->add_option("--batch-size", sim.ledger.batch_size, "events per commitment");
    simulate->add_option("--anchor-every", sim.ledger.anchor_every, "batches per checkpoint");
    simulate->add_option("--cost-per-review", sim.cost_per_review_micro,
                         "cost per review in micro-units");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const fs::path root = workspace_flag;
    auto settings = load_settings(root, config_flag);
    if (!settings.ok()) return fail(settings.error());

    if (*ingest) return cmd_ingest(root, settings.value(), ingest_file, ingest_ts, ingest_repair);
    if (*review) return cmd_review(root, settings.value(), review_id, review_ts);
    if (*curate_cmd) return cmd_curate(root, settings.value(), curate_release, curate_ts);
    if (*anchor_cmd) return cmd_anchor(root, settings.value(), anchor_ts);
    if (*prove) return cmd_prove(root, settings.value(), prove_event);
    if (*disclose) return cmd_disclose(root, settings.value(), disclose_event, disclose_field);
    if (*verify) return cmd_verify(root, settings.value(), export_path);
    if (*payout) return cmd_payout(root, settings.value(), pool_id, pool_amount, pool_source);
    if (*stats) return cmd_stats(stats_file, stats_jsonl);
    if (*eval) return cmd_eval(eval_regression, eval_winrate);
    if (*funnel_cmd) return cmd_funnel(root, settings.value(), funnel_cost);
    if (*simulate) {
        if (!sim_pass_initial.empty()) {
            auto bp = config_bp(sim_pass_initial);
            if (!bp.ok()) return usage_fail("--pass-initial: " + bp.error().message);
            sim.pass_initial_bp = bp.value();
        }
        if (!sim_pass_final.empty()) {
            auto bp = config_bp(sim_pass_final);
            if (!bp.ok()) return usage_fail("--pass-final: " + bp.error().message);
            sim.pass_final_bp = bp.value();
        }
        if (sim.pass_initial_bp > 0 && sim.pass_final_bp == 0) {
            return usage_fail("--pass-initial needs --pass-final");
        }
        if (settings.value().seed != 0 && simulate->count("--seed") == 0) {
            sim.seed = settings.value().seed;
        }
        auto ws = Workspace::open(root, {sim.ledger, true, false});
        if (!ws.ok()) return fail(ws.error());
        auto summary = run_simulation(ws.value(), sim);
        if (!summary.ok()) return fail(summary.error());
        std::cout << summary.value().summary_text;
        return 0;
    }
    return 2;
}
