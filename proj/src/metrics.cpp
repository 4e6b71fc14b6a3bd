#include "foodprov/metrics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "foodprov/decimal.hpp"

namespace foodprov {

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
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
    return lines;
}

std::vector<std::string_view> columns_of(std::string_view line) {
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

Outcome<double> parse_double(std::string_view text, std::size_t line_number) {
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
        return make_error(ErrorCode::ParseError, "bad number '" + std::string(text) + "'",
                          static_cast<std::int64_t>(line_number));
    }
    if (!std::isfinite(value)) {
        return make_error(ErrorCode::ParseError, "non-finite number",
                          static_cast<std::int64_t>(line_number));
    }
    return value;
}

std::string fixed_decimal(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

}  // namespace

bool counters_consistent(const FunnelCounters& c) {
    return c.adopted <= c.accepted && c.accepted <= c.arrived;
}

FunnelCounters funnel_from_ledger(const Ledger& ledger, std::int64_t cost_per_review_micro) {
    FunnelCounters counters;
    counters.cost_per_review_micro = cost_per_review_micro;
    std::set<std::string> accepted;
    std::set<std::string> adopted;
    for (const ContributionEvent& event : ledger.events()) {
        switch (event.kind) {
            case EventKind::Sourcing:
                counters.arrived += 1;
                break;
            case EventKind::Annotation:
                break;
            case EventKind::Verification: {
                counters.review_count += 1;
                if (const std::string* ms = find_field(event.payload, "review_ms")) {
                    std::int64_t value = 0;
                    bool numeric = !ms->empty();
                    for (char c : *ms) {
                        if (c < '0' || c > '9') {
                            numeric = false;
                            break;
                        }
                        value = value * 10 + (c - '0');
                    }
                    if (numeric) {
                        counters.review_time_total_ms += value;
                    }
                }
                const std::string* stage = find_field(event.payload, "stage");
                const std::string* verdict = find_field(event.payload, "verdict");
                if (stage != nullptr && verdict != nullptr && *stage == "final" &&
                    *verdict == "pass") {
                    accepted.insert(event.subject);
                }
                break;
            }
            case EventKind::Adoption:
                adopted.insert(event.subject);
                break;
        }
    }
    counters.accepted = accepted.size();
    counters.adopted = adopted.size();
    return counters;
}

FunnelReport funnel(const FunnelCounters& counters) {
    FunnelReport report;
    const auto ratio = [&report](RatioValue& slot, std::int64_t num, std::int64_t den,
                                 const char* label) {
        if (den > 0) {
            slot.defined = true;
            slot.rendered = format_ratio(num, den, 4);
        } else {
            report.undefined_ratios.emplace_back(label);
        }
    };
    ratio(report.ac_over_a, static_cast<std::int64_t>(counters.accepted),
          static_cast<std::int64_t>(counters.arrived), "AC/A");
    ratio(report.ad_over_ac, static_cast<std::int64_t>(counters.adopted),
          static_cast<std::int64_t>(counters.accepted), "AD/AC");
    ratio(report.mean_review_ms, counters.review_time_total_ms,
          static_cast<std::int64_t>(counters.review_count), "mean_review_ms");
    ratio(report.cost_per_adopted_micro,
          counters.cost_per_review_micro * static_cast<std::int64_t>(counters.review_count),
          static_cast<std::int64_t>(counters.adopted), "cost_per_adopted");
    return report;
}

std::string funnel_to_text(const FunnelCounters& counters, const FunnelReport& report) {
    const auto show = [](const RatioValue& v) {
        return v.defined ? v.rendered : std::string("undefined");
    };
    std::string out;
    out += "A\t" + std::to_string(counters.arrived) + "\n";
    out += "AC\t" + std::to_string(counters.accepted) + "\n";
    out += "AD\t" + std::to_string(counters.adopted) + "\n";
    out += "AC/A\t" + show(report.ac_over_a) + "\n";
    out += "AD/AC\t" + show(report.ad_over_ac) + "\n";
    out += "review_count\t" + std::to_string(counters.review_count) + "\n";
    out += "review_time_total_ms\t" + std::to_string(counters.review_time_total_ms) + "\n";
    out += "mean_review_ms\t" + show(report.mean_review_ms) + "\n";
    out += "cost_per_adopted\t" + show(report.cost_per_adopted_micro) + "\n";
    return out;
}

Outcome<RegressionReport> regression_metrics(const std::vector<PredictionPair>& pairs) {
    if (pairs.empty()) {
        return make_error(ErrorCode::DivisionByZero, "no prediction pairs");
    }
    const double n = static_cast<double>(pairs.size());
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double target_sum = 0.0;
    for (const PredictionPair& pair : pairs) {
        const double diff = pair.predicted - pair.actual;
        abs_sum += std::fabs(diff);
        sq_sum += diff * diff;
        target_sum += pair.actual;
    }
    const double target_mean = target_sum / n;
    double ss_tot = 0.0;
    for (const PredictionPair& pair : pairs) {
        const double dev = pair.actual - target_mean;
        ss_tot += dev * dev;
    }

    RegressionReport report;
    report.n = pairs.size();
    report.mae = abs_sum / n;
    report.rmse = std::sqrt(sq_sum / n);
    if (ss_tot > 0.0) {
        report.r2 = 1.0 - sq_sum / ss_tot;
    }
    return report;
}

std::string regression_to_text(const RegressionReport& report) {
    std::string out;
    out += "n\t" + std::to_string(report.n) + "\n";
    out += "mae\t" + fixed_decimal(report.mae, 1) + "\n";
    out += "rmse\t" + fixed_decimal(report.rmse, 1) + "\n";
    out += "r2\t" +
           (report.r2.has_value() ? fixed_decimal(*report.r2, 3)
                                  : std::string("undefined\tZERO_VARIANCE")) +
           "\n";
    return out;
}

Outcome<std::vector<PredictionPair>> parse_predictions(std::string_view text) {
    std::vector<PredictionPair> pairs;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i].front() == '#') {
            continue;
        }
        const auto cols = columns_of(lines[i]);
        if (cols.size() != 3) {
            return make_error(ErrorCode::ParseError,
                              "expected '<record_id>\\t<predicted>\\t<actual>'",
                              static_cast<std::int64_t>(i + 1));
        }
        auto predicted = parse_double(cols[1], i + 1);
        if (!predicted.ok()) return predicted.error();
        auto actual = parse_double(cols[2], i + 1);
        if (!actual.ok()) return actual.error();
        pairs.push_back(PredictionPair{predicted.value(), actual.value()});
    }
    return pairs;
}

const char* judged_task_token(JudgedTask t) {
    switch (t) {
        case JudgedTask::DishName: return "dish_name";
        case JudgedTask::Ingredients: return "ingredients";
        case JudgedTask::CookingMethod: return "cooking_method";
    }
    return "?";
}

Outcome<std::vector<Judgment>> parse_judgments(std::string_view text) {
    std::vector<Judgment> judgments;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i].front() == '#') {
            continue;
        }
        const auto cols = columns_of(lines[i]);
        if (cols.size() != 3) {
            return make_error(ErrorCode::ParseError,
                              "expected '<record_id>\\t<task>\\t<a|b>'",
                              static_cast<std::int64_t>(i + 1));
        }
        Judgment j;
        j.record_id = std::string(cols[0]);
        if (cols[1] == "dish_name") {
            j.task = JudgedTask::DishName;
        } else if (cols[1] == "ingredients") {
            j.task = JudgedTask::Ingredients;
        } else if (cols[1] == "cooking_method") {
            j.task = JudgedTask::CookingMethod;
        } else {
            return make_error(ErrorCode::ParseError,
                              "unknown task '" + std::string(cols[1]) + "'",
                              static_cast<std::int64_t>(i + 1));
        }
        if (cols[2] == "a") {
            j.winner = JudgedWinner::ModelA;
        } else if (cols[2] == "b") {
            j.winner = JudgedWinner::ModelB;
        } else {
            // no tie outcome by design: complementary percentages
            return make_error(ErrorCode::ParseError,
                              "winner must be 'a' or 'b', got '" + std::string(cols[2]) + "'",
                              static_cast<std::int64_t>(i + 1));
        }
        judgments.push_back(std::move(j));
    }
    return judgments;
}

Outcome<WinRateReport> win_rate(const std::vector<Judgment>& judgments) {
    if (judgments.empty()) {
        return make_error(ErrorCode::EmptyTask, "no judgments");
    }
    std::uint64_t wins[3][2] = {{0, 0}, {0, 0}, {0, 0}};
    for (const Judgment& j : judgments) {
        wins[static_cast<int>(j.task)][static_cast<int>(j.winner)] += 1;
    }
    WinRateReport report;
    for (int t = 0; t < 3; ++t) {
        const std::uint64_t total = wins[t][0] + wins[t][1];
        if (total == 0) {
            continue;
        }
        report.rows.push_back(WinRateRow{static_cast<JudgedTask>(t), wins[t][0], wins[t][1]});
    }
    return report;
}

std::string win_rate_to_text(const WinRateReport& report) {
    std::string out;
    for (const WinRateRow& row : report.rows) {
        const std::int64_t total = static_cast<std::int64_t>(row.wins_a + row.wins_b);
        out += "win_rate\t";
        out += judged_task_token(row.task);
        out.push_back('\t');
        out += format_ratio(static_cast<std::int64_t>(row.wins_a) * 100, total, 1);
        out.push_back('\t');
        out += format_ratio(static_cast<std::int64_t>(row.wins_b) * 100, total, 1);
        out.push_back('\n');
    }
    return out;
}

}  // namespace foodprov
