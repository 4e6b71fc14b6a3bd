#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foodprov/errors.hpp"
#include "foodprov/ledger.hpp"

namespace foodprov {

// Funnel instrumentation. A counts arrived submissions, AC those accepted
// by final review, AD those adopted into a release; AD <= AC <= A.
struct FunnelCounters {
    std::uint64_t arrived = 0;   // A
    std::uint64_t accepted = 0;  // AC
    std::uint64_t adopted = 0;   // AD
    std::int64_t review_time_total_ms = 0;
    std::uint64_t review_count = 0;
    std::int64_t cost_per_review_micro = 0;  // config input, not measured
};

bool counters_consistent(const FunnelCounters& c);

// One Sourcing event per arrival; acceptance and adoption are distinct
// subjects with a final-pass Verification / an Adoption event. Review time
// sums the review_ms payload of every Verification event.
FunnelCounters funnel_from_ledger(const Ledger& ledger,
                                  std::int64_t cost_per_review_micro = 0);

struct RatioValue {
    bool defined = false;
    std::string rendered;  // exact rational at 4 decimals when defined
};

struct FunnelReport {
    RatioValue ac_over_a;
    RatioValue ad_over_ac;
    RatioValue mean_review_ms;
    RatioValue cost_per_adopted_micro;
    std::vector<std::string> undefined_ratios;  // DIVISION_BY_ZERO flags
};

// Never fails: ratios with zero denominators come back flagged, the rest
// are still reported.
FunnelReport funnel(const FunnelCounters& counters);

std::string funnel_to_text(const FunnelCounters& counters, const FunnelReport& report);

struct RegressionReport {
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> r2;  // absent when target variance is zero
    std::size_t n = 0;
};

struct PredictionPair {
    double predicted = 0.0;
    double actual = 0.0;
};

// MAE, RMSE and R-squared about the true-target mean. ZERO_VARIANCE is a
// flag, not a failure: constant targets still get MAE/RMSE.
Outcome<RegressionReport> regression_metrics(const std::vector<PredictionPair>& pairs);

// Fixed rendering: 1 decimal for the kcal metrics, 3 for R-squared.
std::string regression_to_text(const RegressionReport& report);

// Prediction file: "<record_id>\t<predicted>\t<actual>" per line.
Outcome<std::vector<PredictionPair>> parse_predictions(std::string_view text);

enum class JudgedTask { DishName, Ingredients, CookingMethod };
enum class JudgedWinner { ModelA, ModelB };

const char* judged_task_token(JudgedTask t);

struct Judgment {
    std::string record_id;
    JudgedTask task = JudgedTask::DishName;
    JudgedWinner winner = JudgedWinner::ModelA;
};

// Judgment file: "<record_id>\t<task>\t<a|b>" per line; no tie outcome, so
// the two win fractions always sum to one.
Outcome<std::vector<Judgment>> parse_judgments(std::string_view text);

struct WinRateRow {
    JudgedTask task = JudgedTask::DishName;
    std::uint64_t wins_a = 0;
    std::uint64_t wins_b = 0;
};

struct WinRateReport {
    std::vector<WinRateRow> rows;  // fixed task order, present tasks only
};

Outcome<WinRateReport> win_rate(const std::vector<Judgment>& judgments);

// Percentages at 1 decimal via exact rational rounding.
std::string win_rate_to_text(const WinRateReport& report);

}  // namespace foodprov
