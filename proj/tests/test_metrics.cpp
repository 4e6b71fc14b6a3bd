#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "foodprov/metrics.hpp"
#include "foodprov/schema.hpp"

using namespace foodprov;

namespace {

EventDraft draft(EventKind kind, const std::string& subject, FieldMap payload) {
    EventDraft d;
    d.kind = kind;
    d.wallet = wallet_from_label("funnel:" + subject);
    d.timestamp_ms = 1;
    d.subject = subject;
    d.role_credit = "provider";
    d.payload = std::move(payload);
    return d;
}

FieldMap verification(const char* stage, const char* verdict, const char* ms) {
    return {{"review_ms", ms}, {"stage", stage}, {"verdict", verdict}};
}

}  // namespace

TEST_CASE("counter consistency is the funnel ordering") {
    CHECK(counters_consistent({}));
    CHECK(counters_consistent({10, 5, 2, 0, 0, 0}));
    CHECK(counters_consistent({10, 10, 10, 0, 0, 0}));
    CHECK_FALSE(counters_consistent({10, 11, 2, 0, 0, 0}));
    CHECK_FALSE(counters_consistent({10, 5, 6, 0, 0, 0}));
}

TEST_CASE("funnel ratios render as exact 4-decimal rationals") {
    FunnelCounters c;
    c.arrived = 1000;
    c.accepted = 630;
    c.adopted = 300;
    c.review_time_total_ms = 150000;
    c.review_count = 100;
    c.cost_per_review_micro = 2000000;

    const FunnelReport report = funnel(c);
    CHECK(report.undefined_ratios.empty());
    CHECK(report.ac_over_a.rendered == "0.6300");
    CHECK(report.ad_over_ac.rendered == "0.4762");  // 10/21 rounded half away
    CHECK(report.mean_review_ms.rendered == "1500.0000");
    CHECK(report.cost_per_adopted_micro.rendered == "666666.6667");
}

TEST_CASE("zero denominators flag instead of fail") {
    SUBCASE("everything zero") {
        const FunnelReport report = funnel({});
        CHECK_FALSE(report.ac_over_a.defined);
        CHECK_FALSE(report.ad_over_ac.defined);
        CHECK(report.undefined_ratios ==
              std::vector<std::string>{"AC/A", "AD/AC", "mean_review_ms",
                                       "cost_per_adopted"});
    }
    SUBCASE("arrivals but nothing accepted") {
        FunnelCounters c;
        c.arrived = 5;
        c.review_count = 2;
        c.review_time_total_ms = 100;
        const FunnelReport report = funnel(c);
        CHECK(report.ac_over_a.rendered == "0.0000");
        CHECK(report.mean_review_ms.rendered == "50.0000");
        CHECK(report.undefined_ratios ==
              std::vector<std::string>{"AD/AC", "cost_per_adopted"});
    }
}

TEST_CASE("funnel text pairs every counter with its ratio") {
    FunnelCounters c;
    c.arrived = 4;
    c.accepted = 2;
    c.adopted = 1;
    c.review_time_total_ms = 900;
    c.review_count = 6;
    c.cost_per_review_micro = 500000;
    CHECK(funnel_to_text(c, funnel(c)) ==
          "A\t4\n"
          "AC\t2\n"
          "AD\t1\n"
          "AC/A\t0.5000\n"
          "AD/AC\t0.5000\n"
          "review_count\t6\n"
          "review_time_total_ms\t900\n"
          "mean_review_ms\t150.0000\n"
          "cost_per_adopted\t3000000.0000\n");

    const FunnelCounters empty{};
    const std::string text = funnel_to_text(empty, funnel(empty));
    CHECK(text.find("AC/A\tundefined\n") != std::string::npos);
    CHECK(text.find("cost_per_adopted\tundefined\n") != std::string::npos);
}

TEST_CASE("funnel counters reconstruct from ledger events") {
    Ledger ledger{LedgerConfig{1024, 1024}};
    auto add = [&ledger](EventDraft d) { REQUIRE(ledger.append(std::move(d)).ok()); };

    for (const char* id : {"s-1", "s-2", "s-3"}) {
        add(draft(EventKind::Sourcing, id, {{"domain", "packaged"}, {"image", "ab"}}));
    }
    add(draft(EventKind::Annotation, "s-1", {{"level", "2"}}));
    add(draft(EventKind::Verification, "s-1", verification("initial", "pass", "100")));
    add(draft(EventKind::Verification, "s-1", verification("final", "pass", "200")));
    add(draft(EventKind::Verification, "s-2", verification("initial", "pass", "300")));
    add(draft(EventKind::Verification, "s-2", verification("final", "fail", "400")));
    add(draft(EventKind::Verification, "s-3", verification("initial", "fail", "500")));
    // resubmission path: a second final pass for the same subject counts once
    add(draft(EventKind::Verification, "s-1", verification("final", "pass", "x9")));
    add(draft(EventKind::Adoption, "s-1", {{"release", "rel-1"}}));

    const FunnelCounters c = funnel_from_ledger(ledger, 700);
    CHECK(c.arrived == 3);
    CHECK(c.accepted == 1);
    CHECK(c.adopted == 1);
    CHECK(c.review_count == 6);
    CHECK(c.review_time_total_ms == 1500);  // the malformed "x9" adds nothing
    CHECK(c.cost_per_review_micro == 700);
    CHECK(counters_consistent(c));
}

TEST_CASE("regression metrics match a hand-worked example") {
    const std::vector<PredictionPair> pairs = {{2, 1}, {3, 5}, {4, 3}};
    const RegressionReport report = regression_metrics(pairs).value();
    CHECK(report.n == 3);
    CHECK(report.mae == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(report.rmse == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    REQUIRE(report.r2.has_value());
    CHECK(*report.r2 == doctest::Approx(0.25).epsilon(1e-12));

    CHECK(regression_to_text(report) ==
          "n\t3\n"
          "mae\t1.3\n"
          "rmse\t1.4\n"
          "r2\t0.250\n");
}

TEST_CASE("regression metrics agree with an independent accumulation") {
    std::mt19937_64 gen(20240817);
    std::uniform_real_distribution<double> actual_dist(50.0, 900.0);
    std::normal_distribution<double> noise(0.0, 35.0);
    std::vector<PredictionPair> pairs;
    for (int i = 0; i < 500; ++i) {
        const double actual = actual_dist(gen);
        pairs.push_back(PredictionPair{actual + noise(gen), actual});
    }

    long double abs_sum = 0, sq_sum = 0, mean = 0;
    for (const auto& p : pairs) mean += p.actual;
    mean /= pairs.size();
    long double ss_tot = 0;
    for (const auto& p : pairs) {
        abs_sum += std::fabs((long double)p.predicted - p.actual);
        sq_sum += ((long double)p.predicted - p.actual) * ((long double)p.predicted - p.actual);
        ss_tot += ((long double)p.actual - mean) * ((long double)p.actual - mean);
    }
    const double want_mae = (double)(abs_sum / pairs.size());
    const double want_rmse = std::sqrt((double)(sq_sum / pairs.size()));
    const double want_r2 = (double)(1.0L - sq_sum / ss_tot);

    const RegressionReport report = regression_metrics(pairs).value();
    CHECK(report.mae == doctest::Approx(want_mae).epsilon(1e-9));
    CHECK(report.rmse == doctest::Approx(want_rmse).epsilon(1e-9));
    CHECK(*report.r2 == doctest::Approx(want_r2).epsilon(1e-9));
    CHECK(report.rmse >= report.mae);  // quadratic mean dominates
}

TEST_CASE("regression edge cases") {
    CHECK(regression_metrics({}).error().code == ErrorCode::DivisionByZero);

    SUBCASE("perfect predictions") {
        const RegressionReport r =
            regression_metrics({{1, 1}, {2, 2}, {3, 3}}).value();
        CHECK(r.mae == 0.0);
        CHECK(r.rmse == 0.0);
        CHECK(*r.r2 == doctest::Approx(1.0));
    }
    SUBCASE("constant target has no variance to explain") {
        const RegressionReport r =
            regression_metrics({{4, 5}, {6, 5}, {5, 5}}).value();
        CHECK_FALSE(r.r2.has_value());
        CHECK(r.mae == doctest::Approx(2.0 / 3.0));
        CHECK(regression_to_text(r).find("r2\tundefined\tZERO_VARIANCE\n") !=
              std::string::npos);
    }
}

TEST_CASE("prediction files parse and reject bad numbers") {
    const std::string good =
        "# kcal predictions\n"
        "r-1\t210.5\t200\n"
        "\n"
        "r-2\t95\t110.25\n";
    const auto pairs = parse_predictions(good).value();
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].predicted == doctest::Approx(210.5));
    CHECK(pairs[0].actual == doctest::Approx(200.0));
    CHECK(pairs[1].actual == doctest::Approx(110.25));

    CHECK(parse_predictions("r-1\t210.5\n").error().position == 1);
    CHECK(parse_predictions("# ok\nr-1\t1.2.3\t5\n").error().position == 2);
    CHECK(parse_predictions("r-1\t1\tinf\n").error().message == "non-finite number");
    CHECK(parse_predictions("r-1\tnan\t5\n").error().code == ErrorCode::ParseError);
}

TEST_CASE("judgment files parse with strict winners") {
    const std::string good =
        "# pairwise\n"
        "r-1\tdish_name\ta\n"
        "r-2\tingredients\tb\n"
        "r-3\tdish_name\tb\n";
    const auto judgments = parse_judgments(good).value();
    REQUIRE(judgments.size() == 3);
    CHECK(judgments[0].task == JudgedTask::DishName);
    CHECK(judgments[0].winner == JudgedWinner::ModelA);
    CHECK(judgments[1].task == JudgedTask::Ingredients);
    CHECK(judgments[2].winner == JudgedWinner::ModelB);

    CHECK(parse_judgments("r-1\tplating\ta\n").error().message.find("unknown task") !=
          std::string::npos);
    const auto tie = parse_judgments("r-1\tdish_name\ttie\n");
    CHECK(tie.error().position == 1);
    CHECK(tie.error().message.find("'a' or 'b'") != std::string::npos);
    CHECK(parse_judgments("r-1\tdish_name\n").error().code == ErrorCode::ParseError);
}

TEST_CASE("win rates tally per task and render complementary percentages") {
    std::vector<Judgment> judgments;
    auto add = [&judgments](JudgedTask task, JudgedWinner winner, int count) {
        for (int i = 0; i < count; ++i) {
            judgments.push_back({"r-" + std::to_string(judgments.size()), task, winner});
        }
    };
    add(JudgedTask::DishName, JudgedWinner::ModelA, 421);
    add(JudgedTask::DishName, JudgedWinner::ModelB, 579);
    add(JudgedTask::CookingMethod, JudgedWinner::ModelA, 1);
    add(JudgedTask::CookingMethod, JudgedWinner::ModelB, 2);

    const WinRateReport report = win_rate(judgments).value();
    REQUIRE(report.rows.size() == 2);  // no ingredients judgments: row omitted
    CHECK(report.rows[0].task == JudgedTask::DishName);
    CHECK(report.rows[0].wins_a == 421);
    CHECK(report.rows[0].wins_b == 579);
    CHECK(report.rows[1].task == JudgedTask::CookingMethod);

    CHECK(win_rate_to_text(report) ==
          "win_rate\tdish_name\t42.1\t57.9\n"
          "win_rate\tcooking_method\t33.3\t66.7\n");

    CHECK(win_rate({}).error().code == ErrorCode::EmptyTask);
}

TEST_CASE("win rate counts are conserved under shuffling") {
    std::vector<Judgment> judgments;
    std::mt19937_64 gen(7);
    for (int i = 0; i < 900; ++i) {
        judgments.push_back({"r-" + std::to_string(i),
                             static_cast<JudgedTask>(gen() % 3),
                             static_cast<JudgedWinner>(gen() % 2)});
    }
    const WinRateReport before = win_rate(judgments).value();
    std::shuffle(judgments.begin(), judgments.end(), gen);
    const WinRateReport after = win_rate(judgments).value();

    std::uint64_t total = 0;
    REQUIRE(before.rows.size() == after.rows.size());
    for (std::size_t i = 0; i < before.rows.size(); ++i) {
        CHECK(before.rows[i].task == after.rows[i].task);
        CHECK(before.rows[i].wins_a == after.rows[i].wins_a);
        CHECK(before.rows[i].wins_b == after.rows[i].wins_b);
        total += before.rows[i].wins_a + before.rows[i].wins_b;
    }
    CHECK(total == judgments.size());
}
