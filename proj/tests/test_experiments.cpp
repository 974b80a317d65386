#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "isingnet/experiments.hpp"
#include "isingnet/io.hpp"

using namespace isingnet;

namespace {

ExperimentConfig tiny(SweepMode mode, std::vector<double> grid) {
    ExperimentConfig cfg;
    cfg.mode = mode;
    cfg.p = 8;
    cfg.n = 40;
    cfg.reps = 2;
    cfg.grid = std::move(grid);
    cfg.burn_in_sweeps = 50;
    cfg.thinning_sweeps = 2;
    cfg.collinearity_edge_prob = 0.3;
    cfg.seed = 42;
    return cfg;
}

ExperimentRecord sample_record(double condition) {
    ExperimentRecord r;
    r.condition = condition;
    r.reps = 3;
    r.recall = {0.1 + condition, 0.01};
    r.precision = {0.9, 0.02};
    r.l1_error_scaled = {1.0 / 3.0, 0.03};
    r.logistic_loss = {0.6931471805599453, 1e-17};
    r.zero_one_loss = {0.25, 0.0};
    r.realized_alpha = {condition, 0.001};
    r.gamma_g = {-1.2345678901234567e-18, 3e-19};
    r.l1_error_raw = 12.5;
    r.max_degenerate_fraction = 0.125;
    return r;
}

} // namespace

TEST_CASE("summaries") {
    const auto s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(summarize({7.0}) == Stat{7.0, 0.0});
    CHECK(summarize({}) == Stat{});
}

TEST_CASE("Spearman correlation") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // Monotone but nonlinear.
    CHECK(spearman({1, 2, 3, 4, 5}, {1, 4, 9, 16, 100}) == doctest::Approx(1.0));
    // Ranks (1,2,3,4,5) vs (3,4,5,2,1): 1 - 6*32/120.
    CHECK(spearman({1, 2, 3, 4, 5}, {0.3, 0.4, 0.5, 0.2, 0.1}) == doctest::Approx(-0.6));
    // Ties get average ranks: y ranks (1.5, 1.5, 3).
    CHECK(spearman({1, 2, 3}, {5, 5, 9}) == doctest::Approx(0.8660254037844386));
    CHECK(spearman({1, 2, 3}, {2, 2, 2}) == 0.0);
    CHECK_THROWS_AS(spearman({1}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(spearman({1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("config validation and presets") {
    auto cfg = tiny(SweepMode::Sparsity, {0.1});
    CHECK_NOTHROW(cfg.validate());
    cfg.reps = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = tiny(SweepMode::Sparsity, {});
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = tiny(SweepMode::Sparsity, {0.1, 1.5});
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = tiny(SweepMode::Sparsity, {0.1});
    cfg.p = 1;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    const auto full = ExperimentConfig::full(SweepMode::Sparsity);
    CHECK(full.p == 100);
    CHECK(full.n == 50);
    CHECK(full.reps == 100);
    const auto desk = ExperimentConfig::desk(SweepMode::Collinearity);
    CHECK(desk.p == 40);
    CHECK(desk.reps == 20);
    CHECK(desk.grid.front() == 0.0);
    CHECK(desk.grid.back() == 0.6);
}

TEST_CASE("one replication gives zero standard errors") {
    auto cfg = tiny(SweepMode::Sparsity, {0.2});
    cfg.reps = 1;
    const auto records = run_experiment(cfg);
    REQUIRE(records.size() == 1);
    CHECK(records[0].reps == 1);
    CHECK(records[0].recall.se == 0.0);
    CHECK(records[0].logistic_loss.se == 0.0);
    CHECK(records[0].realized_alpha.mean == 0.0);
    // The lone replication sets the scale.
    CHECK(records[0].l1_error_scaled.mean == doctest::Approx(records[0].l1_error_raw > 0.0 ? 1.0 : 0.0));
}

TEST_CASE("sweeps are deterministic and ordered by condition") {
    const auto cfg = tiny(SweepMode::Sparsity, {0.3, 0.1});
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    REQUIRE(a.size() == 2);
    CHECK(a == b);
    CHECK(a[0].condition == 0.1);
    CHECK(a[1].condition == 0.3);
    for (const auto& r : a) {
        CHECK(std::isfinite(r.recall.mean));
        CHECK(r.l1_error_scaled.mean <= 1.0);
        CHECK(r.recall.se >= 0.0);
    }

    auto threaded = cfg;
    threaded.threads = 3;
    CHECK(run_experiment(threaded) == a);
}

TEST_CASE("collinearity sweep records the realised copy fraction") {
    const auto cfg = tiny(SweepMode::Collinearity, {0.0, 0.5});
    const auto records = run_experiment(cfg);
    REQUIRE(records.size() == 2);
    CHECK(records[0].realized_alpha.mean == 0.0);
    CHECK(records[1].realized_alpha.mean > 0.0);
    CHECK(records[1].realized_alpha.mean <= 0.5);
    CHECK(run_experiment(cfg) == records);
}

TEST_CASE("result serialisation") {
    const std::vector<ExperimentRecord> records = {sample_record(0.05), sample_record(0.2)};
    CHECK(records_from_csv(records_to_csv(records)) == records);
    CHECK(records_from_json(records_to_json(records)) == records);

    const auto header_only = records_to_csv({});
    CHECK(header_only.find('\n') == header_only.size() - 1);
    CHECK(records_from_csv(header_only).empty());
    CHECK_THROWS_AS(records_from_csv("condition,reps\n"), std::invalid_argument);
    CHECK_THROWS_AS(records_from_csv(""), std::invalid_argument);

    const std::vector<std::string> expected = {
        "condition",          "reps",             "recall_mean",         "recall_se",
        "precision_mean",     "precision_se",     "l1_scaled_mean",      "l1_scaled_se",
        "logistic_loss_mean", "logistic_loss_se", "zero_one_loss_mean",  "zero_one_loss_se",
        "realized_alpha_mean", "realized_alpha_se", "gamma_g_mean",      "gamma_g_se",
        "l1_raw_mean",        "degenerate_max"};
    CHECK(result_columns() == expected);
    CHECK(header_only.rfind("condition,reps,recall_mean,recall_se,", 0) == 0);
}

TEST_CASE("emitted files are sorted and reload") {
    const auto dir = std::filesystem::temp_directory_path() / "isingnet_test_emit";
    std::filesystem::create_directories(dir);
    const std::vector<ExperimentRecord> records = {sample_record(0.4), sample_record(0.1)};
    emit_results(records, ResultFormat::Csv, dir / "r.csv");
    const auto back = records_from_csv(io::read_text(dir / "r.csv"));
    REQUIRE(back.size() == 2);
    CHECK(back[0] == records[1]);
    CHECK(back[1] == records[0]);
    emit_results(records, ResultFormat::Json, dir / "r.json");
    CHECK(records_from_json(io::read_text(dir / "r.json")).front().condition == 0.1);
    CHECK_THROWS_AS(emit_results(records, ResultFormat::Csv, dir / "missing" / "r.csv"), std::runtime_error);
    std::filesystem::remove_all(dir);
}
