#include "mlaudit/error.hpp"
#include "mlaudit/integrity.hpp"

#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"

#include <random>
#include <string>
#include <vector>

using namespace mlaudit;

namespace {

Dataset one_numeric_column(const std::vector<std::string>& cells,
                           const std::vector<std::string>& targets) {
    std::vector<std::vector<std::string>> records{{"f0", "target"}};
    for (std::size_t i = 0; i < cells.size(); ++i) {
        records.push_back({cells[i], targets[i]});
    }
    SchemaSpec spec;
    spec.target = "target";
    spec.feature_kinds["f0"] = FeatureKind::numeric;
    return load_dataset(fixtures::to_csv(records), spec);
}

SplitAssignment holdout(std::vector<int> membership) {
    SplitAssignment split;
    split.mode = SplitMode::holdout;
    split.membership = std::move(membership);
    return split;
}

SplitAssignment kfold(int folds, std::vector<int> membership) {
    SplitAssignment split;
    split.mode = SplitMode::kfold;
    split.fold_count = folds;
    split.membership = std::move(membership);
    return split;
}

} // namespace

TEST_CASE("split disjointness finds a duplicate spanning train and test") {
    const Dataset ds = one_numeric_column({"1.5", "2.5", "1.5", "3.5", "2.5"},
                                          {"0", "1", "1", "0", "1"});
    // rows 0 and 2 share features; targets differ but are not fingerprinted
    const auto report = check_split_disjoint(ds, holdout({0, 0, 2, 1, 0}));
    CHECK(report.leak_present);
    REQUIRE(report.collisions.size() == 1);
    const SplitCollision& hit = report.collisions[0];
    CHECK(hit.fingerprint.size() == 32);
    REQUIRE(hit.rows.size() == 2);
    CHECK(hit.rows.at(0) == std::vector<std::int64_t>{0});
    CHECK(hit.rows.at(2) == std::vector<std::int64_t>{2});
    // train 3, validation 1, test 1 -> 3*1 + 3*1 + 1*1
    CHECK(report.pairs_checked == 7);
    CHECK(report.pairs_checked == oracle::cross_group_pairs(holdout({0, 0, 2, 1, 0})));
}

TEST_CASE("duplicates confined to one fold are not leakage") {
    const Dataset ds = one_numeric_column({"1.5", "2.5", "1.5", "3.5", "2.5"},
                                          {"0", "1", "1", "0", "1"});
    const auto clean = check_fold_disjoint(ds, kfold(2, {0, 0, 0, 1, 0}));
    CHECK_FALSE(clean.leak_present);
    CHECK(clean.collisions.empty());
    CHECK(clean.pairs_checked == 4);

    const auto dirty = check_fold_disjoint(ds, kfold(2, {0, 0, 1, 1, 0}));
    CHECK(dirty.leak_present);
    REQUIRE(dirty.collisions.size() == 1);
    CHECK(dirty.collisions[0].rows.at(0) == std::vector<std::int64_t>{0});
    CHECK(dirty.collisions[0].rows.at(1) == std::vector<std::int64_t>{2});
}

TEST_CASE("rounding can merge near-duplicates into a leak") {
    const Dataset ds = one_numeric_column({"0.123", "0.124"}, {"0", "1"});
    CHECK_FALSE(check_split_disjoint(ds, holdout({0, 2})).leak_present);
    CHECK(check_split_disjoint(ds, holdout({0, 2}), 2).leak_present);
    CHECK_FALSE(check_split_disjoint(ds, holdout({0, 2}), 3).leak_present);
}

TEST_CASE("leakage checks reject the wrong split mode") {
    const Dataset ds = one_numeric_column({"1", "2"}, {"0", "1"});
    CHECK_THROWS_AS(check_split_disjoint(ds, kfold(2, {0, 1})), ModeError);
    CHECK_THROWS_AS(check_fold_disjoint(ds, holdout({0, 2})), ModeError);
    CHECK_THROWS_AS(check_split_disjoint(ds, holdout({0})), SplitError); // wrong size
}

TEST_CASE("leakage report matches the pairwise oracle") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 400; ++trial) {
        const Dataset ds = fixtures::random_dataset(rng, 40, trial % 6);
        const std::optional<int> rounding =
            trial % 3 == 0 ? std::optional<int>(trial % 4) : std::nullopt;

        SplitAssignment split;
        if (trial % 2 == 0) {
            split = fixtures::random_holdout(rng, ds.n());
        } else {
            const int folds = std::uniform_int_distribution<int>(2, 4)(rng);
            split.mode = SplitMode::kfold;
            split.fold_count = folds;
            split.membership.resize(static_cast<std::size_t>(ds.n()));
            std::uniform_int_distribution<int> pick(0, folds - 1);
            for (auto& m : split.membership) m = pick(rng);
        }

        const LeakageReport report = split.mode == SplitMode::holdout
                                         ? check_split_disjoint(ds, split, rounding)
                                         : check_fold_disjoint(ds, split, rounding);

        CHECK(report.leak_present == oracle::leak_present(ds, split, rounding));
        CHECK(report.pairs_checked == oracle::cross_group_pairs(split));

        // Collisions must be exactly the oracle's duplicate groups that span
        // two or more split groups, in first-row order.
        std::vector<std::vector<std::int64_t>> expected;
        for (const auto& group : oracle::duplicate_groups(ds, rounding)) {
            bool spans = false;
            for (std::size_t i = 1; i < group.size(); ++i) {
                spans = spans || split.membership[static_cast<std::size_t>(group[i])] !=
                                     split.membership[static_cast<std::size_t>(group[0])];
            }
            if (spans) expected.push_back(group);
        }
        REQUIRE(report.collisions.size() == expected.size());
        for (std::size_t g = 0; g < expected.size(); ++g) {
            std::vector<std::int64_t> flat;
            for (const auto& [label, rows] : report.collisions[g].rows) {
                for (std::int64_t row : rows) {
                    CHECK(split.membership[static_cast<std::size_t>(row)] == label);
                    flat.push_back(row);
                }
            }
            std::sort(flat.begin(), flat.end());
            std::vector<std::int64_t> want = expected[g];
            std::sort(want.begin(), want.end());
            CHECK(flat == want);
        }
    }
}

TEST_CASE("cluster fold assignment") {
    const auto split = kfold(2, {0, 0, 1, 1});

    std::map<std::int64_t, std::string> grouped = {{0, "a"}, {1, "a"}, {2, "b"}, {3, "b"}};
    CHECK(check_cluster_fold_assignment(grouped, split).empty());

    std::map<std::int64_t, std::string> torn = {{0, "a"}, {1, "b"}, {2, "a"}, {3, "b"}};
    const auto violations = check_cluster_fold_assignment(torn, split);
    REQUIRE(violations.size() == 2);
    CHECK(violations[0].cluster == "a");
    CHECK(violations[0].folds == std::vector<int>{0, 1});
    CHECK(violations[1].cluster == "b");

    std::map<std::int64_t, std::string> sparse = {{0, "a"}, {1, "a"}, {2, "b"}};
    CHECK_THROWS_AS(check_cluster_fold_assignment(sparse, split), InputError);

    // extra rows beyond the split are ignored
    grouped[99] = "z";
    CHECK(check_cluster_fold_assignment(grouped, split).empty());

    CHECK_THROWS_AS(check_cluster_fold_assignment(grouped, holdout({0, 0, 1, 2})), ModeError);
}

TEST_CASE("cluster file parsing") {
    const auto labels = parse_cluster_labels(R"({"clusters": {"0": "a", "1": 2}})");
    REQUIRE(labels.size() == 2);
    CHECK(labels.at(0) == "a");
    CHECK(labels.at(1) == "2"); // integer ids normalize to text

    CHECK_THROWS_AS(parse_cluster_labels("not json"), SchemaError);
    CHECK_THROWS_AS(parse_cluster_labels(R"({"rows": {}})"), SchemaError);
    CHECK_THROWS_AS(parse_cluster_labels(R"({"clusters": []})"), SchemaError);
    CHECK_THROWS_AS(parse_cluster_labels(R"({"clusters": {"x": "a"}})"), SchemaError);
    CHECK_THROWS_AS(parse_cluster_labels(R"({"clusters": {"0": true}})"), SchemaError);
    CHECK_THROWS_AS(parse_cluster_labels(R"({"clusters": {"0": "a", "00": "b"}})"),
                    SchemaError);
    CHECK_THROWS_AS(load_cluster_labels_file("/nonexistent/clusters.json"), InputError);
}

TEST_CASE("label-leak probe flags a feature that embeds the target") {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.5);
    std::vector<std::vector<std::string>> records{{"copy", "flat", "tag", "target"}};
    std::vector<int> membership;
    for (int i = 0; i < 60; ++i) {
        const int target = coin(rng) ? 1 : 0;
        records.push_back({target ? "1.0" : "0.0", "1.0", target ? "pos" : "neg",
                           std::to_string(target)});
        membership.push_back(i < 40 ? 0 : (i < 50 ? 1 : 2));
    }
    SchemaSpec spec;
    spec.target = "target";
    const Dataset ds = load_dataset(fixtures::to_csv(records), spec);

    const LabelLeakProbe probe = check_label_leakage(ds, holdout(membership));
    CHECK(probe.any_flagged());
    CHECK(probe.scored_label == static_cast<int>(SplitLabel::validation));
    CHECK(probe.scored_rows == 10);
    CHECK(probe.threshold == 0.99);
    CHECK(probe.margin == 0.05);
    REQUIRE(probe.features.size() == 3);
    CHECK(probe.features[0].feature == "copy");
    CHECK(probe.features[0].probe_accuracy == 1.0);
    CHECK(probe.features[0].flagged);
    CHECK(probe.features[1].feature == "flat");
    // a constant column can only reproduce the majority baseline
    CHECK(probe.features[1].probe_accuracy == probe.features[1].majority_baseline);
    CHECK_FALSE(probe.features[1].flagged);
    CHECK(probe.features[2].feature == "tag");
    CHECK(probe.features[2].flagged);
}

TEST_CASE("label-leak probe scores on test when there is no validation") {
    std::vector<std::vector<std::string>> records{{"f0", "target"}};
    std::vector<int> membership;
    for (int i = 0; i < 20; ++i) {
        const int target = i % 2;
        records.push_back({std::to_string(target), std::to_string(target)});
        membership.push_back(i < 15 ? 0 : 2);
    }
    SchemaSpec spec;
    spec.target = "target";
    const Dataset ds = load_dataset(fixtures::to_csv(records), spec);

    const LabelLeakProbe probe = check_label_leakage(ds, holdout(membership));
    CHECK(probe.scored_label == static_cast<int>(SplitLabel::test));
    CHECK(probe.scored_rows == 5);
    CHECK(probe.features[0].flagged);
}

TEST_CASE("label-leak probe falls back to the train majority on unseen values") {
    // train: a->0, a->0, b->1; validation: a->0 (hit), zzz->1 (fallback to 0, miss)
    std::vector<std::vector<std::string>> records{
        {"f0", "target"}, {"a", "0"}, {"a", "0"}, {"b", "1"}, {"a", "0"}, {"zzz", "1"},
    };
    SchemaSpec spec;
    spec.target = "target";
    const Dataset ds = load_dataset(fixtures::to_csv(records), spec);

    const LabelLeakProbe probe = check_label_leakage(ds, holdout({0, 0, 0, 1, 1}));
    CHECK(probe.features[0].probe_accuracy == 0.5);
    CHECK(probe.features[0].majority_baseline == 0.5);
    CHECK_FALSE(probe.features[0].flagged);
}

TEST_CASE("label-leak probe input validation") {
    std::vector<std::vector<std::string>> records{{"f0", "target"}};
    for (int i = 0; i < 6; ++i) {
        records.push_back({std::to_string(i), std::to_string(i % 2)});
    }
    SchemaSpec spec;
    spec.target = "target";
    const Dataset ds = load_dataset(fixtures::to_csv(records), spec);

    CHECK_THROWS_AS(check_label_leakage(ds, kfold(2, {0, 1, 0, 1, 0, 1})), ModeError);
    CHECK_THROWS_AS(check_label_leakage(ds, holdout({0, 0, 0, 0, 0, 0})), SplitError);
    CHECK_THROWS_AS(check_label_leakage(ds, holdout({2, 2, 2, 2, 2, 2})), SplitError);

    SchemaSpec reg = spec;
    reg.task = TaskKind::regression;
    std::vector<std::vector<std::string>> real_records{{"f0", "target"}};
    for (int i = 0; i < 6; ++i) {
        real_records.push_back({std::to_string(i), std::to_string(i) + ".5"});
    }
    const Dataset rds = load_dataset(fixtures::to_csv(real_records), reg);
    CHECK_THROWS_AS(check_label_leakage(rds, holdout({0, 0, 0, 0, 1, 1})), TaskError);
}

TEST_CASE("metric advisory warns on accuracy with a rare minority class") {
    ClassDistribution dist;
    dist.counts = {9900, 100};
    dist.n = 10000;

    const MetricAdvisory warn = check_metric_appropriateness(
        TaskKind::binary_classification, dist, "accuracy");
    CHECK(warn.status == AdvisoryStatus::WARN);
    CHECK(warn.metric == "accuracy");
    CHECK(warn.minority_proportion == doctest::Approx(0.01));
    CHECK(warn.baseline_accuracy == doctest::Approx(0.99));
    CHECK(warn.recommendation.find("recall") != std::string::npos);
    CHECK(warn.recommendation.find("0.99") != std::string::npos);

    const MetricAdvisory other = check_metric_appropriateness(
        TaskKind::binary_classification, dist, "balanced_accuracy");
    CHECK(other.status == AdvisoryStatus::PASS);
    CHECK(other.recommendation.empty());
}

TEST_CASE("metric advisory boundary is exclusive") {
    ClassDistribution dist;
    dist.counts = {900, 100};
    dist.n = 1000;
    const MetricAdvisory at = check_metric_appropriateness(
        TaskKind::binary_classification, dist, "accuracy", 0.1);
    CHECK(at.status == AdvisoryStatus::PASS); // 0.1 is not < 0.1

    const MetricAdvisory below = check_metric_appropriateness(
        TaskKind::binary_classification, dist, "accuracy", 0.11);
    CHECK(below.status == AdvisoryStatus::WARN);

    CHECK_THROWS_AS(
        check_metric_appropriateness(TaskKind::regression, dist, "accuracy"),
        TaskError);
}
