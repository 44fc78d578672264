#include "mlaudit/dataset.hpp"
#include "mlaudit/error.hpp"
#include "mlaudit/fingerprint.hpp"

#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"

#include <random>

using namespace mlaudit;

namespace {

DataPoint row(std::vector<FeatureValue> features) {
    DataPoint point;
    point.features = std::move(features);
    return point;
}

} // namespace

TEST_CASE("fingerprint ignores the target and row id") {
    DataPoint a = row({1.5, std::string("x")});
    DataPoint b = row({1.5, std::string("x")});
    a.target = std::int64_t{0};
    b.target = std::int64_t{1};
    a.row_id = 3;
    b.row_id = 9;
    CHECK(fingerprint_row(a) == fingerprint_row(b));
}

TEST_CASE("fingerprint separates kinds and adjacent cells") {
    // numeric 1 vs text "1"
    CHECK(fingerprint_row(row({1.0})) != fingerprint_row(row({std::string("1")})));
    // missing vs empty text
    CHECK(fingerprint_row(row({Missing{}})) != fingerprint_row(row({std::string("")})));
    // cell boundaries must not blur: ("ab","c") vs ("a","bc")
    CHECK(fingerprint_row(row({std::string("ab"), std::string("c")})) !=
          fingerprint_row(row({std::string("a"), std::string("bc")})));
    // arity matters
    CHECK(fingerprint_row(row({1.0})) != fingerprint_row(row({1.0, Missing{}})));
}

TEST_CASE("negative zero canonicalizes to zero") {
    CHECK(fingerprint_row(row({0.0})) == fingerprint_row(row({-0.0})));
    CHECK(fingerprint_row(row({-0.0001}), 3) == fingerprint_row(row({0.0}), 3));
}

TEST_CASE("rounding merges near-duplicates at the stated precision only") {
    const DataPoint a = row({0.123});
    const DataPoint b = row({0.124});
    CHECK(fingerprint_row(a, 2) == fingerprint_row(b, 2));
    CHECK(fingerprint_row(a, 3) != fingerprint_row(b, 3));
    CHECK(fingerprint_row(a) != fingerprint_row(b));
}

TEST_CASE("duplicate census on a hand-built dataset") {
    SchemaSpec spec;
    spec.target = "y";
    spec.task = TaskKind::binary_classification;
    const Dataset ds = load_dataset(
        "a,b,y\n"
        "1,x,0\n"
        "2,x,0\n"
        "1,x,1\n" // duplicate of row 0 despite the different target
        "2,x,1\n" // duplicate of row 1
        "3,x,0\n"
        "1,x,0\n", // third copy of row 0
        spec);
    const auto groups = duplicate_census(ds);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].row_ids == std::vector<std::int64_t>{0, 2, 5});
    CHECK(groups[1].row_ids == std::vector<std::int64_t>{1, 3});
    CHECK(groups[0].digest_hex != groups[1].digest_hex);
    CHECK(groups[0].digest_hex.size() == 32);
}

TEST_CASE("census equals the pairwise oracle on random datasets") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 300; ++trial) {
        const Dataset ds = fixtures::random_dataset(rng, 60, trial % 5);
        const std::optional<int> rounding =
            (trial % 3 == 0) ? std::optional<int>(trial % 4) : std::nullopt;
        const auto census = duplicate_census(ds, rounding);
        const auto expected = oracle::duplicate_groups(ds, rounding);
        REQUIRE(census.size() == expected.size());
        for (std::size_t g = 0; g < census.size(); ++g) {
            CHECK(census[g].row_ids == expected[g]);
        }
    }
}
