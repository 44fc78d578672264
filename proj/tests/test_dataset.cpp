#include "mlaudit/dataset.hpp"
#include "mlaudit/error.hpp"

#include <doctest.h>

#include <string>
#include <variant>

using namespace mlaudit;

namespace {

SchemaSpec binary_spec(const std::string& target = "y") {
    SchemaSpec spec;
    spec.target = target;
    spec.task = TaskKind::binary_classification;
    spec.k = 2;
    return spec;
}

} // namespace

TEST_CASE("csv ingestion with quoting, CRLF and missing cells") {
    const std::string csv =
        "name,score,y\r\n"
        "\"comma, inside\",1.5,0\r\n"
        "\"escaped \"\" quote\",2.5,1\n"
        ",0.5,1\n"
        "\"multi\nline\",,0\n";
    const Dataset ds = load_dataset(csv, binary_spec());

    REQUIRE(ds.n() == 4);
    CHECK(ds.schema.feature_names == std::vector<std::string>{"name", "score"});
    CHECK(ds.schema.feature_kinds[0] == FeatureKind::text);
    CHECK(ds.schema.feature_kinds[1] == FeatureKind::numeric);

    CHECK(std::get<std::string>(ds.rows[0].features[0]) == "comma, inside");
    CHECK(std::get<std::string>(ds.rows[1].features[0]) == "escaped \" quote");
    CHECK(std::holds_alternative<Missing>(ds.rows[2].features[0]));
    CHECK(std::get<std::string>(ds.rows[3].features[0]) == "multi\nline");
    CHECK(std::holds_alternative<Missing>(ds.rows[3].features[1]));
    CHECK(std::get<double>(ds.rows[0].features[1]) == 1.5);
    CHECK(std::get<std::int64_t>(ds.rows[1].target) == 1);

    for (std::int64_t i = 0; i < ds.n(); ++i) {
        CHECK(ds.rows[i].row_id == i);
    }
}

TEST_CASE("column kind inference: one non-numeric cell makes the column text") {
    const Dataset ds = load_dataset("a,y\n1.5,0\nnope,1\n", binary_spec());
    CHECK(ds.schema.feature_kinds[0] == FeatureKind::text);
    CHECK(std::get<std::string>(ds.rows[0].features[0]) == "1.5");
}

TEST_CASE("declared kinds override inference both ways") {
    SchemaSpec spec = binary_spec();
    spec.feature_kinds["a"] = FeatureKind::text;
    const Dataset ds = load_dataset("a,y\n1,0\n2,1\n", spec);
    CHECK(ds.schema.feature_kinds[0] == FeatureKind::text);
    CHECK(std::get<std::string>(ds.rows[0].features[0]) == "1");

    SchemaSpec numeric = binary_spec();
    numeric.feature_kinds["a"] = FeatureKind::numeric;
    CHECK_THROWS_AS(load_dataset("a,y\nx,0\n", numeric), InputError);
}

TEST_CASE("loader input errors") {
    CHECK_THROWS_AS(load_dataset("", binary_spec()), InputError);            // empty document
    CHECK_THROWS_AS(load_dataset("a,y\n", binary_spec()), InputError);       // no data rows
    CHECK_THROWS_AS(load_dataset("a,y\n1,0,9\n", binary_spec()), InputError); // ragged row
    CHECK_THROWS_AS(load_dataset("a,y\n\"open,0\n", binary_spec()), InputError); // bad quote
    CHECK_THROWS_AS(load_dataset("a,b\n1,0\n", binary_spec()), SchemaError); // no target col
    CHECK_THROWS_AS(load_dataset("a,y\n1,\n", binary_spec()), InputError);   // missing target
    CHECK_THROWS_AS(load_dataset("a,y\n1,nan\n", binary_spec()), InputError); // non-finite
    CHECK_THROWS_AS(load_dataset("a,y\n1,2\n", binary_spec()), InputError);  // label out of 0..1
    CHECK_THROWS_AS(load_dataset("a,y\n1,0.5\n", binary_spec()), InputError); // fractional label
}

TEST_CASE("multiclass labels validated against k") {
    SchemaSpec spec;
    spec.target = "y";
    spec.task = TaskKind::multiclass_classification;
    spec.k = 3;
    const Dataset ds = load_dataset("a,y\n1,2\n2,0\n", spec);
    CHECK(std::get<std::int64_t>(ds.rows[0].target) == 2);
    CHECK_THROWS_AS(load_dataset("a,y\n1,3\n", spec), InputError);
}

TEST_CASE("regression targets are reals") {
    SchemaSpec spec;
    spec.target = "y";
    spec.task = TaskKind::regression;
    const Dataset ds = load_dataset("a,y\n1,-2.75\n", spec);
    CHECK(std::get<double>(ds.rows[0].target) == -2.75);
}

TEST_CASE("schema spec JSON parsing and validation") {
    const SchemaSpec spec = parse_schema_spec(
        R"({"task":"multiclass_classification","target":"label","k":4,
            "temporal_column":"t","features":{"a":"numeric","b":"text"}})");
    CHECK(spec.task == TaskKind::multiclass_classification);
    CHECK(spec.k == 4);
    CHECK(spec.target == "label");
    CHECK(spec.temporal_column == "t");
    CHECK(spec.feature_kinds.at("a") == FeatureKind::numeric);
    CHECK(spec.feature_kinds.at("b") == FeatureKind::text);

    CHECK_THROWS_AS(parse_schema_spec("not json"), SchemaError);
    CHECK_THROWS_AS(parse_schema_spec(R"({"task":"binary_classification"})"), SchemaError);
    CHECK_THROWS_AS(parse_schema_spec(R"({"task":"juggling","target":"y"})"), SchemaError);
    CHECK_THROWS_AS(parse_schema_spec(R"({"task":"multiclass_classification","target":"y"})"),
                    SchemaError);
    CHECK_THROWS_AS(
        parse_schema_spec(R"({"task":"multiclass_classification","target":"y","k":1})"),
        SchemaError);
    CHECK_THROWS_AS(
        parse_schema_spec(R"({"task":"binary_classification","target":"y","k":3})"),
        SchemaError);
    CHECK_THROWS_AS(
        parse_schema_spec(R"({"task":"multilabel_classification","target":"y","k":3})"),
        SchemaError);
    CHECK_THROWS_AS(
        parse_schema_spec(R"({"task":"binary_classification","target":"y",
                              "features":{"a":"fancy"}})"),
        SchemaError);
}

TEST_CASE("temporal column must exist and differ from the target") {
    SchemaSpec spec = binary_spec();
    spec.temporal_column = "t";
    CHECK_THROWS_AS(load_dataset("a,y\n1,0\n", spec), SchemaError);
    spec.temporal_column = "y";
    CHECK_THROWS_AS(load_dataset("a,y\n1,0\n", spec), SchemaError);

    spec.temporal_column = "t";
    const Dataset ds = load_dataset("a,t,y\n1,5,0\n2,6,1\n", spec);
    REQUIRE(ds.schema.temporal_index.has_value());
    CHECK(ds.schema.feature_names[*ds.schema.temporal_index] == "t");
}

TEST_CASE("class distribution counts and proportions") {
    const Dataset ds = load_dataset("a,y\n1,0\n2,0\n3,0\n4,1\n", binary_spec());
    const ClassDistribution dist = class_distribution(ds);
    CHECK(dist.n == 4);
    CHECK(dist.counts == std::vector<std::int64_t>{3, 1});
    CHECK(dist.minority_proportion() == doctest::Approx(0.25));
    CHECK(dist.majority_proportion() == doctest::Approx(0.75));
    CHECK(dist.majority_class() == 0);

    SchemaSpec reg;
    reg.target = "y";
    reg.task = TaskKind::regression;
    const Dataset rds = load_dataset("a,y\n1,0.5\n", reg);
    CHECK_THROWS_AS(class_distribution(rds), TaskError);
}

TEST_CASE("majority class ties resolve to the smaller label") {
    const Dataset ds = load_dataset("a,y\n1,0\n2,1\n", binary_spec());
    CHECK(class_distribution(ds).majority_class() == 0);
}

TEST_CASE("parse_csv_table exposes raw records") {
    const auto records = parse_csv_table("h1,h2\n\"a,b\",2\n");
    REQUIRE(records.size() == 2);
    CHECK(records[0] == std::vector<std::string>{"h1", "h2"});
    CHECK(records[1] == std::vector<std::string>{"a,b", "2"});
}
