#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mlaudit {

/// Marker for an absent feature cell (empty CSV cell).
struct Missing {
    bool operator==(const Missing&) const = default;
};

/// A feature cell: finite real, text token, or missing.
using FeatureValue = std::variant<double, std::string, Missing>;

/// Target of a row: class label for classification, real for regression.
/// Never missing, never NaN/infinite (enforced at load).
using Target = std::variant<std::int64_t, double>;

enum class TaskKind {
    binary_classification,
    multiclass_classification,
    multilabel_classification,
    regression,
};

bool is_classification(TaskKind task);
std::string to_string(TaskKind task);
TaskKind task_kind_from_string(const std::string& name);

enum class FeatureKind { numeric, text };

/// Column declarations accompanying a CSV source. Mirrors the schema JSON:
/// {"target": name, "task": kind, "k": int?, "temporal_column": name?,
///  "features": {name: "numeric"|"text"}?}
struct SchemaSpec {
    std::string target;
    TaskKind task = TaskKind::binary_classification;
    int k = 2; // class count for classification tasks
    std::optional<std::string> temporal_column;
    std::map<std::string, FeatureKind> feature_kinds; // optional overrides
};

SchemaSpec parse_schema_spec(const std::string& json_text);
SchemaSpec load_schema_spec_file(const std::string& path);

/// Resolved schema of a loaded dataset: ordered feature columns with their
/// kinds, plus the target declaration.
struct Schema {
    std::vector<std::string> feature_names;
    std::vector<FeatureKind> feature_kinds;
    std::string target_name;
    TaskKind task = TaskKind::binary_classification;
    int k = 2;
    std::optional<std::size_t> temporal_index; // into feature columns

    std::size_t arity() const { return feature_names.size(); }
};

struct DataPoint {
    std::vector<FeatureValue> features;
    Target target;
    std::int64_t row_id = 0; // position in source
};

/// Immutable after construction; row_ids are exactly 0..n-1 in file order.
struct Dataset {
    Schema schema;
    std::vector<DataPoint> rows;

    std::int64_t n() const { return static_cast<std::int64_t>(rows.size()); }
};

/// Parses an in-memory CSV document (UTF-8, mandatory header row, comma
/// separator, RFC-4180 quoting; empty cell = missing). Feature columns not
/// declared in the spec are numeric when every non-missing cell parses as a
/// finite real, text otherwise.
Dataset load_dataset(std::string_view csv, const SchemaSpec& spec);
Dataset load_dataset_file(const std::string& path, const SchemaSpec& spec);

/// Raw CSV records (same lexer as load_dataset, header not interpreted).
std::vector<std::vector<std::string>> parse_csv_table(std::string_view csv);

/// Per-class row counts for a classification dataset.
struct ClassDistribution {
    std::vector<std::int64_t> counts; // indexed by class 0..k-1
    std::int64_t n = 0;

    double minority_proportion() const;
    double majority_proportion() const;
    std::int64_t majority_class() const; // ties -> smaller label
};

ClassDistribution class_distribution(const Dataset& dataset);

} // namespace mlaudit
