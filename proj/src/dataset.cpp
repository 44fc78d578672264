#include "mlaudit/dataset.hpp"

#include "mlaudit/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace mlaudit {

bool is_classification(TaskKind task) {
    return task != TaskKind::regression;
}

std::string to_string(TaskKind task) {
    switch (task) {
    case TaskKind::binary_classification: return "binary_classification";
    case TaskKind::multiclass_classification: return "multiclass_classification";
    case TaskKind::multilabel_classification: return "multilabel_classification";
    case TaskKind::regression: return "regression";
    }
    return "?";
}

TaskKind task_kind_from_string(const std::string& name) {
    if (name == "binary_classification" || name == "binary") {
        return TaskKind::binary_classification;
    }
    if (name == "multiclass_classification" || name == "multiclass") {
        return TaskKind::multiclass_classification;
    }
    if (name == "multilabel_classification" || name == "multilabel") {
        return TaskKind::multilabel_classification;
    }
    if (name == "regression") {
        return TaskKind::regression;
    }
    throw SchemaError("unknown task kind '" + name + "'");
}

SchemaSpec parse_schema_spec(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("schema spec is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("target") || !doc.contains("task")) {
        throw SchemaError("schema spec must be an object with 'target' and 'task'");
    }
    SchemaSpec spec;
    spec.target = doc.at("target").get<std::string>();
    spec.task = task_kind_from_string(doc.at("task").get<std::string>());
    if (spec.task == TaskKind::multilabel_classification) {
        throw SchemaError("multilabel datasets are not supported for CSV ingestion");
    }
    if (doc.contains("k")) {
        spec.k = doc.at("k").get<int>();
    } else if (spec.task == TaskKind::binary_classification) {
        spec.k = 2;
    } else if (spec.task == TaskKind::multiclass_classification) {
        throw SchemaError("multiclass schema requires 'k'");
    }
    if (is_classification(spec.task)) {
        if (spec.k < 2) {
            throw SchemaError("class count k must be >= 2");
        }
        if (spec.task == TaskKind::binary_classification && spec.k != 2) {
            throw SchemaError("binary task requires k = 2");
        }
    }
    if (doc.contains("temporal_column")) {
        spec.temporal_column = doc.at("temporal_column").get<std::string>();
    }
    if (doc.contains("features")) {
        for (const auto& [name, kind] : doc.at("features").items()) {
            const std::string k = kind.get<std::string>();
            if (k == "numeric") {
                spec.feature_kinds[name] = FeatureKind::numeric;
            } else if (k == "text") {
                spec.feature_kinds[name] = FeatureKind::text;
            } else {
                throw SchemaError("feature kind must be 'numeric' or 'text', got '" + k + "'");
            }
        }
    }
    return spec;
}

SchemaSpec load_schema_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open schema file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_schema_spec(buf.str());
}

namespace {

// RFC-4180 field lexer over the whole document. Quoted fields may contain
// commas, escaped quotes ("") and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool any_char = false;

    // Strip a UTF-8 BOM if present.
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
        text.remove_prefix(3);
    }

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
        any_char = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            any_char = true;
            break;
        case ',':
            end_field();
            any_char = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') {
                ++i;
            }
            end_record();
            break;
        case '\n':
            end_record();
            break;
        default:
            field += c;
            any_char = true;
            break;
        }
    }
    if (in_quotes) {
        throw InputError("unterminated quoted CSV field");
    }
    if (any_char || !field.empty() || !record.empty()) {
        end_record();
    }
    return records;
}

std::optional<double> parse_finite_real(const std::string& cell) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

} // namespace

Dataset load_dataset(std::string_view csv, const SchemaSpec& spec) {
    auto records = parse_csv(csv);
    if (records.empty()) {
        throw InputError("empty CSV document");
    }
    const auto& header = records.front();

    Schema schema;
    schema.task = spec.task;
    schema.k = is_classification(spec.task) ? spec.k : 0;
    schema.target_name = spec.target;

    std::size_t target_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == spec.target) {
            target_col = c;
        }
    }
    if (target_col == header.size()) {
        throw SchemaError("target column '" + spec.target + "' not found in CSV header");
    }
    if (spec.temporal_column && *spec.temporal_column == spec.target) {
        throw SchemaError("temporal column must not be the target column");
    }

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == target_col) {
            continue;
        }
        feature_cols.push_back(c);
        schema.feature_names.push_back(header[c]);
    }
    for (const auto& [name, kind] : spec.feature_kinds) {
        (void)kind;
        if (std::find(schema.feature_names.begin(), schema.feature_names.end(), name) ==
            schema.feature_names.end()) {
            throw SchemaError("declared feature column '" + name + "' not found in CSV header");
        }
    }
    if (spec.temporal_column) {
        auto it = std::find(schema.feature_names.begin(), schema.feature_names.end(),
                            *spec.temporal_column);
        if (it == schema.feature_names.end()) {
            throw SchemaError("temporal column '" + *spec.temporal_column +
                              "' not found in CSV header");
        }
        schema.temporal_index = static_cast<std::size_t>(it - schema.feature_names.begin());
    }

    if (records.size() == 1) {
        throw InputError("CSV has a header but no data rows");
    }

    const std::size_t n = records.size() - 1;
    const std::size_t arity = feature_cols.size();

    // Column kind resolution: declared kind wins; otherwise numeric iff every
    // non-missing cell parses as a finite real.
    std::vector<FeatureKind> kinds(arity, FeatureKind::numeric);
    for (std::size_t f = 0; f < arity; ++f) {
        const std::string& name = schema.feature_names[f];
        auto declared = spec.feature_kinds.find(name);
        if (declared != spec.feature_kinds.end()) {
            kinds[f] = declared->second;
            continue;
        }
        for (std::size_t r = 1; r < records.size(); ++r) {
            if (feature_cols[f] >= records[r].size()) {
                continue; // arity error reported below
            }
            const std::string& cell = records[r][feature_cols[f]];
            if (!cell.empty() && !parse_finite_real(cell)) {
                kinds[f] = FeatureKind::text;
                break;
            }
        }
    }
    schema.feature_kinds = kinds;

    Dataset dataset;
    dataset.schema = schema;
    dataset.rows.reserve(n);

    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::int64_t row_id = static_cast<std::int64_t>(r - 1);
        if (rec.size() != header.size()) {
            throw InputError("row " + std::to_string(row_id) + " has " +
                             std::to_string(rec.size()) + " cells, header declares " +
                             std::to_string(header.size()));
        }

        DataPoint point;
        point.row_id = row_id;
        point.features.reserve(arity);
        for (std::size_t f = 0; f < arity; ++f) {
            const std::string& cell = rec[feature_cols[f]];
            if (cell.empty()) {
                point.features.emplace_back(Missing{});
            } else if (kinds[f] == FeatureKind::numeric) {
                auto value = parse_finite_real(cell);
                if (!value) {
                    throw InputError("row " + std::to_string(row_id) + ", column '" +
                                     schema.feature_names[f] +
                                     "': declared numeric but cell is '" + cell + "'");
                }
                point.features.emplace_back(*value);
            } else {
                point.features.emplace_back(cell);
            }
        }

        const std::string& target_cell = rec[target_col];
        if (target_cell.empty()) {
            throw InputError("row " + std::to_string(row_id) + ": missing target");
        }
        auto real = parse_finite_real(target_cell);
        if (!real) {
            throw InputError("row " + std::to_string(row_id) + ": target '" + target_cell +
                             "' is not a finite number");
        }
        if (is_classification(spec.task)) {
            double integral = 0.0;
            if (std::modf(*real, &integral) != 0.0 || *real < 0 || *real >= spec.k) {
                throw InputError("row " + std::to_string(row_id) + ": class label '" +
                                 target_cell + "' outside 0.." + std::to_string(spec.k - 1));
            }
            point.target = static_cast<std::int64_t>(integral);
        } else {
            point.target = *real;
        }
        dataset.rows.push_back(std::move(point));
    }
    return dataset;
}

Dataset load_dataset_file(const std::string& path, const SchemaSpec& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open CSV file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_dataset(buf.str(), spec);
}

std::vector<std::vector<std::string>> parse_csv_table(std::string_view csv) {
    return parse_csv(csv);
}

double ClassDistribution::minority_proportion() const {
    if (n == 0 || counts.empty()) {
        return 0.0;
    }
    return static_cast<double>(*std::min_element(counts.begin(), counts.end())) /
           static_cast<double>(n);
}

double ClassDistribution::majority_proportion() const {
    if (n == 0 || counts.empty()) {
        return 0.0;
    }
    return static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
           static_cast<double>(n);
}

std::int64_t ClassDistribution::majority_class() const {
    std::int64_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[static_cast<std::size_t>(best)]) {
            best = static_cast<std::int64_t>(c);
        }
    }
    return best;
}

ClassDistribution class_distribution(const Dataset& dataset) {
    if (!is_classification(dataset.schema.task)) {
        throw TaskError("class_distribution requires a classification task");
    }
    ClassDistribution dist;
    dist.counts.assign(static_cast<std::size_t>(dataset.schema.k), 0);
    dist.n = dataset.n();
    for (const auto& row : dataset.rows) {
        ++dist.counts[static_cast<std::size_t>(std::get<std::int64_t>(row.target))];
    }
    return dist;
}

} // namespace mlaudit
