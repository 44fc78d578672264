#include "mlaudit/integrity.hpp"

#include "mlaudit/error.hpp"
#include "mlaudit/fingerprint.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mlaudit {

namespace {

void require_split_covers(const Dataset& dataset, const SplitAssignment& split) {
    if (split.n() != dataset.n()) {
        throw SplitError("split covers " + std::to_string(split.n()) + " rows, dataset has " +
                         std::to_string(dataset.n()));
    }
}

LeakageReport leakage_report(const Dataset& dataset, const SplitAssignment& split,
                             std::optional<int> rounding) {
    require_split_covers(dataset, split);

    LeakageReport report;
    for (const DuplicateGroup& group : duplicate_census(dataset, rounding)) {
        std::map<int, std::vector<std::int64_t>> by_group;
        for (std::int64_t row : group.row_ids) {
            by_group[split.membership[static_cast<std::size_t>(row)]].push_back(row);
        }
        if (by_group.size() >= 2) {
            report.collisions.push_back({group.digest_hex, std::move(by_group)});
        }
    }
    report.leak_present = !report.collisions.empty();

    const auto counts = split.label_counts();
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t j = i + 1; j < counts.size(); ++j) {
            report.pairs_checked += counts[i] * counts[j];
        }
    }
    return report;
}

} // namespace

LeakageReport check_split_disjoint(const Dataset& dataset, const SplitAssignment& split,
                                   std::optional<int> rounding) {
    if (split.mode != SplitMode::holdout) {
        throw ModeError("split check needs a holdout split (use the fold check for k-fold)");
    }
    return leakage_report(dataset, split, rounding);
}

LeakageReport check_fold_disjoint(const Dataset& dataset, const SplitAssignment& split,
                                  std::optional<int> rounding) {
    if (split.mode != SplitMode::kfold) {
        throw ModeError("fold check needs a k-fold split (use the split check for holdout)");
    }
    return leakage_report(dataset, split, rounding);
}

std::vector<ClusterViolation> check_cluster_fold_assignment(
    const std::map<std::int64_t, std::string>& cluster_labels, const SplitAssignment& split) {
    if (split.mode != SplitMode::kfold) {
        throw ModeError("cluster check needs a k-fold split");
    }
    std::map<std::string, std::set<int>> folds_by_cluster;
    for (std::int64_t row = 0; row < split.n(); ++row) {
        const auto it = cluster_labels.find(row);
        if (it == cluster_labels.end()) {
            throw InputError("cluster labels omit row " + std::to_string(row));
        }
        folds_by_cluster[it->second].insert(split.membership[static_cast<std::size_t>(row)]);
    }
    std::vector<ClusterViolation> violations;
    for (const auto& [cluster, folds] : folds_by_cluster) {
        if (folds.size() >= 2) {
            violations.push_back({cluster, {folds.begin(), folds.end()}});
        }
    }
    return violations;
}

std::map<std::int64_t, std::string> parse_cluster_labels(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("cluster file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("clusters") || !doc.at("clusters").is_object()) {
        throw SchemaError("cluster file must be an object with a 'clusters' mapping");
    }
    std::map<std::int64_t, std::string> labels;
    for (const auto& [key, value] : doc.at("clusters").items()) {
        std::int64_t row = 0;
        try {
            row = std::stoll(key);
        } catch (const std::exception&) {
            throw SchemaError("cluster key '" + key + "' is not a row id");
        }
        std::string cluster;
        if (value.is_string()) {
            cluster = value.get<std::string>();
        } else if (value.is_number_integer()) {
            cluster = std::to_string(value.get<std::int64_t>());
        } else {
            throw SchemaError("cluster ids must be strings or integers");
        }
        if (!labels.emplace(row, std::move(cluster)).second) {
            throw SchemaError("duplicate cluster entry for row " + key);
        }
    }
    return labels;
}

std::map<std::int64_t, std::string> load_cluster_labels_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open cluster file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cluster_labels(buf.str());
}

bool LabelLeakProbe::any_flagged() const {
    return std::any_of(features.begin(), features.end(),
                       [](const FeatureProbe& p) { return p.flagged; });
}

namespace {

// Discretization key for one feature cell. Texts are keyed by value, numerics
// by quantile bin, missing by a reserved key.
class FeatureKey {
public:
    FeatureKey(const Dataset& dataset, std::size_t column,
               const std::vector<std::int64_t>& train_rows) {
        if (dataset.schema.feature_kinds[column] == FeatureKind::text) {
            return; // text cells key directly, no edges needed
        }
        std::vector<double> values;
        for (std::int64_t row : train_rows) {
            const auto& cell = dataset.rows[static_cast<std::size_t>(row)].features[column];
            if (const double* v = std::get_if<double>(&cell)) {
                values.push_back(*v);
            }
        }
        std::sort(values.begin(), values.end());
        for (int i = 1; i < kProbeBins && !values.empty(); ++i) {
            const std::size_t idx = values.size() * static_cast<std::size_t>(i) /
                                    static_cast<std::size_t>(kProbeBins);
            edges_.push_back(values[std::min(idx, values.size() - 1)]);
        }
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    std::string operator()(const FeatureValue& cell) const {
        if (std::holds_alternative<Missing>(cell)) {
            return "\x01missing";
        }
        if (const std::string* s = std::get_if<std::string>(&cell)) {
            return "\x02" + *s;
        }
        const double v = std::get<double>(cell);
        const auto it = std::upper_bound(edges_.begin(), edges_.end(), v);
        return "\x03bin" + std::to_string(it - edges_.begin());
    }

private:
    std::vector<double> edges_;
};

std::int64_t class_of(const DataPoint& point) {
    return std::get<std::int64_t>(point.target);
}

// Majority vote with ties resolved toward the smaller class label.
std::int64_t majority(const std::map<std::int64_t, std::int64_t>& votes) {
    std::int64_t best = -1, best_count = -1;
    for (const auto& [label, count] : votes) {
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

} // namespace

LabelLeakProbe check_label_leakage(const Dataset& dataset, const SplitAssignment& split,
                                   double threshold, double margin) {
    if (!is_classification(dataset.schema.task)) {
        throw TaskError("label-leak probe needs a classification task");
    }
    if (split.mode != SplitMode::holdout) {
        throw ModeError("label-leak probe needs a holdout split");
    }
    require_split_covers(dataset, split);

    const auto train_rows = split.rows_with(static_cast<int>(SplitLabel::train));
    auto score_rows = split.rows_with(static_cast<int>(SplitLabel::validation));
    int scored_label = static_cast<int>(SplitLabel::validation);
    if (score_rows.empty()) {
        score_rows = split.rows_with(static_cast<int>(SplitLabel::test));
        scored_label = static_cast<int>(SplitLabel::test);
    }
    if (train_rows.empty() || score_rows.empty()) {
        throw SplitError("label-leak probe needs non-empty train and held-out rows");
    }

    std::map<std::int64_t, std::int64_t> global_votes;
    for (std::int64_t row : train_rows) {
        ++global_votes[class_of(dataset.rows[static_cast<std::size_t>(row)])];
    }
    const std::int64_t global_majority = majority(global_votes);

    std::int64_t baseline_hits = 0;
    for (std::int64_t row : score_rows) {
        if (class_of(dataset.rows[static_cast<std::size_t>(row)]) == global_majority) {
            ++baseline_hits;
        }
    }
    const double baseline =
        static_cast<double>(baseline_hits) / static_cast<double>(score_rows.size());

    LabelLeakProbe probe;
    probe.threshold = threshold;
    probe.margin = margin;
    probe.scored_rows = static_cast<std::int64_t>(score_rows.size());
    probe.scored_label = scored_label;

    for (std::size_t column = 0; column < dataset.schema.arity(); ++column) {
        const FeatureKey key(dataset, column, train_rows);

        std::unordered_map<std::string, std::map<std::int64_t, std::int64_t>> votes;
        for (std::int64_t row : train_rows) {
            const auto& point = dataset.rows[static_cast<std::size_t>(row)];
            ++votes[key(point.features[column])][class_of(point)];
        }
        std::unordered_map<std::string, std::int64_t> table;
        table.reserve(votes.size());
        for (const auto& [k, v] : votes) {
            table.emplace(k, majority(v));
        }

        std::int64_t hits = 0;
        for (std::int64_t row : score_rows) {
            const auto& point = dataset.rows[static_cast<std::size_t>(row)];
            const auto it = table.find(key(point.features[column]));
            const std::int64_t predicted = it == table.end() ? global_majority : it->second;
            if (predicted == class_of(point)) {
                ++hits;
            }
        }

        FeatureProbe fp;
        fp.feature = dataset.schema.feature_names[column];
        fp.probe_accuracy = static_cast<double>(hits) / static_cast<double>(score_rows.size());
        fp.majority_baseline = baseline;
        fp.flagged = fp.probe_accuracy >= threshold &&
                     fp.probe_accuracy >= baseline + margin;
        probe.features.push_back(std::move(fp));
    }
    return probe;
}

MetricAdvisory check_metric_appropriateness(TaskKind task, const ClassDistribution& dist,
                                            const std::string& chosen_metric,
                                            double imbalance_threshold) {
    if (!is_classification(task)) {
        throw TaskError("metric advisory needs a classification task");
    }
    MetricAdvisory advisory;
    advisory.metric = chosen_metric;
    advisory.minority_proportion = dist.minority_proportion();
    advisory.baseline_accuracy = dist.majority_proportion();
    if (chosen_metric == "accuracy" && advisory.minority_proportion < imbalance_threshold) {
        advisory.status = AdvisoryStatus::WARN;
        std::ostringstream text;
        text << "accuracy is deceptive here: always predicting the majority class scores "
             << advisory.baseline_accuracy
             << "; prefer recall (sensitivity), miss rate, or balanced_accuracy";
        advisory.recommendation = text.str();
    }
    return advisory;
}

} // namespace mlaudit
