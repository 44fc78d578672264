#pragma once

#include "mlaudit/dataset.hpp"
#include "mlaudit/split.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mlaudit {

/// One duplicate fingerprint whose rows span at least two split groups.
/// Group keys are holdout labels or fold indices depending on split mode.
struct SplitCollision {
    std::string fingerprint; // hex digest of the shared canonical row
    std::map<int, std::vector<std::int64_t>> rows; // group -> sorted row ids
};

struct LeakageReport {
    std::vector<SplitCollision> collisions;
    bool leak_present = false;
    // Cross-group row pairs a naive pairwise comparison would examine.
    std::int64_t pairs_checked = 0;
};

/// Tests the holdout partition for duplicate rows shared between any two of
/// train/validation/test (canonical feature equality, target excluded).
LeakageReport check_split_disjoint(const Dataset& dataset, const SplitAssignment& split,
                                   std::optional<int> rounding = std::nullopt);

/// Same check across k folds; duplicates confined to one fold are not leakage.
LeakageReport check_fold_disjoint(const Dataset& dataset, const SplitAssignment& split,
                                  std::optional<int> rounding = std::nullopt);

struct ClusterViolation {
    std::string cluster;
    std::vector<int> folds; // sorted, size >= 2
};

/// A cluster must live inside a single fold; returns the violators.
std::vector<ClusterViolation> check_cluster_fold_assignment(
    const std::map<std::int64_t, std::string>& cluster_labels, const SplitAssignment& split);

/// Cluster file: {"clusters": {row_id: cluster_id}}.
std::map<std::int64_t, std::string> parse_cluster_labels(const std::string& json_text);
std::map<std::int64_t, std::string> load_cluster_labels_file(const std::string& path);

struct FeatureProbe {
    std::string feature;
    double probe_accuracy = 0;
    double majority_baseline = 0;
    bool flagged = false;
};

struct LabelLeakProbe {
    std::vector<FeatureProbe> features; // dataset column order
    double threshold = 0;
    double margin = 0;
    std::int64_t scored_rows = 0; // size of the held-out scoring set
    int scored_label = 0;         // validation when present, else test
    bool any_flagged() const;
};

/// Number of quantile bins used to discretize numeric features for probing.
inline constexpr int kProbeBins = 16;

/// Fits, per feature, a lookup table from feature value to the majority train
/// target, scores it on held-out rows, and flags features whose accuracy
/// clears both the absolute threshold and the majority baseline plus margin.
LabelLeakProbe check_label_leakage(const Dataset& dataset, const SplitAssignment& split,
                                   double threshold = 0.99, double margin = 0.05);

enum class AdvisoryStatus { PASS, WARN };

struct MetricAdvisory {
    AdvisoryStatus status = AdvisoryStatus::PASS;
    std::string metric;              // the metric under review
    double minority_proportion = 0;
    double baseline_accuracy = 0;    // accuracy of the majority-constant model
    std::string recommendation;      // non-empty on WARN
};

/// Warns when plain accuracy is chosen for imbalanced classification data;
/// the boundary is exclusive (minority proportion equal to the threshold
/// passes).
MetricAdvisory check_metric_appropriateness(TaskKind task, const ClassDistribution& dist,
                                            const std::string& chosen_metric,
                                            double imbalance_threshold = 0.1);

} // namespace mlaudit
