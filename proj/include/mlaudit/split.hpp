#pragma once

#include "mlaudit/dataset.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace mlaudit {

enum class SplitMode { holdout, kfold };

/// Holdout membership labels. K-fold membership is the fold index 0..f-1.
enum class SplitLabel : int { train = 0, validation = 1, test = 2 };

std::string split_label_name(int label);
int split_label_from_name(const std::string& name);

/// Per-row split membership; a partition of row_ids 0..n-1.
struct SplitAssignment {
    SplitMode mode = SplitMode::holdout;
    int fold_count = 0;              // kfold only
    std::vector<int> membership;     // indexed by row_id

    std::int64_t n() const { return static_cast<std::int64_t>(membership.size()); }
    int label_count() const { return mode == SplitMode::kfold ? fold_count : 3; }

    std::vector<std::int64_t> rows_with(int label) const;
    std::vector<std::int64_t> label_counts() const;
};

struct RandomSplit {
    std::uint64_t seed = 0;
    std::vector<double> ratios; // (train, test) or (train, validation, test)
};

struct TemporalSplit {
    std::string column;
    std::vector<double> ratios; // earliest rows -> train, latest -> test
};

struct PredefinedSplit {
    SplitMode mode = SplitMode::holdout;
    std::map<std::int64_t, int> membership;
};

struct KFoldSplit {
    int folds = 0;
    std::uint64_t seed = 0;
};

using SplitStrategy = std::variant<RandomSplit, TemporalSplit, PredefinedSplit, KFoldSplit>;

/// Partitions all row_ids of the dataset. Random/temporal sizes follow the
/// ratios with largest-remainder rounding (ties resolved in split order);
/// deterministic for a fixed seed.
SplitAssignment assign_splits(const Dataset& dataset, const SplitStrategy& strategy);

/// Split file: {"mode": "holdout"|"kfold", "membership": {row_id: label}}.
PredefinedSplit parse_split_file(const std::string& json_text);
PredefinedSplit load_split_file(const std::string& path);
std::string split_to_json(const SplitAssignment& split);

} // namespace mlaudit
