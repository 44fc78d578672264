#include "mlaudit/split.hpp"

#include "mlaudit/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace mlaudit {

std::string split_label_name(int label) {
    switch (label) {
    case 0: return "train";
    case 1: return "validation";
    case 2: return "test";
    default: return "fold" + std::to_string(label);
    }
}

int split_label_from_name(const std::string& name) {
    if (name == "train") return 0;
    if (name == "validation") return 1;
    if (name == "test") return 2;
    throw SchemaError("unknown split label '" + name + "'");
}

std::vector<std::int64_t> SplitAssignment::rows_with(int label) const {
    std::vector<std::int64_t> rows;
    for (std::int64_t i = 0; i < n(); ++i) {
        if (membership[static_cast<std::size_t>(i)] == label) {
            rows.push_back(i);
        }
    }
    return rows;
}

std::vector<std::int64_t> SplitAssignment::label_counts() const {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(label_count()), 0);
    for (int label : membership) {
        ++counts[static_cast<std::size_t>(label)];
    }
    return counts;
}

namespace {

// Uniform integer in [0, bound) via rejection; implementation-independent so
// that a seed reproduces the same split everywhere.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t value = rng();
    while (value >= limit) {
        value = rng();
    }
    return value % bound;
}

std::vector<std::int64_t> shuffled_rows(std::int64_t n, std::uint64_t seed) {
    std::vector<std::int64_t> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), std::int64_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = rows.size(); i > 1; --i) {
        std::swap(rows[i - 1], rows[bounded(rng, i)]);
    }
    return rows;
}

// Largest-remainder apportionment of n rows over the ratios. Equal remainders
// resolve in split order (train < validation < test).
std::vector<std::int64_t> apportion(std::int64_t n, const std::vector<double>& ratios) {
    double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("split ratios must sum to 1");
    }
    for (double r : ratios) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw ConfigError("split ratios must be finite and non-negative");
        }
    }
    std::vector<std::int64_t> sizes(ratios.size());
    std::vector<double> remainders(ratios.size());
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        double exact = static_cast<double>(n) * ratios[i];
        sizes[i] = static_cast<std::int64_t>(std::floor(exact));
        remainders[i] = exact - static_cast<double>(sizes[i]);
        assigned += sizes[i];
    }
    std::vector<std::size_t> order(ratios.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainders[a] > remainders[b];
    });
    for (std::int64_t left = n - assigned; left > 0; --left) {
        ++sizes[order[static_cast<std::size_t>(n - assigned - left)]];
    }
    return sizes;
}

// Holdout labels per ratio slot: (train, test) or (train, validation, test).
std::vector<int> ratio_labels(std::size_t count) {
    if (count == 2) {
        return {0, 2};
    }
    if (count == 3) {
        return {0, 1, 2};
    }
    throw ConfigError("expected 2 or 3 split ratios, got " + std::to_string(count));
}

SplitAssignment from_ordered_rows(const std::vector<std::int64_t>& ordered,
                                  const std::vector<double>& ratios) {
    const std::vector<int> labels = ratio_labels(ratios.size());
    const std::vector<std::int64_t> sizes =
        apportion(static_cast<std::int64_t>(ordered.size()), ratios);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == 0) {
            throw SplitError("split '" + split_label_name(labels[i]) +
                             "' would be empty for n=" + std::to_string(ordered.size()));
        }
    }
    SplitAssignment split;
    split.mode = SplitMode::holdout;
    split.membership.assign(ordered.size(), 0);
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        for (std::int64_t j = 0; j < sizes[i]; ++j) {
            split.membership[static_cast<std::size_t>(ordered[cursor++])] = labels[i];
        }
    }
    return split;
}

SplitAssignment assign_random(const Dataset& dataset, const RandomSplit& strategy) {
    return from_ordered_rows(shuffled_rows(dataset.n(), strategy.seed), strategy.ratios);
}

SplitAssignment assign_temporal(const Dataset& dataset, const TemporalSplit& strategy) {
    const auto& names = dataset.schema.feature_names;
    auto it = std::find(names.begin(), names.end(), strategy.column);
    if (it == names.end()) {
        throw SchemaError("temporal column '" + strategy.column + "' not in dataset");
    }
    const std::size_t col = static_cast<std::size_t>(it - names.begin());

    std::vector<std::int64_t> rows(static_cast<std::size_t>(dataset.n()));
    std::iota(rows.begin(), rows.end(), std::int64_t{0});
    for (const auto& row : dataset.rows) {
        if (std::holds_alternative<Missing>(row.features[col])) {
            throw InputError("temporal column '" + strategy.column +
                             "' has a missing value at row " + std::to_string(row.row_id));
        }
    }
    auto key_less = [&](std::int64_t a, std::int64_t b) {
        const FeatureValue& va = dataset.rows[static_cast<std::size_t>(a)].features[col];
        const FeatureValue& vb = dataset.rows[static_cast<std::size_t>(b)].features[col];
        if (va.index() != vb.index()) {
            return va.index() < vb.index();
        }
        if (const double* da = std::get_if<double>(&va)) {
            double db = std::get<double>(vb);
            if (*da != db) {
                return *da < db;
            }
        } else {
            const auto& sa = std::get<std::string>(va);
            const auto& sb = std::get<std::string>(vb);
            if (sa != sb) {
                return sa < sb;
            }
        }
        return a < b; // ties by row id keep the order total
    };
    std::sort(rows.begin(), rows.end(), key_less);
    return from_ordered_rows(rows, strategy.ratios);
}

SplitAssignment assign_predefined(const Dataset& dataset, const PredefinedSplit& strategy) {
    SplitAssignment split;
    split.mode = strategy.mode;
    split.membership.assign(static_cast<std::size_t>(dataset.n()), -1);
    for (const auto& [row, label] : strategy.membership) {
        if (row < 0 || row >= dataset.n()) {
            throw SplitError("membership references unknown row " + std::to_string(row));
        }
        if (split.membership[static_cast<std::size_t>(row)] != -1) {
            throw SplitError("row " + std::to_string(row) + " assigned twice");
        }
        split.membership[static_cast<std::size_t>(row)] = label;
    }
    for (std::int64_t row = 0; row < dataset.n(); ++row) {
        if (split.membership[static_cast<std::size_t>(row)] == -1) {
            throw SplitError("membership omits row " + std::to_string(row));
        }
    }

    if (strategy.mode == SplitMode::holdout) {
        for (int label : split.membership) {
            if (label < 0 || label > 2) {
                throw SplitError("holdout label out of range: " + std::to_string(label));
            }
        }
        if (std::count(split.membership.begin(), split.membership.end(), 0) == 0) {
            throw SplitError("holdout split has an empty train set");
        }
    } else {
        int max_fold = 0;
        for (int label : split.membership) {
            if (label < 0) {
                throw SplitError("negative fold index");
            }
            max_fold = std::max(max_fold, label);
        }
        split.fold_count = max_fold + 1;
        if (split.fold_count < 2) {
            throw SplitError("kfold split requires at least 2 folds");
        }
        auto counts = split.label_counts();
        for (std::size_t f = 0; f < counts.size(); ++f) {
            if (counts[f] == 0) {
                throw SplitError("fold " + std::to_string(f) + " is empty");
            }
        }
    }
    return split;
}

SplitAssignment assign_kfold(const Dataset& dataset, const KFoldSplit& strategy) {
    if (strategy.folds < 2) {
        throw ConfigError("kfold requires f >= 2");
    }
    if (dataset.n() < strategy.folds) {
        throw SplitError("fewer rows than folds");
    }
    const auto ordered = shuffled_rows(dataset.n(), strategy.seed);
    SplitAssignment split;
    split.mode = SplitMode::kfold;
    split.fold_count = strategy.folds;
    split.membership.assign(ordered.size(), 0);

    // First n % f folds take one extra row.
    const std::int64_t base = dataset.n() / strategy.folds;
    const std::int64_t extra = dataset.n() % strategy.folds;
    std::size_t cursor = 0;
    for (int f = 0; f < strategy.folds; ++f) {
        const std::int64_t size = base + (f < extra ? 1 : 0);
        for (std::int64_t j = 0; j < size; ++j) {
            split.membership[static_cast<std::size_t>(ordered[cursor++])] = f;
        }
    }
    return split;
}

} // namespace

SplitAssignment assign_splits(const Dataset& dataset, const SplitStrategy& strategy) {
    return std::visit(
        [&](const auto& s) -> SplitAssignment {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RandomSplit>) {
                return assign_random(dataset, s);
            } else if constexpr (std::is_same_v<T, TemporalSplit>) {
                return assign_temporal(dataset, s);
            } else if constexpr (std::is_same_v<T, PredefinedSplit>) {
                return assign_predefined(dataset, s);
            } else {
                return assign_kfold(dataset, s);
            }
        },
        strategy);
}

PredefinedSplit parse_split_file(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("split file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("mode") || !doc.contains("membership")) {
        throw SchemaError("split file must be an object with 'mode' and 'membership'");
    }
    PredefinedSplit split;
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode == "holdout") {
        split.mode = SplitMode::holdout;
    } else if (mode == "kfold") {
        split.mode = SplitMode::kfold;
    } else {
        throw SchemaError("split mode must be 'holdout' or 'kfold'");
    }
    for (const auto& [key, value] : doc.at("membership").items()) {
        std::int64_t row = 0;
        try {
            row = std::stoll(key);
        } catch (const std::exception&) {
            throw SchemaError("membership key '" + key + "' is not a row id");
        }
        int label = 0;
        if (split.mode == SplitMode::holdout) {
            label = value.is_string() ? split_label_from_name(value.get<std::string>())
                                      : value.get<int>();
        } else {
            if (!value.is_number_integer()) {
                throw SchemaError("kfold membership values must be fold indices");
            }
            label = value.get<int>();
        }
        if (!split.membership.emplace(row, label).second) {
            throw SchemaError("duplicate membership entry for row " + key);
        }
    }
    return split;
}

PredefinedSplit load_split_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open split file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_split_file(buf.str());
}

std::string split_to_json(const SplitAssignment& split) {
    nlohmann::ordered_json doc;
    doc["mode"] = split.mode == SplitMode::holdout ? "holdout" : "kfold";
    nlohmann::ordered_json membership = nlohmann::ordered_json::object();
    for (std::int64_t row = 0; row < split.n(); ++row) {
        const int label = split.membership[static_cast<std::size_t>(row)];
        if (split.mode == SplitMode::holdout) {
            membership[std::to_string(row)] = split_label_name(label);
        } else {
            membership[std::to_string(row)] = label;
        }
    }
    doc["membership"] = std::move(membership);
    return doc.dump(2);
}

} // namespace mlaudit
