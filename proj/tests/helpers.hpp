#pragma once

// Shared fixtures: CSV builders and random dataset generation.

#include "mlaudit/dataset.hpp"
#include "mlaudit/split.hpp"

#include <charconv>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

inline std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) {
        return cell;
    }
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string to_csv(const std::vector<std::vector<std::string>>& records) {
    std::string text;
    for (const auto& record : records) {
        for (std::size_t i = 0; i < record.size(); ++i) {
            if (i) text += ',';
            text += csv_escape(record[i]);
        }
        text += '\n';
    }
    return text;
}

inline std::string real_text(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

// Random binary-classification dataset with mixed column kinds. Numeric cells
// come from a coarse grid so duplicates and rounding collisions actually
// occur; text cells include quoting hazards. `duplicates` extra rows copy the
// features of earlier rows (targets are re-rolled; fingerprints ignore them).
inline mlaudit::Dataset random_dataset(std::mt19937_64& rng, int max_rows, int duplicates) {
    const int base_rows = std::uniform_int_distribution<int>(4, max_rows)(rng);
    const int arity = std::uniform_int_distribution<int>(1, 4)(rng);

    std::vector<bool> numeric(arity);
    mlaudit::SchemaSpec spec;
    spec.task = mlaudit::TaskKind::binary_classification;
    spec.k = 2;
    spec.target = "target";
    std::vector<std::string> header;
    for (int c = 0; c < arity; ++c) {
        numeric[c] = std::bernoulli_distribution(0.6)(rng);
        const std::string name = "f" + std::to_string(c);
        header.push_back(name);
        spec.feature_kinds[name] =
            numeric[c] ? mlaudit::FeatureKind::numeric : mlaudit::FeatureKind::text;
    }
    header.push_back("target");

    static const std::vector<std::string> tokens = {"a", "b", "c", "x,y", "q\"t", "long token"};
    std::uniform_int_distribution<int> grid(-4, 12);
    std::uniform_int_distribution<std::size_t> token_pick(0, tokens.size() - 1);
    std::bernoulli_distribution missing(0.08);
    std::bernoulli_distribution coin(0.5);

    std::vector<std::vector<std::string>> records{header};
    for (int r = 0; r < base_rows; ++r) {
        std::vector<std::string> row;
        for (int c = 0; c < arity; ++c) {
            if (missing(rng)) {
                row.push_back("");
            } else if (numeric[c]) {
                row.push_back(real_text(grid(rng) * 0.125));
            } else {
                row.push_back(tokens[token_pick(rng)]);
            }
        }
        row.push_back(coin(rng) ? "1" : "0");
        records.push_back(std::move(row));
    }
    for (int d = 0; d < duplicates; ++d) {
        const std::size_t source =
            std::uniform_int_distribution<std::size_t>(1, records.size() - 1)(rng);
        std::vector<std::string> row = records[source];
        row.back() = coin(rng) ? "1" : "0";
        records.push_back(std::move(row));
    }

    return mlaudit::load_dataset(to_csv(records), spec);
}

// Arbitrary holdout membership over the dataset rows, all three labels used
// when n allows.
inline mlaudit::SplitAssignment random_holdout(std::mt19937_64& rng, std::int64_t n) {
    mlaudit::SplitAssignment split;
    split.mode = mlaudit::SplitMode::holdout;
    split.membership.resize(static_cast<std::size_t>(n));
    std::uniform_int_distribution<int> label(0, 2);
    for (auto& m : split.membership) {
        m = label(rng);
    }
    return split;
}

} // namespace fixtures
