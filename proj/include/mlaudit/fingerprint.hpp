#pragma once

#include "mlaudit/dataset.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlaudit {

/// 128-bit digest over the canonical byte encoding of a row's features.
/// The target is excluded so that conflicting labels on identical features
/// still count as duplicates. canonical_bytes is retained so every reported
/// match can be confirmed by exact comparison, so digest collisions can never
/// produce a false duplicate.
struct Fingerprint {
    std::array<std::uint8_t, 16> digest{};
    std::string canonical_bytes;

    std::string hex() const;

    bool operator==(const Fingerprint& other) const {
        return digest == other.digest && canonical_bytes == other.canonical_bytes;
    }
};

/// Canonical encoding: each feature is tagged (real/text/missing) and joined
/// with a reserved separator; reals use the shortest exact decimal rendering
/// (optionally rounded to `rounding` decimal places, -0 canonicalized to 0),
/// text is length-prefixed byte-exact, missing is a sentinel tag.
Fingerprint fingerprint_row(const DataPoint& point,
                            std::optional<int> rounding = std::nullopt);

struct DuplicateGroup {
    std::string digest_hex;
    std::vector<std::int64_t> row_ids; // sorted, size >= 2
};

/// Maximal groups of rows sharing a fingerprint, each confirmed by full
/// canonical-byte comparison.
std::vector<DuplicateGroup> duplicate_census(const Dataset& dataset,
                                             std::optional<int> rounding = std::nullopt);

} // namespace mlaudit
