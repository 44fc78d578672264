#include "mlaudit/fingerprint.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <map>
#include <unordered_map>

namespace mlaudit {

namespace {

constexpr char kSeparator = '\x1f';
constexpr char kRealTag = 'R';
constexpr char kTextTag = 'T';
constexpr char kMissingTag = 'M';

std::string render_real(double value, std::optional<int> rounding) {
    if (value == 0.0) {
        value = 0.0; // canonicalize -0.0
    }
    char buf[64];
    std::to_chars_result res{};
    if (rounding) {
        res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, *rounding);
    } else {
        res = std::to_chars(buf, buf + sizeof(buf), value);
    }
    std::string text(buf, res.ptr);
    if (rounding && text.size() > 1 && text[0] == '-' &&
        text.find_first_not_of("0.", 1) == std::string::npos) {
        text.erase(0, 1); // "-0.000" rounds to zero
    }
    return text;
}

// MurmurHash3 x64 128-bit (public-domain algorithm by Austin Appleby).
struct Digest128 {
    std::uint64_t h1 = 0;
    std::uint64_t h2 = 0;
};

std::uint64_t rotl64(std::uint64_t x, int r) {
    return (x << r) | (x >> (64 - r));
}

std::uint64_t fmix64(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

std::uint64_t load64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    std::memcpy(&v, p, sizeof(v));
    return v;
}

Digest128 murmur3_x64_128(const void* key, std::size_t len, std::uint32_t seed) {
    const auto* data = static_cast<const std::uint8_t*>(key);
    const std::size_t nblocks = len / 16;

    std::uint64_t h1 = seed;
    std::uint64_t h2 = seed;
    const std::uint64_t c1 = 0x87c37b91114253d5ULL;
    const std::uint64_t c2 = 0x4cf5ad432745937fULL;

    for (std::size_t i = 0; i < nblocks; ++i) {
        std::uint64_t k1 = load64(data + i * 16);
        std::uint64_t k2 = load64(data + i * 16 + 8);
        k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
        h1 = rotl64(h1, 27); h1 += h2; h1 = h1 * 5 + 0x52dce729;
        k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
        h2 = rotl64(h2, 31); h2 += h1; h2 = h2 * 5 + 0x38495ab5;
    }

    const std::uint8_t* tail = data + nblocks * 16;
    std::uint64_t k1 = 0;
    std::uint64_t k2 = 0;
    switch (len & 15) {
    case 15: k2 ^= std::uint64_t(tail[14]) << 48; [[fallthrough]];
    case 14: k2 ^= std::uint64_t(tail[13]) << 40; [[fallthrough]];
    case 13: k2 ^= std::uint64_t(tail[12]) << 32; [[fallthrough]];
    case 12: k2 ^= std::uint64_t(tail[11]) << 24; [[fallthrough]];
    case 11: k2 ^= std::uint64_t(tail[10]) << 16; [[fallthrough]];
    case 10: k2 ^= std::uint64_t(tail[9]) << 8; [[fallthrough]];
    case 9:
        k2 ^= std::uint64_t(tail[8]);
        k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
        [[fallthrough]];
    case 8: k1 ^= std::uint64_t(tail[7]) << 56; [[fallthrough]];
    case 7: k1 ^= std::uint64_t(tail[6]) << 48; [[fallthrough]];
    case 6: k1 ^= std::uint64_t(tail[5]) << 40; [[fallthrough]];
    case 5: k1 ^= std::uint64_t(tail[4]) << 32; [[fallthrough]];
    case 4: k1 ^= std::uint64_t(tail[3]) << 24; [[fallthrough]];
    case 3: k1 ^= std::uint64_t(tail[2]) << 16; [[fallthrough]];
    case 2: k1 ^= std::uint64_t(tail[1]) << 8; [[fallthrough]];
    case 1:
        k1 ^= std::uint64_t(tail[0]);
        k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
        break;
    default:
        break;
    }

    h1 ^= std::uint64_t(len);
    h2 ^= std::uint64_t(len);
    h1 += h2;
    h2 += h1;
    h1 = fmix64(h1);
    h2 = fmix64(h2);
    h1 += h2;
    h2 += h1;
    return {h1, h2};
}

} // namespace

std::string Fingerprint::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(32);
    for (std::uint8_t byte : digest) {
        out += digits[byte >> 4];
        out += digits[byte & 0x0f];
    }
    return out;
}

Fingerprint fingerprint_row(const DataPoint& point, std::optional<int> rounding) {
    std::string canonical;
    canonical.reserve(point.features.size() * 8);
    bool first = true;
    for (const auto& value : point.features) {
        if (!first) {
            canonical += kSeparator;
        }
        first = false;
        if (const double* real = std::get_if<double>(&value)) {
            canonical += kRealTag;
            canonical += render_real(*real, rounding);
        } else if (const std::string* text = std::get_if<std::string>(&value)) {
            canonical += kTextTag;
            canonical += std::to_string(text->size());
            canonical += ':';
            canonical += *text;
        } else {
            canonical += kMissingTag;
        }
    }

    Fingerprint fp;
    Digest128 d = murmur3_x64_128(canonical.data(), canonical.size(), 0x6d6c6175);
    std::memcpy(fp.digest.data(), &d.h1, 8);
    std::memcpy(fp.digest.data() + 8, &d.h2, 8);
    fp.canonical_bytes = std::move(canonical);
    return fp;
}

std::vector<DuplicateGroup> duplicate_census(const Dataset& dataset,
                                             std::optional<int> rounding) {
    std::unordered_map<std::string, std::vector<std::int64_t>> by_canonical;
    std::unordered_map<std::string, std::string> hex_of;
    for (const auto& row : dataset.rows) {
        Fingerprint fp = fingerprint_row(row, rounding);
        auto [it, inserted] = by_canonical.try_emplace(fp.canonical_bytes);
        it->second.push_back(row.row_id);
        if (inserted) {
            hex_of[fp.canonical_bytes] = fp.hex();
        }
    }

    std::vector<DuplicateGroup> groups;
    for (auto& [canonical, rows] : by_canonical) {
        if (rows.size() < 2) {
            continue;
        }
        std::sort(rows.begin(), rows.end());
        groups.push_back({hex_of[canonical], std::move(rows)});
    }
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
        return a.row_ids.front() < b.row_ids.front();
    });
    return groups;
}

} // namespace mlaudit
