#pragma once

#include <array>
#include <vector>

#include "core/types.hpp"

namespace vdf {

inline constexpr u32 kCoverageMapSize = 65536;

// Edge coverage over explicit driver-declared sites. Hashing mirrors the
// usual fuzzer scheme: an edge is (site ^ (prev_site >> 1)) folded into the
// map. Counters saturate at 255. The map is cleared per iteration; clearing
// walks only the indices touched since drivers hit a few dozen sites per run
// while the map itself is 64Ki wide.
class CoverageMap {
public:
    CoverageMap() { edges_.fill(0); }

    void begin_iteration() {
        for (u32 idx : touched_)
            edges_[idx] = 0;
        touched_.clear();
        prev_site_ = 0;
    }

    void hit(SiteId site) {
        u32 idx = (site ^ (prev_site_ >> 1)) & (kCoverageMapSize - 1);
        prev_site_ = site;
        if (edges_[idx] == 0)
            touched_.push_back(idx);
        if (edges_[idx] != 0xFF)
            ++edges_[idx];
    }

    u8 count_at(u32 idx) const { return edges_[idx]; }
    const std::vector<u32>& touched() const { return touched_; }

private:
    std::array<u8, kCoverageMapSize> edges_;
    std::vector<u32> touched_;
    u32 prev_site_ = 0;
};

// Cumulative campaign coverage; grows monotonically.
class CampaignCoverage {
public:
    CampaignCoverage() { seen_.assign(kCoverageMapSize, 0); }

    // Returns the indices from this iteration that were not covered before,
    // and folds them in.
    std::vector<u32> absorb(const std::vector<u32>& touched) {
        std::vector<u32> fresh;
        for (u32 idx : touched) {
            if (!seen_[idx]) {
                seen_[idx] = 1;
                ++covered_;
                fresh.push_back(idx);
            }
        }
        return fresh;
    }

    u64 covered_edges() const { return covered_; }

private:
    std::vector<u8> seen_;
    u64 covered_ = 0;
};

// Order-insensitive 64-bit fingerprint of an edge set (FNV-1a over the sorted
// indices). Used to name persisted corpus entries.
u64 coverage_fingerprint(std::vector<u32> touched);

}  // namespace vdf
