#include "core/coverage.hpp"

#include <algorithm>

namespace vdf {

u64 coverage_fingerprint(std::vector<u32> touched) {
    std::sort(touched.begin(), touched.end());
    u64 h = 0xCBF29CE484222325ull;
    for (u32 idx : touched) {
        for (int shift = 0; shift < 32; shift += 8) {
            h ^= (idx >> shift) & 0xFF;
            h *= 0x100000001B3ull;
        }
    }
    return h;
}

}  // namespace vdf
