#include "core/input_stream.hpp"

#include <cstring>

namespace vdf {

void InputStream::next_bytes(u64 n, u8* out) {
    u64 produced = 0;
    // Fast path: serve from provided/recorded data.
    if (cursor_ < data_.size()) {
        u64 have = data_.size() - cursor_;
        u64 take = have < n ? have : n;
        std::memcpy(out, data_.data() + cursor_, take);
        cursor_ += take;
        produced = take;
    }
    while (produced < n) {
        extended_ = true;
        if (spill_len_ == 0)
            refill_spill();
        u8 b = static_cast<u8>(spill_);
        spill_ >>= 8;
        --spill_len_;
        if (data_.size() < max_size_)
            data_.push_back(b);
        out[produced++] = b;
        ++cursor_;
    }
}

}  // namespace vdf
