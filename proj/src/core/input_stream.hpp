#pragma once

#include <span>
#include <vector>

#include "core/prng.hpp"
#include "core/types.hpp"

namespace vdf {

// One fuzz input, consumed as a serialized sequence of device-to-driver
// transfers. Every consumer (register reads, DMA sync fills, ring payloads,
// harness op codes) draws from the same cursor, so an input is a complete
// transcript of what the device "said" during one iteration.
//
// Reads never fail and never come up short: when the provided bytes run out
// the stream extends itself with xorshift64* output and appends the generated
// bytes to the data, which keeps the consumed transcript replayable. Growth
// stops at max_size; past that point bytes are still generated (same
// sequence) but no longer recorded, and replays of such inputs are flagged.
class InputStream {
public:
    InputStream(std::vector<u8> data, u64 prng_seed, u64 max_size)
        : data_(std::move(data)),
          provided_len_(data_.size()),
          prng_(prng_seed),
          max_size_(max_size) {}

    void next_bytes(u64 n, u8* out);

    std::vector<u8> take(u64 n) {
        std::vector<u8> out(n);
        if (n)
            next_bytes(n, out.data());
        return out;
    }

    u8 next_u8() { u8 b; next_bytes(1, &b); return b; }
    u16 next_u16() { return static_cast<u16>(next_u(2)); }
    u32 next_u32() { return static_cast<u32>(next_u(4)); }
    u64 next_u64() { return next_u(8); }

    // Little-endian value assembled from `width` stream bytes.
    u64 next_u(unsigned width) {
        u8 buf[8] = {};
        next_bytes(width, buf);
        u64 v = 0;
        for (unsigned i = 0; i < width; ++i)
            v |= static_cast<u64>(buf[i]) << (8 * i);
        return v;
    }

    u64 cursor() const { return cursor_; }
    const std::vector<u8>& data() const { return data_; }
    // True once any byte had to be produced by the generator instead of the
    // provided input.
    bool extended() const { return extended_; }
    u64 provided_len() const { return provided_len_; }

    // Bytes that influenced execution: everything consumed, including
    // generated extensions, capped at what was actually recorded.
    std::vector<u8> consumed_prefix() const {
        u64 n = cursor_ < data_.size() ? cursor_ : data_.size();
        return {data_.begin(), data_.begin() + static_cast<ptrdiff_t>(n)};
    }

private:
    void refill_spill() {
        spill_ = prng_.next();
        spill_len_ = 8;
    }

    std::vector<u8> data_;
    u64 provided_len_;
    u64 cursor_ = 0;
    Xorshift64Star prng_;
    u64 max_size_;
    bool extended_ = false;
    u64 spill_ = 0;   // pending generator bytes, low byte first
    int spill_len_ = 0;
};

}  // namespace vdf
