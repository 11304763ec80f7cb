#include "core/mutator.hpp"

namespace vdf {

std::vector<u8> Mutator::random_bytes(u64 len) {
    std::vector<u8> out(len);
    for (auto& b : out)
        b = static_cast<u8>(prng_.next());
    return out;
}

std::vector<u8> Mutator::next_candidate(const Corpus& corpus) {
    const u64 cap = corpus.max_entry_size();
    if (corpus.empty())
        return random_bytes(prng_.range(1, 4096));

    const auto& base = corpus.entry(prng_.next() % corpus.size()).data;
    std::vector<u8> out = base;
    switch (prng_.next() % 5) {
    case 0: {  // bitflip
        if (out.empty())
            return random_bytes(prng_.range(1, 64));
        u64 bit = prng_.next() % (out.size() * 8);
        out[bit / 8] ^= static_cast<u8>(1u << (bit % 8));
        break;
    }
    case 1: {  // byte replace
        if (out.empty())
            return random_bytes(prng_.range(1, 64));
        out[prng_.next() % out.size()] = static_cast<u8>(prng_.next());
        break;
    }
    case 2: {  // splice with a second entry
        const auto& other = corpus.entry(prng_.next() % corpus.size()).data;
        if (out.empty() || other.empty())
            break;
        u64 cut_a = prng_.next() % out.size();
        u64 cut_b = prng_.next() % other.size();
        out.resize(cut_a);
        out.insert(out.end(), other.begin() + static_cast<ptrdiff_t>(cut_b),
                   other.end());
        break;
    }
    case 3: {  // truncate
        if (out.empty())
            break;
        out.resize(prng_.next() % out.size());
        break;
    }
    case 4: {  // extend
        u64 extra = prng_.range(1, 256);
        for (u64 i = 0; i < extra; ++i)
            out.push_back(static_cast<u8>(prng_.next()));
        break;
    }
    }
    if (out.size() > cap)
        out.resize(cap);
    return out;
}

}  // namespace vdf
