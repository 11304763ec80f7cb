#pragma once

#include <vector>

#include "core/corpus.hpp"
#include "core/prng.hpp"

namespace vdf {

// Produces the next candidate input. With an empty corpus it emits generator
// bytes of a generator-chosen length in [1, 4096]; otherwise it picks an
// entry and applies one of five operators. Output never exceeds the corpus
// entry cap.
class Mutator {
public:
    explicit Mutator(u64 seed) : prng_(seed) {}

    std::vector<u8> next_candidate(const Corpus& corpus);

private:
    std::vector<u8> random_bytes(u64 len);

    Xorshift64Star prng_;
};

}  // namespace vdf
