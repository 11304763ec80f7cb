#pragma once

#include <string>
#include <vector>

#include "core/types.hpp"

namespace vdf {

struct CorpusEntry {
    std::vector<u8> data;
    u64 fingerprint = 0;
    u64 discovery_iteration = 0;
};

// Admitted inputs. The engine only offers an entry after the iteration
// produced at least one edge that no earlier entry produced, so every entry
// carries new coverage by construction. Entries are clamped to
// max_entry_size.
class Corpus {
public:
    explicit Corpus(u64 max_entry_size) : max_entry_size_(max_entry_size) {}

    void admit(std::vector<u8> data, u64 fingerprint, u64 iteration) {
        if (data.size() > max_entry_size_)
            data.resize(max_entry_size_);
        entries_.push_back({std::move(data), fingerprint, iteration});
    }

    bool empty() const { return entries_.empty(); }
    size_t size() const { return entries_.size(); }
    const CorpusEntry& entry(size_t i) const { return entries_[i]; }
    u64 max_entry_size() const { return max_entry_size_; }

    // Persistence: entries are raw byte files named
    // <16-hex-digit fingerprint>.bin. Loading returns file payloads in
    // filename order; the engine re-executes them to establish coverage.
    static std::vector<std::vector<u8>> load_dir(const std::string& dir);
    void persist_entry(const std::string& dir, const CorpusEntry& e) const;

private:
    std::vector<CorpusEntry> entries_;
    u64 max_entry_size_;
};

}  // namespace vdf
