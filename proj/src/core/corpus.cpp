#include "core/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace vdf {

namespace fs = std::filesystem;

std::vector<std::vector<u8>> Corpus::load_dir(const std::string& dir) {
    std::vector<std::vector<u8>> out;
    if (dir.empty() || !fs::is_directory(dir))
        return out;
    std::vector<fs::path> files;
    for (const auto& ent : fs::directory_iterator(dir)) {
        if (ent.is_regular_file() && ent.path().extension() == ".bin")
            files.push_back(ent.path());
    }
    // Directory iteration order is unspecified; sort so campaigns that start
    // from the same corpus behave identically.
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        std::ifstream f(p, std::ios::binary);
        std::vector<u8> bytes((std::istreambuf_iterator<char>(f)),
                              std::istreambuf_iterator<char>());
        out.push_back(std::move(bytes));
    }
    return out;
}

void Corpus::persist_entry(const std::string& dir, const CorpusEntry& e) const {
    if (dir.empty())
        return;
    fs::create_directories(dir);
    char name[32];
    std::snprintf(name, sizeof(name), "%016llx.bin",
                  static_cast<unsigned long long>(e.fingerprint));
    std::ofstream f(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(e.data.data()),
            static_cast<std::streamsize>(e.data.size()));
}

}  // namespace vdf
