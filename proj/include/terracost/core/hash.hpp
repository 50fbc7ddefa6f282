#pragma once

#include <cstdint>
#include <string>

namespace terracost {

/// FNV-1a 64-bit, used for manifest content hashes.
class Fnv1a64 {
public:
    void update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ULL;
        }
    }

    std::uint64_t value() const { return hash_; }

    std::string hex() const;

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

/// Hash of a whole file's bytes. Throws IoError if the file cannot be read.
std::string hash_file_hex(const std::string& path);

}  // namespace terracost
