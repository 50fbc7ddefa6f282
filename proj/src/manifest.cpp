#include "terracost/core/manifest.hpp"

#include <filesystem>

#include "terracost/core/hash.hpp"
#include "terracost/core/version.hpp"

namespace terracost {

KeyValueConfig make_manifest(const std::string& command, long long seed) {
    KeyValueConfig kv;
    kv.set("command", command);
    kv.set("version", std::string(kVersion));
    kv.set("seed", seed);
    return kv;
}

void manifest_add_file(KeyValueConfig& manifest, const std::string& role,
                       const std::string& path) {
    const std::string base = std::filesystem::path(path).filename().string();
    manifest.set(role + "." + base, hash_file_hex(path));
}

}  // namespace terracost
