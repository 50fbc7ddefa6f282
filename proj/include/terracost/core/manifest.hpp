#pragma once

#include <string>

#include "terracost/core/config.hpp"

namespace terracost {

/// Run manifest: a sorted key=value file recording the command, library
/// version, seed, arguments, and content hashes of every file read and
/// written. No timestamps, so identical runs produce identical manifests.
KeyValueConfig make_manifest(const std::string& command, long long seed);

/// Records `<role>.<basename of path> = <fnv1a64 of file bytes>`.
void manifest_add_file(KeyValueConfig& manifest, const std::string& role,
                       const std::string& path);

}  // namespace terracost
