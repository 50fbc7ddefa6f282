#pragma once

namespace terracost {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace terracost
