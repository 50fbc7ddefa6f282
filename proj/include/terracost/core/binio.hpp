#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "terracost/core/errors.hpp"

namespace terracost {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");

template <class T>
void write_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_le(std::istream& is, const char* what) {
    static_assert(std::is_trivially_copyable_v<T>);
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is) throw FormatError(std::string("truncated file while reading ") + what);
    return value;
}

inline void write_bytes(std::ostream& os, const void* data, std::size_t n) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
}

inline void read_bytes(std::istream& is, void* data, std::size_t n, const char* what) {
    is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n));
    if (!is) throw FormatError(std::string("truncated file while reading ") + what);
}

}  // namespace terracost
