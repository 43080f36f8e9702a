#pragma once

#include "meshlabel/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

namespace meshlabel::binio {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <typename T>
void put(std::ostream& os, T value)
{
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is, std::string_view what)
{
    T value{};
    if (!is.read(reinterpret_cast<char*>(&value), sizeof(T)))
        throw DataError("truncated file while reading " + std::string(what));
    return value;
}

inline void expect_magic(std::istream& is, std::string_view magic, std::string_view format)
{
    std::string buf(magic.size(), '\0');
    if (!is.read(buf.data(), static_cast<std::streamsize>(buf.size())) || buf != magic)
        throw DataError("not a " + std::string(format) + " file (bad magic)");
}

/// FNV-1a over raw bytes; used to tag caches with the mesh they were computed from.
class Fnv1a {
public:
    void update(const void* data, size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ull;
        }
    }
    template <typename T>
    void update(const T& value)
    {
        update(&value, sizeof(T));
    }
    uint64_t digest() const { return hash_; }

private:
    uint64_t hash_ = 0xcbf29ce484222325ull;
};

} // namespace meshlabel::binio
