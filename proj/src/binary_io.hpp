#pragma once

// Little-endian POD and string framing for the index and checkpoint files.

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace pgt::binary {

template <typename T>
void write(std::ostream& out, const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read(std::istream& in) {
    static_assert(std::is_trivially_copyable_v<T>);
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("unexpected end of binary file");
    return value;
}

inline void write_string(std::ostream& out, const std::string& s) {
    write<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
    auto n = read<std::uint32_t>(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw std::runtime_error("unexpected end of binary file");
    return s;
}

template <typename T>
void write_vector(std::ostream& out, const std::vector<T>& v) {
    write<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
std::vector<T> read_vector(std::istream& in) {
    auto n = read<std::uint64_t>(in);
    std::vector<T> v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    if (!in) throw std::runtime_error("unexpected end of binary file");
    return v;
}

inline void expect_magic(std::istream& in, const std::string& magic, const std::string& what) {
    std::string got(magic.size(), '\0');
    in.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (!in || got != magic) throw std::runtime_error("not a " + what + " file");
}

}  // namespace pgt::binary
