#include "bita/binio.hpp"

#include <bit>
#include <cstring>

namespace bita::io {

namespace {

void put_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw IoError("truncated file (wanted " + std::to_string(n) + " bytes)");
}

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

}  // namespace

void write_u32(std::ostream& os, std::uint32_t v) { put_bytes(os, &v, 4); }
void write_u64(std::ostream& os, std::uint64_t v) { put_bytes(os, &v, 8); }
void write_f64(std::ostream& os, double v) { put_bytes(os, &v, 8); }

void write_string(std::ostream& os, const std::string& s) {
    write_u64(os, s.size());
    put_bytes(os, s.data(), s.size());
}

void write_array(std::ostream& os, const num::Array& a) {
    write_u32(os, static_cast<std::uint32_t>(a.rank()));
    for (std::size_t e : a.shape()) write_u64(os, e);
    put_bytes(os, a.data(), a.size() * sizeof(double));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v;
    get_bytes(is, &v, 4);
    return v;
}

std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v;
    get_bytes(is, &v, 8);
    return v;
}

double read_f64(std::istream& is) {
    double v;
    get_bytes(is, &v, 8);
    return v;
}

std::string read_string(std::istream& is) {
    const std::uint64_t n = read_u64(is);
    std::string s(n, '\0');
    get_bytes(is, s.data(), n);
    return s;
}

num::Array read_array(std::istream& is) {
    const std::uint32_t rank = read_u32(is);
    std::vector<std::size_t> shape(rank);
    std::size_t total = 1;
    for (auto& e : shape) {
        e = static_cast<std::size_t>(read_u64(is));
        total *= e;
    }
    std::vector<double> data(total);
    get_bytes(is, data.data(), total * sizeof(double));
    return num::Array(std::move(shape), std::move(data));
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    return is;
}

void expect_magic(std::istream& is, std::uint32_t magic, std::uint32_t version,
                  const char* what) {
    const std::uint32_t m = read_u32(is);
    if (m != magic) throw IoError(std::string(what) + ": bad magic");
    const std::uint32_t v = read_u32(is);
    if (v != version)
        throw IoError(std::string(what) + ": unsupported version " + std::to_string(v));
}

}  // namespace bita::io
