#include "bita/params.hpp"

#include "bita/binio.hpp"

namespace bita {

namespace {
constexpr std::uint32_t kMagic = 0x42544150;  // "BTAP"
constexpr std::uint32_t kVersion = 1;
}  // namespace

num::Array& ParamPack::add(const std::string& name, num::Array value) {
    if (index_.count(name)) throw Error("ParamPack: duplicate name " + name);
    index_[name] = names_.size();
    names_.push_back(name);
    values_.push_back(std::move(value));
    return values_.back();
}

num::Array& ParamPack::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("ParamPack: unknown name " + name);
    return values_[it->second];
}

const num::Array& ParamPack::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("ParamPack: unknown name " + name);
    return values_[it->second];
}

std::size_t ParamPack::element_count() const {
    std::size_t n = 0;
    for (const auto& v : values_) n += v.size();
    return n;
}

void write_params(std::ostream& os, const ParamPack& pack) {
    io::write_u32(os, kMagic);
    io::write_u32(os, kVersion);
    io::write_u64(os, pack.size());
    for (std::size_t i = 0; i < pack.size(); ++i) {
        io::write_string(os, pack.name(i));
        io::write_array(os, pack.value(i));
    }
}

ParamPack read_params(std::istream& is) {
    io::expect_magic(is, kMagic, kVersion, "parameter container");
    const std::uint64_t count = io::read_u64(is);
    ParamPack pack;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string name = io::read_string(is);
        pack.add(name, io::read_array(is));
    }
    return pack;
}

void save_params(const std::string& path, const ParamPack& pack) {
    auto os = io::open_out(path);
    write_params(os, pack);
}

ParamPack load_params(const std::string& path) {
    auto is = io::open_in(path);
    return read_params(is);
}

}  // namespace bita
