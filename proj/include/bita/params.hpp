#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "bita/array.hpp"

namespace bita {

/// Ordered collection of named float64 arrays. Insertion order is the
/// serialization order, so save -> load -> save is byte-for-byte stable.
class ParamPack {
public:
    num::Array& add(const std::string& name, num::Array value);

    num::Array& at(const std::string& name);
    const num::Array& at(const std::string& name) const;
    bool contains(const std::string& name) const { return index_.count(name) > 0; }

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    num::Array& value(std::size_t i) { return values_[i]; }
    const num::Array& value(std::size_t i) const { return values_[i]; }

    std::size_t element_count() const;

private:
    std::vector<std::string> names_;
    std::vector<num::Array> values_;
    std::unordered_map<std::string, std::size_t> index_;
};

void save_params(const std::string& path, const ParamPack& pack);
ParamPack load_params(const std::string& path);

void write_params(std::ostream& os, const ParamPack& pack);
ParamPack read_params(std::istream& is);

}  // namespace bita
