#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "bita/array.hpp"
#include "bita/errors.hpp"

namespace bita::io {

// Little-endian binary primitives shared by every on-disk format.

void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_f64(std::ostream& os, double v);
void write_string(std::ostream& os, const std::string& s);
void write_array(std::ostream& os, const num::Array& a);

std::uint32_t read_u32(std::istream& is);
std::uint64_t read_u64(std::istream& is);
double read_f64(std::istream& is);
std::string read_string(std::istream& is);
num::Array read_array(std::istream& is);

std::ofstream open_out(const std::string& path);
std::ifstream open_in(const std::string& path);

/// Reads magic/version and throws IoError on mismatch or truncation.
void expect_magic(std::istream& is, std::uint32_t magic, std::uint32_t version,
                  const char* what);

}  // namespace bita::io
