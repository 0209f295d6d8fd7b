#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "bita/errors.hpp"

namespace bita::num {

/// Dense 64-bit float array, row-major, shape fixed at construction.
/// Arrays are plain values: copy/move freely, share across threads read-only.
class Array {
public:
    Array() = default;

    explicit Array(std::vector<std::size_t> shape);
    Array(std::vector<std::size_t> shape, std::vector<double> data);

    static Array scalar(double v);
    static Array zeros(std::vector<std::size_t> shape) { return Array(std::move(shape)); }
    static Array full(std::vector<std::size_t> shape, double v);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    // 2-D helpers; a rank-1 array is treated as a single row where needed.
    std::size_t rows() const;
    std::size_t cols() const;

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t r, std::size_t c);
    double at(std::size_t r, std::size_t c) const;

    bool same_shape(const Array& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

    std::string shape_str() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::string shape_str(const std::vector<std::size_t>& shape);

/// Throws DimError naming both shapes when they differ.
void check_same_shape(const Array& a, const Array& b, const char* op);

}  // namespace bita::num
