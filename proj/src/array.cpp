#include "bita/array.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace bita::num {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

}  // namespace

Array::Array(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Array::Array(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != data_.size()) {
        throw DimError("array data length " + std::to_string(data_.size()) +
                       " does not match shape " + num::shape_str(shape_));
    }
}

Array Array::scalar(double v) { return Array({1}, {v}); }

Array Array::full(std::vector<std::size_t> shape, double v) {
    Array a(std::move(shape));
    for (std::size_t i = 0; i < a.size(); ++i) a.data_[i] = v;
    return a;
}

std::size_t Array::rows() const {
    if (rank() == 2) return shape_[0];
    if (rank() == 1) return 1;
    throw DimError("rows() needs rank 1 or 2, got shape " + shape_str());
}

std::size_t Array::cols() const {
    if (rank() == 2) return shape_[1];
    if (rank() == 1) return shape_[0];
    throw DimError("cols() needs rank 1 or 2, got shape " + shape_str());
}

double& Array::at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
double Array::at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

bool Array::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string Array::shape_str() const { return num::shape_str(shape_); }

std::string shape_str(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

void check_same_shape(const Array& a, const Array& b, const char* op) {
    if (!a.same_shape(b)) {
        throw DimError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                       b.shape_str());
    }
}

}  // namespace bita::num
