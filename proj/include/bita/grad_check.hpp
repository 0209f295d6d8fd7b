#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bita/tape.hpp"

namespace bita::num {

/// Builds a scalar loss on the tape from parameter leaves (given in the same
/// order as the `params` list passed to grad_check). Must be deterministic.
using ScalarFn = std::function<Value(Tape&, const std::vector<Value>&)>;

struct GradCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
    bool finite = true;
    bool pass = false;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double tol = 0.0;
    bool numeric_error = false;  // non-finite value or evaluation failure
    bool pass = false;
    double worst() const;
};

/// Central-difference check of analytic gradients, parameter by parameter.
/// Non-finite intermediate values are reported, never thrown.
GradCheckReport grad_check(const ScalarFn& f,
                           const std::vector<std::pair<std::string, Array>>& params,
                           double h, double tol);

}  // namespace bita::num
