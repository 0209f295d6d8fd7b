#include "bita/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace bita::num {

double GradCheckReport::worst() const {
    double w = 0.0;
    for (const auto& e : entries) w = std::max(w, e.max_rel_err);
    return w;
}

namespace {

// Forward-only evaluation with one element perturbed; nan on failure.
double eval_at(const ScalarFn& f, const std::vector<std::pair<std::string, Array>>& params,
               std::size_t pi, std::size_t elem, double delta) {
    try {
        Tape tape;
        std::vector<Value> leaves;
        leaves.reserve(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            Array a = params[i].second;
            if (i == pi) a[elem] += delta;
            leaves.push_back(tape.leaf(std::move(a)));
        }
        const Value loss = f(tape, leaves);
        if (tape.val(loss).size() != 1) return std::nan("");
        return tape.val(loss)[0];
    } catch (const Error&) {
        return std::nan("");
    }
}

}  // namespace

GradCheckReport grad_check(const ScalarFn& f,
                           const std::vector<std::pair<std::string, Array>>& params,
                           double h, double tol) {
    if (h <= 0.0) throw ContractError("grad_check: h must be positive");
    GradCheckReport report;
    report.tol = tol;

    // Analytic pass.
    std::vector<Array> analytic;
    try {
        Tape tape;
        std::vector<Value> leaves;
        leaves.reserve(params.size());
        for (const auto& [name, a] : params) leaves.push_back(tape.leaf(a));
        const Value loss = f(tape, leaves);
        tape.backward(loss);
        for (const Value& leaf : leaves) {
            analytic.push_back(tape.grad(leaf));
            if (!analytic.back().all_finite()) report.numeric_error = true;
        }
    } catch (const Error&) {
        report.numeric_error = true;
    }

    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        GradCheckEntry entry;
        entry.name = params[pi].first;
        const std::size_t count = params[pi].second.size();
        for (std::size_t e = 0; e < count; ++e) {
            const double fp = eval_at(f, params, pi, e, +h);
            const double fm = eval_at(f, params, pi, e, -h);
            const double numeric = (fp - fm) / (2.0 * h);
            const double a =
                (pi < analytic.size() && e < analytic[pi].size()) ? analytic[pi][e]
                                                                  : std::nan("");
            if (!std::isfinite(numeric) || !std::isfinite(a)) {
                entry.finite = false;
                report.numeric_error = true;
                continue;
            }
            const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-6});
            entry.max_rel_err = std::max(entry.max_rel_err, std::fabs(a - numeric) / denom);
        }
        entry.pass = entry.finite && entry.max_rel_err <= tol;
        report.entries.push_back(std::move(entry));
    }

    report.pass = !report.numeric_error;
    for (const auto& e : report.entries) report.pass = report.pass && e.pass;
    return report;
}

}  // namespace bita::num
