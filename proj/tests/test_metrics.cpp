#include <algorithm>
#include <cmath>

#include "bita/errors.hpp"
#include "bita/metrics.hpp"
#include "bita/rng.hpp"
#include "doctest.h"

using namespace bita::eval;
using bita::num::Rng;

namespace {

// Exhaustive pair enumeration, independent of the implementation.
double auc_oracle(const ScoredSet& s) {
    double wins = 0;
    for (double p : s.positives)
        for (double n : s.negatives) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
    return wins / (s.positives.size() * s.negatives.size());
}

// Brute-force AP: walk every rank in pessimistic order.
double ap_oracle(const ScoredSet& s) {
    std::vector<std::pair<double, int>> all;  // (score, is_positive)
    for (double p : s.positives) all.push_back({p, 1});
    for (double n : s.negatives) all.push_back({n, 0});
    std::sort(all.begin(), all.end(), [](auto& a, auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    double ap = 0;
    int pos_seen = 0;
    for (std::size_t r = 1; r <= all.size(); ++r)
        if (all[r - 1].second) {
            ++pos_seen;
            ap += static_cast<double>(pos_seen) / r;
        }
    return ap / static_cast<double>(s.positives.size());
}

std::size_t rank_oracle(double pos, const std::vector<double>& cands) {
    std::size_t rank = 1;
    for (double c : cands)
        if (c >= pos) ++rank;
    return rank;
}

}  // namespace

TEST_CASE("auc hand cases") {
    CHECK(auc({{0.9, 0.8}, {0.1, 0.2}}) == 1.0);
    CHECK(auc({{0.5}, {0.5}}) == 0.5);
    CHECK(auc({{0.7, 0.3}, {0.5, 0.1}}) == 0.75);
    CHECK_THROWS_AS(auc({{}, {0.5}}), bita::MetricError);
    CHECK_THROWS_AS(auc({{0.5}, {}}), bita::MetricError);
}

TEST_CASE("average_precision hand cases") {
    CHECK(average_precision({{0.9, 0.8}, {0.1, 0.2}}) == 1.0);
    CHECK(average_precision({{0.5}, {0.9}}) == 0.5);
    ScoredSet one_low;
    one_low.positives = {0.05};
    for (int i = 0; i < 9; ++i) one_low.negatives.push_back(0.1 + i * 0.05);
    CHECK(std::fabs(average_precision(one_low) - 0.1) < 1e-12);
    CHECK_THROWS_AS(average_precision({{}, {0.5}}), bita::MetricError);
}

TEST_CASE("mrr and hits hand cases") {
    // ranks 1, 2, 4
    RankTask task;
    task.items.push_back({0.9, {0.1, 0.2, 0.3}});                 // rank 1
    task.items.push_back({0.5, {0.8, 0.1, 0.2}});                 // rank 2
    task.items.push_back({0.2, {0.9, 0.8, 0.7, 0.1}});            // rank 4
    auto out = mrr_hits(task);
    CHECK(std::fabs(out.mrr - (1.0 + 0.5 + 0.25) / 3.0) < 1e-12);
    CHECK(std::fabs(out.mrr - 0.5833333333333334) < 1e-12);
    CHECK(out.hits[1] == doctest::Approx(1.0 / 3.0));
    CHECK(out.hits[3] == doctest::Approx(2.0 / 3.0));

    RankTask perfect;
    perfect.items.push_back({0.9, {0.1}});
    perfect.items.push_back({0.8, {0.2, 0.3}});
    auto p = mrr_hits(perfect);
    CHECK(p.mrr == 1.0);
    CHECK(p.hits[1] == 1.0);

    // tie with one candidate: pessimistic rank 2
    RankTask tie;
    tie.items.push_back({0.5, {0.5}});
    auto tr = mrr_hits(tie);
    CHECK(tr.mrr == 0.5);
    CHECK(tr.hits[1] == 0.0);
}

TEST_CASE("metrics match brute force on 1000 random instances") {
    Rng rng(6);
    for (int trial = 0; trial < 1000; ++trial) {
        ScoredSet s;
        const std::size_t np = 1 + rng.uniform_int(10), nn = 1 + rng.uniform_int(10);
        // quantized scores force plenty of ties
        for (std::size_t i = 0; i < np; ++i)
            s.positives.push_back(rng.uniform_int(8) / 8.0);
        for (std::size_t i = 0; i < nn; ++i)
            s.negatives.push_back(rng.uniform_int(8) / 8.0);
        CHECK(std::fabs(auc(s) - auc_oracle(s)) <= 1e-12);
        CHECK(std::fabs(average_precision(s) - ap_oracle(s)) <= 1e-12);

        RankTask task;
        const std::size_t items = 1 + rng.uniform_int(4);
        double rr = 0;
        for (std::size_t i = 0; i < items; ++i) {
            RankTask::Item item;
            item.positive = rng.uniform_int(8) / 8.0;
            const std::size_t c = 1 + rng.uniform_int(10);
            for (std::size_t j = 0; j < c; ++j)
                item.candidates.push_back(rng.uniform_int(8) / 8.0);
            rr += 1.0 / static_cast<double>(rank_oracle(item.positive, item.candidates));
            task.items.push_back(item);
        }
        auto out = mrr_hits(task);
        CHECK(std::fabs(out.mrr - rr / items) <= 1e-12);
        CHECK(out.mrr > 0.0);
        CHECK(out.mrr <= 1.0);
        CHECK(out.hits[1] <= out.hits[3]);  // non-decreasing in k
    }
}

TEST_CASE("auc invariant under strictly monotone transforms") {
    Rng rng(7);
    ScoredSet s;
    for (int i = 0; i < 20; ++i) s.positives.push_back(rng.uniform(0, 1));
    for (int i = 0; i < 20; ++i) s.negatives.push_back(rng.uniform(0, 1));
    const double base = auc(s);
    ScoredSet warped = s;
    auto warp = [](double x) { return std::exp(3.0 * x) - 0.5; };
    for (auto& v : warped.positives) v = warp(v);
    for (auto& v : warped.negatives) v = warp(v);
    CHECK(auc(warped) == base);
}

TEST_CASE("per_class_metrics on perfect predictions") {
    std::vector<std::vector<double>> probs;
    std::vector<std::uint32_t> labels;
    for (std::uint32_t c = 0; c < 3; ++c)
        for (int i = 0; i < 4; ++i) {
            std::vector<double> p(3, 0.05);
            p[c] = 0.9;
            probs.push_back(p);
            labels.push_back(c);
        }
    auto report = per_class_metrics(probs, labels, 3);
    for (const auto& m : report.per_class) {
        CHECK(m.present);
        CHECK(m.accuracy == 1.0);
        CHECK(m.fpr == 0.0);
        CHECK(m.recall == 1.0);
        CHECK(m.auc == 1.0);
        CHECK(m.tp + m.fp + m.tn + m.fn == 12);
    }
    CHECK(report.macro_f1 == 1.0);
}

TEST_CASE("per_class_metrics constant predictor on 90/10") {
    std::vector<std::vector<double>> probs;
    std::vector<std::uint32_t> labels;
    for (int i = 0; i < 90; ++i) {
        probs.push_back({0.9, 0.1});
        labels.push_back(0);
    }
    for (int i = 0; i < 10; ++i) {
        probs.push_back({0.9, 0.1});
        labels.push_back(1);
    }
    auto report = per_class_metrics(probs, labels, 2);
    CHECK(report.per_class[0].accuracy == doctest::Approx(0.9));
    CHECK(report.per_class[1].recall == 0.0);
    CHECK(report.per_class[0].recall == 1.0);
}

TEST_CASE("per_class_metrics reports N/A for an absent class") {
    std::vector<std::vector<double>> probs = {{0.7, 0.2, 0.1}, {0.2, 0.7, 0.1}};
    std::vector<std::uint32_t> labels = {0, 1};  // class 2 absent
    auto report = per_class_metrics(probs, labels, 3);
    CHECK(report.per_class[0].present);
    CHECK(report.per_class[1].present);
    CHECK_FALSE(report.per_class[2].present);
    CHECK(std::isnan(report.per_class[2].accuracy));
    CHECK(std::isnan(report.per_class[2].auc));
}
