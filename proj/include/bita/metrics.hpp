#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace bita::eval {

struct ScoredSet {
    std::vector<double> positives;
    std::vector<double> negatives;
};

/// Mann-Whitney statistic: P(pos > neg) + 0.5 P(tie).
double auc(const ScoredSet& set);

/// Area under the precision-recall step curve in descending-score order;
/// ties are broken pessimistically (negatives ranked first).
double average_precision(const ScoredSet& set);

/// Per positive: its score against a candidate negative-score list.
struct RankTask {
    struct Item {
        double positive;
        std::vector<double> candidates;
    };
    std::vector<Item> items;
};

struct MrrHits {
    double mrr = 0.0;
    std::map<std::size_t, double> hits;  // k -> fraction with rank <= k
};

/// rank = 1 + #(candidates > positive) + #(ties): ties rank the positive lower.
MrrHits mrr_hits(const RankTask& task, const std::vector<std::size_t>& ks = {1, 3});

/// One-vs-rest metrics for a single class; NaN marks N/A entries.
struct ClassMetrics {
    bool present = false;  // class appears in the labels
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0, precision = 0.0, recall = 0.0, auc = 0.0;
    double tpr = 0.0, tnr = 0.0, fpr = 0.0, fnr = 0.0;
};

struct PerClassReport {
    std::vector<ClassMetrics> per_class;
    double macro_f1 = 0.0;  // over present classes
};

/// probs: one distribution of width K per sample; labels: true class indices.
PerClassReport per_class_metrics(const std::vector<std::vector<double>>& probs,
                                 const std::vector<std::uint32_t>& labels, std::size_t k);

}  // namespace bita::eval
