#include "bita/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "bita/errors.hpp"

namespace bita::eval {

double auc(const ScoredSet& set) {
    if (set.positives.empty() || set.negatives.empty())
        throw MetricError("auc: needs at least one positive and one negative score");
    double wins = 0.0;
    for (double p : set.positives)
        for (double n : set.negatives) {
            if (p > n)
                wins += 1.0;
            else if (p == n)
                wins += 0.5;
        }
    return wins / (static_cast<double>(set.positives.size()) *
                   static_cast<double>(set.negatives.size()));
}

double average_precision(const ScoredSet& set) {
    if (set.positives.empty())
        throw MetricError("average_precision: needs at least one positive score");
    struct Entry {
        double score;
        bool positive;
    };
    std::vector<Entry> entries;
    entries.reserve(set.positives.size() + set.negatives.size());
    for (double s : set.positives) entries.push_back({s, true});
    for (double s : set.negatives) entries.push_back({s, false});
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        return !a.positive && b.positive;  // pessimistic: negatives first on ties
    });
    double ap = 0.0;
    std::size_t seen_pos = 0;
    for (std::size_t rank = 1; rank <= entries.size(); ++rank) {
        if (entries[rank - 1].positive) {
            ++seen_pos;
            ap += static_cast<double>(seen_pos) / static_cast<double>(rank);
        }
    }
    return ap / static_cast<double>(set.positives.size());
}

MrrHits mrr_hits(const RankTask& task, const std::vector<std::size_t>& ks) {
    if (task.items.empty()) throw MetricError("mrr_hits: empty task");
    MrrHits out;
    std::map<std::size_t, std::size_t> hit_counts;
    for (std::size_t k : ks) hit_counts[k] = 0;
    double rr_sum = 0.0;
    for (const auto& item : task.items) {
        if (item.candidates.empty())
            throw MetricError("mrr_hits: empty candidate list");
        std::size_t rank = 1;
        for (double c : item.candidates)
            if (c >= item.positive) ++rank;  // ties count as ranked above
        rr_sum += 1.0 / static_cast<double>(rank);
        for (std::size_t k : ks)
            if (rank <= k) hit_counts[k] += 1;
    }
    out.mrr = rr_sum / static_cast<double>(task.items.size());
    for (std::size_t k : ks)
        out.hits[k] =
            static_cast<double>(hit_counts[k]) / static_cast<double>(task.items.size());
    return out;
}

PerClassReport per_class_metrics(const std::vector<std::vector<double>>& probs,
                                 const std::vector<std::uint32_t>& labels, std::size_t k) {
    if (k < 2) throw MetricError("per_class_metrics: needs K >= 2");
    if (probs.size() != labels.size())
        throw MetricError("per_class_metrics: probs/labels length mismatch");
    const std::size_t n = probs.size();
    std::vector<std::size_t> pred(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (probs[i].size() != k)
            throw MetricError("per_class_metrics: distribution width mismatch");
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (probs[i][c] > probs[i][best]) best = c;
        pred[i] = best;
    }

    PerClassReport report;
    report.per_class.resize(k);
    const double nan = std::nan("");
    double f1_sum = 0.0;
    std::size_t f1_classes = 0;
    for (std::size_t c = 0; c < k; ++c) {
        ClassMetrics& m = report.per_class[c];
        ScoredSet ovr;
        for (std::size_t i = 0; i < n; ++i) {
            const bool is_c = labels[i] == c;
            const bool said_c = pred[i] == c;
            if (is_c && said_c) m.tp++;
            if (!is_c && said_c) m.fp++;
            if (is_c && !said_c) m.fn++;
            if (!is_c && !said_c) m.tn++;
            (is_c ? ovr.positives : ovr.negatives).push_back(probs[i][c]);
        }
        m.present = m.tp + m.fn > 0;
        if (!m.present) {
            m.accuracy = m.precision = m.recall = m.auc = nan;
            m.tpr = m.tnr = m.fpr = m.fnr = nan;
            continue;
        }
        const auto total = static_cast<double>(n);
        m.accuracy = static_cast<double>(m.tp + m.tn) / total;
        m.precision =
            m.tp + m.fp > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp)
                            : 0.0;
        m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
        m.tpr = m.recall;
        m.fnr = 1.0 - m.recall;
        if (m.tn + m.fp > 0) {
            m.tnr = static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp);
            m.fpr = static_cast<double>(m.fp) / static_cast<double>(m.tn + m.fp);
        } else {
            m.tnr = nan;
            m.fpr = nan;
        }
        m.auc = ovr.negatives.empty() ? nan : auc(ovr);
        const double denom = m.precision + m.recall;
        f1_sum += denom > 0.0 ? 2.0 * m.precision * m.recall / denom : 0.0;
        ++f1_classes;
    }
    report.macro_f1 = f1_classes > 0 ? f1_sum / static_cast<double>(f1_classes) : 0.0;
    return report;
}

}  // namespace bita::eval
