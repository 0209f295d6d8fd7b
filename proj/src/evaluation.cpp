#include "bita/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "bita/errors.hpp"

namespace bita::eval {

EvalMode eval_mode_from_string(const std::string& s) {
    if (s == "transductive") return EvalMode::Transductive;
    if (s == "inductive") return EvalMode::Inductive;
    if (s == "both") return EvalMode::Both;
    throw ConfigError("unknown eval mode '" + s + "' (transductive|inductive|both)");
}

namespace {

std::vector<CurvePoint> roc_points(const ScoredSet& set, std::size_t max_points) {
    std::vector<double> thresholds;
    for (double s : set.positives) thresholds.push_back(s);
    for (double s : set.negatives) thresholds.push_back(s);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::vector<CurvePoint> out;
    const std::size_t stride = std::max<std::size_t>(1, thresholds.size() / max_points);
    for (std::size_t i = 0; i < thresholds.size(); i += stride) {
        const double thr = thresholds[i];
        std::size_t tp = 0, fp = 0;
        for (double s : set.positives)
            if (s >= thr) ++tp;
        for (double s : set.negatives)
            if (s >= thr) ++fp;
        CurvePoint p;
        p.threshold = thr;
        p.x = static_cast<double>(fp) / static_cast<double>(set.negatives.size());
        p.y = static_cast<double>(tp) / static_cast<double>(set.positives.size());
        out.push_back(p);
    }
    return out;
}

std::vector<CurvePoint> pr_points(const ScoredSet& set, std::size_t max_points) {
    std::vector<double> thresholds;
    for (double s : set.positives) thresholds.push_back(s);
    for (double s : set.negatives) thresholds.push_back(s);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::vector<CurvePoint> out;
    const std::size_t stride = std::max<std::size_t>(1, thresholds.size() / max_points);
    for (std::size_t i = 0; i < thresholds.size(); i += stride) {
        const double thr = thresholds[i];
        std::size_t tp = 0, fp = 0;
        for (double s : set.positives)
            if (s >= thr) ++tp;
        for (double s : set.negatives)
            if (s >= thr) ++fp;
        CurvePoint p;
        p.threshold = thr;
        p.x = static_cast<double>(tp) / static_cast<double>(set.positives.size());
        p.y = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
        out.push_back(p);
    }
    return out;
}

struct Collected {
    std::vector<double> pos;
    std::vector<std::vector<double>> cands;  // [0] = AUC negative, rest = rank pool
    std::vector<std::vector<double>> categories;
    std::vector<std::uint32_t> labels;
    std::vector<bool> inductive;
};

EvalReport build_report(const Collected& all, bool want_inductive,
                        const std::vector<std::string>& category_names) {
    EvalReport r;
    r.mode = want_inductive ? "inductive" : "transductive";
    r.category_names = category_names;

    ScoredSet set;
    RankTask task;
    std::vector<std::vector<double>> probs;
    std::vector<std::uint32_t> labels;
    for (std::size_t i = 0; i < all.pos.size(); ++i) {
        if (all.inductive[i] != want_inductive) continue;
        set.positives.push_back(all.pos[i]);
        set.negatives.push_back(all.cands[i][0]);
        RankTask::Item item;
        item.positive = all.pos[i];
        item.candidates.assign(all.cands[i].begin() + 1, all.cands[i].end());
        task.items.push_back(std::move(item));
        probs.push_back(all.categories[i]);
        labels.push_back(all.labels[i]);
    }
    r.event_count = set.positives.size();
    if (r.event_count == 0) {
        r.empty = true;
        return r;
    }
    r.auc = auc(set);
    r.ap = average_precision(set);
    auto mh = mrr_hits(task);
    r.mrr = mh.mrr;
    r.hits = mh.hits;

    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
    for (double s : set.positives) (s > 0.5 ? tp : fn)++;
    for (double s : set.negatives) (s > 0.5 ? fp : tn)++;
    r.tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
    r.fnr = 1.0 - r.tpr;
    r.tnr = static_cast<double>(tn) / static_cast<double>(fp + tn);
    r.fpr = 1.0 - r.tnr;

    if (category_names.size() >= 2)
        r.per_class = per_class_metrics(probs, labels, category_names.size());
    r.roc = roc_points(set, 200);
    r.pr = pr_points(set, 200);
    return r;
}

}  // namespace

std::vector<EvalReport> evaluate(engine::Engine& eng, const events::EventStream& partition,
                                 const std::vector<bool>& inductive_flags, EvalMode mode,
                                 num::Rng& rng, std::size_t candidate_count) {
    Collected all;
    const auto plan =
        engine::Engine::batch_plan(partition.events.size(), eng.config().batch_size);
    for (const auto& [begin, end] : plan) {
        std::span<const events::TemporalEvent> span(partition.events.data() + begin,
                                                    end - begin);
        // negatives drawn per event in stream order: one for AUC/AP, then the
        // ranking candidates
        std::vector<std::vector<events::NodeId>> candidates(span.size());
        for (std::size_t i = 0; i < span.size(); ++i) {
            candidates[i].reserve(candidate_count + 1);
            for (std::size_t c = 0; c < candidate_count + 1; ++c)
                candidates[i].push_back(events::sample_negative(span[i], partition, rng));
        }
        engine::ProcessOptions opt;
        opt.extra_candidates = &candidates;
        auto result = eng.process_batch(span, opt);
        for (std::size_t i = 0; i < span.size(); ++i) {
            all.pos.push_back(result.link_probs[i]);
            all.cands.push_back(result.candidate_probs[i]);
            all.categories.push_back(result.categories[i]);
            all.labels.push_back(span[i].category);
            const std::size_t global = begin + i;
            all.inductive.push_back(global < inductive_flags.size() &&
                                    inductive_flags[global]);
        }
    }

    std::vector<EvalReport> reports;
    if (mode == EvalMode::Transductive || mode == EvalMode::Both)
        reports.push_back(build_report(all, false, partition.category_names));
    if (mode == EvalMode::Inductive || mode == EvalMode::Both)
        reports.push_back(build_report(all, true, partition.category_names));
    return reports;
}

namespace {

// link probabilities per batch of a full chronological eval replay
std::vector<std::vector<double>> replay_probs(const EngineFactory& make_engine,
                                              const events::EventStream& stream) {
    engine::Engine eng = make_engine();
    eng.reset_dynamic_state();
    std::vector<std::vector<double>> out;
    const auto plan =
        engine::Engine::batch_plan(stream.events.size(), eng.config().batch_size);
    for (const auto& [begin, end] : plan) {
        std::span<const events::TemporalEvent> span(stream.events.data() + begin,
                                                    end - begin);
        engine::ProcessOptions opt;
        out.push_back(eng.process_batch(span, opt).link_probs);
    }
    return out;
}

}  // namespace

CausalityReport causality_audit(const EngineFactory& make_engine,
                                const events::EventStream& stream, std::size_t max_probes,
                                double tolerance) {
    CausalityReport report;
    report.tolerance = tolerance;
    if (stream.events.empty()) return report;

    const auto full_a = replay_probs(make_engine, stream);
    const auto full_b = replay_probs(make_engine, stream);
    report.determinism_ok = full_a == full_b;
    if (!report.determinism_ok) return report;

    // probe batches: those inside the test span (first event past the 85th
    // percentile), evenly thinned to max_probes
    const std::size_t batch_size = make_engine().config().batch_size;
    const auto split = events::temporal_split(stream);
    const auto plan = engine::Engine::batch_plan(stream.events.size(), batch_size);
    std::vector<std::size_t> probe_batches;
    for (std::size_t k = 0; k < plan.size(); ++k)
        if (stream.events[plan[k].first].t > split.spec.t_test) probe_batches.push_back(k);
    if (probe_batches.empty() && !plan.empty()) probe_batches.push_back(plan.size() - 1);
    if (probe_batches.size() > max_probes) {
        std::vector<std::size_t> thinned;
        const double stride = static_cast<double>(probe_batches.size()) /
                              static_cast<double>(max_probes);
        for (std::size_t i = 0; i < max_probes; ++i)
            thinned.push_back(probe_batches[static_cast<std::size_t>(i * stride)]);
        probe_batches = std::move(thinned);
    }

    double sum = 0.0;
    std::vector<double> pa, pb;
    for (std::size_t k : probe_batches) {
        const double t_probe = stream.events[plan[k].first].t;
        // past-only stream: drop everything after the probe time
        events::EventStream truncated = stream;
        truncated.events.clear();
        for (const auto& e : stream.events) {
            if (e.t > t_probe) break;  // sorted: suffix deletion
            truncated.events.push_back(e);
        }
        const auto past_only = replay_probs(make_engine, truncated);
        if (past_only.size() <= k) continue;
        const auto& probe_full = full_a[k];
        const auto& probe_past = past_only[k];
        const std::size_t n = std::min(probe_full.size(), probe_past.size());
        for (std::size_t i = 0; i < n; ++i) {
            const double d = std::fabs(probe_full[i] - probe_past[i]);
            report.delta_max = std::max(report.delta_max, d);
            sum += d;
            pa.push_back(probe_full[i]);
            pb.push_back(probe_past[i]);
            ++report.compared;
        }
        ++report.probes;
    }
    report.delta_mean = report.compared > 0 ? sum / static_cast<double>(report.compared)
                                            : 0.0;

    // Pearson r between the two prediction vectors
    if (report.compared >= 2) {
        double ma = 0, mb = 0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            ma += pa[i];
            mb += pb[i];
        }
        ma /= static_cast<double>(pa.size());
        mb /= static_cast<double>(pb.size());
        double cov = 0, va = 0, vb = 0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            cov += (pa[i] - ma) * (pb[i] - mb);
            va += (pa[i] - ma) * (pa[i] - ma);
            vb += (pb[i] - mb) * (pb[i] - mb);
        }
        report.pearson_r = (va > 0 && vb > 0) ? cov / std::sqrt(va * vb)
                                              : (pa == pb ? 1.0 : 0.0);
    } else {
        report.pearson_r = 1.0;
    }
    report.pass = report.determinism_ok && report.delta_max <= tolerance;
    return report;
}

OrderInvarianceReport order_invariance_audit(const EngineFactory& make_engine,
                                             const events::EventStream& stream,
                                             std::size_t runs, std::uint64_t shuffle_seed,
                                             bool shuffle) {
    if (runs < 2) throw ContractError("order_invariance_audit: needs R >= 2 runs");
    auto split = events::temporal_split(stream);

    std::vector<std::vector<double>> per_run;  // test-span link probs per run
    for (std::size_t r = 0; r < runs; ++r) {
        engine::Engine eng = make_engine();
        engine::TrainOptions topt;
        topt.fixed_epochs = true;
        topt.allow_unordered = shuffle;
        num::Rng order_rng(shuffle_seed + 0x9e3779b97f4a7c15ULL * (r + 1));
        if (shuffle)
            topt.batch_order = [&order_rng](std::size_t n_batches, std::size_t) {
                return order_rng.permutation(n_batches);
            };
        eng.train(split, topt);

        // fixed test-edge predictions from a chronological, gradient-free pass
        eng.reset_dynamic_state();
        std::vector<double> probs;
        const auto plan =
            engine::Engine::batch_plan(stream.events.size(), eng.config().batch_size);
        for (const auto& [begin, end] : plan) {
            std::span<const events::TemporalEvent> span(stream.events.data() + begin,
                                                        end - begin);
            engine::ProcessOptions opt;
            auto result = eng.process_batch(span, opt);
            for (std::size_t i = 0; i < span.size(); ++i)
                if (span[i].t > split.spec.t_test) probs.push_back(result.link_probs[i]);
        }
        per_run.push_back(std::move(probs));
    }

    OrderInvarianceReport report;
    report.runs = runs;
    report.edges = per_run.front().size();
    std::size_t below = 0;
    for (std::size_t i = 0; i < report.edges; ++i) {
        bool all_equal = true;
        for (const auto& run : per_run) all_equal = all_equal && run[i] == per_run[0][i];
        double var = 0.0;
        if (!all_equal) {
            double mean = 0.0;
            for (const auto& run : per_run) mean += run[i];
            mean /= static_cast<double>(runs);
            for (const auto& run : per_run) var += (run[i] - mean) * (run[i] - mean);
            var /= static_cast<double>(runs - 1);
        }
        report.mean_variance += var;
        report.max_variance = std::max(report.max_variance, var);
        if (var < 1e-2) ++below;
    }
    if (report.edges > 0) {
        report.mean_variance /= static_cast<double>(report.edges);
        report.fraction_below_1e2 =
            static_cast<double>(below) / static_cast<double>(report.edges);
    }
    return report;
}

CausalityReport causality_audit(const engine::EngineConfig& config,
                                const events::EventStream& stream, std::size_t max_probes,
                                double tolerance) {
    return causality_audit([&] { return engine::Engine(config, stream); }, stream,
                           max_probes, tolerance);
}

OrderInvarianceReport order_invariance_audit(const engine::EngineConfig& config,
                                             const events::EventStream& stream,
                                             std::size_t runs, std::uint64_t shuffle_seed,
                                             bool shuffle) {
    return order_invariance_audit([&] { return engine::Engine(config, stream); }, stream,
                                  runs, shuffle_seed, shuffle);
}

}  // namespace bita::eval
