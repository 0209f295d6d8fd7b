#pragma once

#include <string>
#include <vector>

#include "bita/engine.hpp"
#include "bita/metrics.hpp"

namespace bita::eval {

enum class EvalMode { Transductive, Inductive, Both };

EvalMode eval_mode_from_string(const std::string& s);

struct CurvePoint {
    double threshold = 0.0;
    double x = 0.0;  // ROC: FPR, PR: recall
    double y = 0.0;  // ROC: TPR, PR: precision
};

struct EvalReport {
    std::string mode;  // "transductive" or "inductive"
    bool empty = false;
    std::size_t event_count = 0;
    double auc = 0.0;
    double ap = 0.0;
    double mrr = 0.0;
    std::map<std::size_t, double> hits;
    // link-level confusion rates at threshold 0.5
    double tpr = 0.0, tnr = 0.0, fpr = 0.0, fnr = 0.0;
    PerClassReport per_class;
    std::vector<std::string> category_names;
    std::vector<CurvePoint> roc;
    std::vector<CurvePoint> pr;
};

/// Replays the partition chronologically through a memory-updating,
/// gradient-free pass; scores every positive against one sampled negative
/// (AUC/AP) and a candidate list (MRR/Hits). Filters per mode afterwards, so
/// Both costs a single replay. Mutates the engine's dynamic state.
std::vector<EvalReport> evaluate(engine::Engine& eng, const events::EventStream& partition,
                                 const std::vector<bool>& inductive_flags, EvalMode mode,
                                 num::Rng& rng, std::size_t candidate_count = 50);

/// Builds a fresh engine for one audit replay; must be deterministic.
using EngineFactory = std::function<engine::Engine()>;

struct CausalityReport {
    std::size_t probes = 0;
    std::size_t compared = 0;
    double delta_max = 0.0;
    double delta_mean = 0.0;
    double pearson_r = 1.0;
    double tolerance = 0.0;
    bool determinism_ok = true;
    bool pass = false;
};

/// For up to max_probes probe times (first-event times of batches in the test
/// span): replays the full stream and the stream truncated at the probe time,
/// and compares the probe batch's link probabilities. Each replay starts from
/// a freshly built engine so runs differ only by the deleted future events.
CausalityReport causality_audit(const EngineFactory& make_engine,
                                const events::EventStream& stream,
                                std::size_t max_probes = 20, double tolerance = 0.0);
CausalityReport causality_audit(const engine::EngineConfig& config,
                                const events::EventStream& stream,
                                std::size_t max_probes = 20, double tolerance = 0.0);

struct OrderInvarianceReport {
    std::size_t runs = 0;
    std::size_t edges = 0;
    double mean_variance = 0.0;
    double max_variance = 0.0;
    double fraction_below_1e2 = 0.0;
};

/// R short training runs over shuffled mini-batch orders (within-batch order
/// preserved); reports per-edge prediction variance on the test span.
/// shuffle=false keeps the chronological order in every run (the runs are
/// then identical and the variance is exactly zero).
OrderInvarianceReport order_invariance_audit(const EngineFactory& make_engine,
                                             const events::EventStream& stream,
                                             std::size_t runs,
                                             std::uint64_t shuffle_seed = 1,
                                             bool shuffle = true);
OrderInvarianceReport order_invariance_audit(const engine::EngineConfig& config,
                                             const events::EventStream& stream,
                                             std::size_t runs,
                                             std::uint64_t shuffle_seed = 1,
                                             bool shuffle = true);

}  // namespace bita::eval
