#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bita/aggregators.hpp"
#include "bita/encoders.hpp"
#include "bita/events.hpp"
#include "bita/heads.hpp"

namespace bita::engine {

using events::EventStream;
using events::NodeId;
using events::TemporalEvent;
using num::Array;
using num::Rng;

struct EngineConfig {
    agg::Kind kind = agg::Kind::Bita;
    std::size_t d_mem = 9;
    std::size_t d_msg = 100;
    std::size_t d_time = 100;
    std::size_t d_node = 100;
    std::size_t bigru_hidden = 32;
    std::size_t heads = 2;
    double dropout = 0.1;
    std::size_t batch_size = 128;
    double lr = 1e-4;
    std::size_t epochs = 50;
    std::size_t patience = 5;
    double lambda = 1.0;
    double gamma = 2.0;
    std::uint64_t seed = 0;
    std::size_t window = 32;
    agg::ContextScope scope = agg::ContextScope::Batch;
    bool time_absolute = false;  // encode absolute t instead of deltas
    std::size_t negatives_per_positive = 1;
    /// Test-only fault injection: store the current batch's raw messages
    /// before prediction, breaking causality on purpose.
    bool leak_current_batch = false;
};

/// All learnable blocks, visited in a fixed order for binding, optimizer
/// state, and serialization.
struct Model {
    enc::TimeEncoder time_enc;
    enc::MessageFunction msg_fn;
    agg::Aggregator aggregator;
    enc::GruCell memory_upd;  // d_in = d_msg (aggregate width), d_h = d_mem
    enc::Affine embed;        // [d_mem + d_time -> d_node]
    heads::LinkHead link_head;
    heads::CategoryHead cat_head;

    void visit(const enc::ParamVisitor& fn);
    std::size_t parameter_count();
};

struct ModelRefs {
    enc::TimeEncoderRef time_enc;
    enc::MessageFunctionRef msg_fn;
    agg::AggregatorRef aggregator;
    enc::GruCellRef memory_upd;
    enc::AffineRef embed;
    heads::LinkHeadRef link_head;
    heads::CategoryHeadRef cat_head;
};

/// Per-node slot holding the single most recent pre-batch raw interaction.
struct RawSlot {
    NodeId partner = 0;
    double t = 0.0;
    std::uint64_t edge_key = 0;
    std::vector<double> features;
};

struct ProcessOptions {
    bool train = false;
    /// Eval-time loss (negatives drawn, no optimizer step); implied by train.
    bool compute_loss = false;
    /// Out-of-order batches tolerated (order-invariance audit only).
    bool allow_unordered = false;
    /// Per event, extra destination candidates to score in eval mode.
    const std::vector<std::vector<NodeId>>* extra_candidates = nullptr;
    /// Negative draws come from this generator instead of the engine's; the
    /// validation replay uses a fixed seed so epochs compare like for like.
    Rng* rng_override = nullptr;
};

struct BatchResult {
    std::vector<double> link_probs;               // per event, positive pair
    std::vector<std::vector<double>> categories;  // per event, K-distribution
    std::vector<std::vector<double>> candidate_probs;
    double loss = 0.0;
    bool has_loss = false;
};

struct EpochLog {
    double train_loss = 0.0;
    double val_loss = 0.0;
    bool improved = false;
};

struct TrainLog {
    std::vector<EpochLog> epochs;
    std::size_t best_epoch = 0;  // 1-based
    double best_val_loss = 0.0;
};

struct TrainOptions {
    /// Batch-order permutation per epoch (order-invariance audit hook);
    /// identity when absent.
    std::function<std::vector<std::size_t>(std::size_t n_batches, std::size_t epoch)>
        batch_order;
    bool allow_unordered = false;
    /// When set, skip early stopping and run exactly `epochs` epochs.
    bool fixed_epochs = false;
};

/// The TGN processing loop. Node memories are updated only from raw messages
/// stored by previous batches; the current batch's raw messages are stored
/// after its loss is evaluated, so no interaction feeds its own prediction.
class Engine {
public:
    Engine(const EngineConfig& config, const EventStream& stream);

    const EngineConfig& config() const { return config_; }
    Model& model() { return model_; }
    std::size_t category_count() const { return k_; }
    std::size_t node_count() const { return n_nodes_; }

    void set_class_weights(Array alpha);

    /// Chronological batches of the configured size.
    static std::vector<std::pair<std::size_t, std::size_t>> batch_plan(
        std::size_t n_events, std::size_t batch_size);

    BatchResult process_batch(std::span<const TemporalEvent> batch,
                              const ProcessOptions& opt);

    /// Replays a partition through batches; loss averaged over events.
    double replay(const EventStream& part, const ProcessOptions& opt);

    TrainLog train(const events::SplitResult& split, const TrainOptions& opt = {});

    /// Memory, store, history, and clock back to the stream epoch; parameters,
    /// optimizer state, and rng are kept.
    void reset_dynamic_state();

    /// Forward-only node embedding at time t (t may not precede the node's
    /// last update).
    Array compute_embedding(NodeId node, double t);

    void save(const std::string& path) const;
    static Engine restore(const std::string& path);
    void serialize(std::ostream& os) const;
    static Engine deserialize(std::istream& is);
    /// Shape checks against the stream a checkpoint is about to process.
    void check_compatible(const EventStream& stream) const;

    // -- introspection (tests, audits) ---------------------------------------
    std::size_t raw_store_size() const;
    const std::optional<RawSlot>& raw_slot(NodeId node) const { return slots_[node]; }
    double last_update(NodeId node) const { return last_update_[node]; }
    const Array& memory() const { return memory_; }
    const std::string& last_batch_phases() const { return phases_; }
    Rng& rng() { return rng_; }
    std::uint64_t step_count() const { return step_; }

private:
    Engine() = default;

    ModelRefs bind_model(enc::Binder& binder);
    void ensure_node(NodeId node);
    void adam_step(enc::Binder& binder, num::Tape& tape);
    void store_batch(std::span<const TemporalEvent> batch);

    EngineConfig config_;
    std::size_t k_ = 0;  // category count
    std::size_t feat_width_ = 0;
    std::size_t n_nodes_ = 0;
    NodeId attacker_count_ = 0;

    Model model_;
    heads::FocalLossCfg focal_;

    // optimizer state, parallel to visit order
    std::vector<Array> adam_m_;
    std::vector<Array> adam_v_;
    std::uint64_t step_ = 0;

    // dynamic state
    Array memory_;  // [n_nodes x d_mem]
    std::vector<double> last_update_;
    std::vector<std::optional<RawSlot>> slots_;
    std::map<std::uint64_t, std::deque<RawSlot>> history_;  // per ordered edge
    double clock_ = 0.0;
    Rng rng_;

    std::string phases_;
};

std::uint64_t edge_key(NodeId src, NodeId dst);

}  // namespace bita::engine
