#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bita/encoders.hpp"
#include "bita/events.hpp"

namespace bita::agg {

using enc::Binder;
using enc::Tape;
using enc::Value;
using num::Array;
using num::Rng;

enum class Kind { Last, Mean, Attention, Bigru, Bita };

/// Parses the CLI tag; unknown tags are a config error (caught at startup).
Kind kind_from_string(const std::string& tag);
std::string to_string(Kind kind);
const std::vector<Kind>& all_kinds();

/// Transformer scope for the bita kind: self-attention across every edge
/// embedding in the batch, or restricted to embeddings sharing a node.
enum class ContextScope { Batch, Node };

struct MessageItem {
    Value message;  // [d_m]
    double t;       // time fed to the encoder (the engine passes deltas)
    std::uint64_t edge_id = 0;
};

/// Per destination node: chronologically ordered messages, ties in arrival
/// order. Entries are sorted by node id so iteration is deterministic.
using MessageBatch = std::vector<std::pair<events::NodeId, std::vector<MessageItem>>>;

struct NodeAggregate {
    events::NodeId node;
    Value value;  // [d_agg]
};

struct AggregateOptions {
    double dropout_rate = 0.0;
    Rng* rng = nullptr;
    bool training = false;
};

struct AggregatorRef;

/// The pluggable aggregation family. Every kind maps a node's message list to
/// one vector of width d_agg; last/mean carry no parameters.
struct Aggregator {
    Kind kind = Kind::Last;
    std::size_t d_agg = 0;
    ContextScope scope = ContextScope::Batch;
    std::size_t window = 32;  // engine-side cap on sequence length

    // attention
    std::optional<enc::Affine> attn_key;  // [d_m x d_m]
    std::optional<Array> attn_query;      // [d_m]
    // bigru / bita
    std::optional<enc::BiGru> seq_net;
    std::optional<enc::Affine> proj;  // [2 d_h -> d_agg]
    // bita
    std::optional<enc::TransformerBlock> context;

    static Aggregator create(Kind kind, std::size_t d_agg, std::size_t d_h,
                             std::size_t heads, Rng& rng,
                             ContextScope scope = ContextScope::Batch,
                             std::size_t window = 32);
    void visit(const std::string& prefix, const enc::ParamVisitor& fn);
    AggregatorRef bind(Binder& b, const std::string& prefix);
};

struct AggregatorRef {
    Kind kind = Kind::Last;
    std::size_t d_agg = 0;
    ContextScope scope = ContextScope::Batch;
    std::optional<enc::AffineRef> attn_key;
    std::optional<Value> attn_query;
    std::optional<enc::BiGruRef> seq_net;
    std::optional<enc::AffineRef> proj;
    std::optional<enc::TransformerBlockRef> context;
};

/// Routes the batch to the configured kind. Nodes with empty lists are
/// skipped; per-node output width equals d_agg for every kind.
std::vector<NodeAggregate> aggregate(Tape& t, const AggregatorRef& agg,
                                     const enc::TimeEncoderRef& time_enc,
                                     const MessageBatch& batch,
                                     const AggregateOptions& opt = {});

/// Mean-pooling readout over the given token rows (the bita readout stage,
/// exposed for direct verification).
Value readout_mean(Tape& t, Value tokens, const std::vector<std::size_t>& rows);

}  // namespace bita::agg
