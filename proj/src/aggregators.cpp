#include "bita/aggregators.hpp"

#include <algorithm>
#include <cmath>

#include "bita/errors.hpp"

namespace bita::agg {

Kind kind_from_string(const std::string& tag) {
    if (tag == "last") return Kind::Last;
    if (tag == "mean") return Kind::Mean;
    if (tag == "attention") return Kind::Attention;
    if (tag == "bigru") return Kind::Bigru;
    if (tag == "bita") return Kind::Bita;
    throw ConfigError("unknown aggregator tag '" + tag +
                      "' (expected last|mean|attention|bigru|bita)");
}

std::string to_string(Kind kind) {
    switch (kind) {
        case Kind::Last: return "last";
        case Kind::Mean: return "mean";
        case Kind::Attention: return "attention";
        case Kind::Bigru: return "bigru";
        case Kind::Bita: return "bita";
    }
    return "?";
}

const std::vector<Kind>& all_kinds() {
    static const std::vector<Kind> kinds = {Kind::Last, Kind::Mean, Kind::Attention,
                                            Kind::Bigru, Kind::Bita};
    return kinds;
}

Aggregator Aggregator::create(Kind kind, std::size_t d_agg, std::size_t d_h,
                              std::size_t heads, Rng& rng, ContextScope scope,
                              std::size_t window) {
    Aggregator a;
    a.kind = kind;
    a.d_agg = d_agg;
    a.scope = scope;
    a.window = window;
    switch (kind) {
        case Kind::Last:
        case Kind::Mean:
            break;
        case Kind::Attention:
            a.attn_key = enc::Affine::create(d_agg, d_agg, rng);
            a.attn_query = Array({d_agg});  // zero start: uniform weights
            break;
        case Kind::Bigru:
            a.seq_net = enc::BiGru::create(d_agg, d_h, rng);
            a.proj = enc::Affine::create(2 * d_h, d_agg, rng);
            break;
        case Kind::Bita:
            a.seq_net = enc::BiGru::create(d_agg, d_h, rng);
            a.proj = enc::Affine::create(2 * d_h, d_agg, rng);
            a.context = enc::TransformerBlock::create(d_agg, heads, rng);
            break;
    }
    return a;
}

void Aggregator::visit(const std::string& prefix, const enc::ParamVisitor& fn) {
    if (attn_key) attn_key->visit(prefix + ".key", fn);
    if (attn_query) fn(prefix + ".query", *attn_query);
    if (seq_net) seq_net->visit(prefix + ".seq", fn);
    if (proj) proj->visit(prefix + ".proj", fn);
    if (context) context->visit(prefix + ".ctx", fn);
}

AggregatorRef Aggregator::bind(Binder& b, const std::string& prefix) {
    AggregatorRef r;
    r.kind = kind;
    r.d_agg = d_agg;
    r.scope = scope;
    if (attn_key) r.attn_key = attn_key->bind(b, prefix + ".key");
    if (attn_query) r.attn_query = b.bind(prefix + ".query", *attn_query);
    if (seq_net) r.seq_net = seq_net->bind(b, prefix + ".seq");
    if (proj) r.proj = proj->bind(b, prefix + ".proj");
    if (context) r.context = context->bind(b, prefix + ".ctx");
    return r;
}

namespace {

void check_batch(Tape& t, const AggregatorRef& agg, const MessageBatch& batch) {
    for (const auto& [node, items] : batch) {
        double prev = -std::numeric_limits<double>::infinity();
        for (const auto& item : items) {
            if (t.val(item.message).size() != agg.d_agg)
                throw DimError("aggregate: message width " +
                               t.val(item.message).shape_str() + " != d_agg " +
                               std::to_string(agg.d_agg));
            if (item.t < prev)
                throw ContractError("aggregate: node " + std::to_string(node) +
                                    " messages out of chronological order");
            prev = item.t;
        }
    }
}

Value encode_sequence(Tape& t, const enc::TimeEncoderRef& time_enc,
                      const AggregatorRef& agg, const std::vector<MessageItem>& items) {
    std::vector<Value> xs;
    xs.reserve(items.size());
    for (const auto& item : items)
        xs.push_back(t.add(item.message, enc::time_encode(t, time_enc, item.t)));
    auto out = enc::bigru_encode(t, *agg.seq_net, xs);
    return out.final;
}

}  // namespace

Value readout_mean(Tape& t, Value tokens, const std::vector<std::size_t>& rows) {
    return t.mean_rows(t.select_rows(tokens, rows));
}

std::vector<NodeAggregate> aggregate(Tape& t, const AggregatorRef& agg,
                                     const enc::TimeEncoderRef& time_enc,
                                     const MessageBatch& batch,
                                     const AggregateOptions& opt) {
    check_batch(t, agg, batch);
    std::vector<NodeAggregate> out;

    switch (agg.kind) {
        case Kind::Last: {
            // chronological + stable arrival order means the last entry is the
            // latest-t, latest-arrival message
            for (const auto& [node, items] : batch) {
                if (items.empty()) continue;
                out.push_back({node, items.back().message});
            }
            break;
        }
        case Kind::Mean: {
            for (const auto& [node, items] : batch) {
                if (items.empty()) continue;
                std::vector<Value> rows;
                rows.reserve(items.size());
                for (const auto& item : items) rows.push_back(item.message);
                out.push_back({node, t.mean_rows(t.stack_rows(rows))});
            }
            break;
        }
        case Kind::Attention: {
            const double scale = 1.0 / std::sqrt(static_cast<double>(agg.d_agg));
            for (const auto& [node, items] : batch) {
                if (items.empty()) continue;
                std::vector<Value> rows;
                for (const auto& item : items) rows.push_back(item.message);
                Value m = t.stack_rows(rows);                       // [n x d]
                Value keys = enc::apply_rows(t, *agg.attn_key, m);  // [n x d]
                Value q = t.reshape(*agg.attn_query, {agg.d_agg, 1});
                Value scores =
                    t.affine_const(t.reshape(t.matmul(keys, q), {items.size()}), scale, 0.0);
                Value weights = t.softmax(scores, 0);
                Value mixed = t.matmul(t.reshape(weights, {1, items.size()}), m);
                out.push_back({node, t.reshape(mixed, {agg.d_agg})});
            }
            break;
        }
        case Kind::Bigru: {
            for (const auto& [node, items] : batch) {
                if (items.empty()) continue;
                Value final = encode_sequence(t, time_enc, agg, items);
                out.push_back({node, enc::apply(t, *agg.proj, final)});
            }
            break;
        }
        case Kind::Bita: {
            // Step 4.1: per edge-sequence bidirectional encoding; Step 4.2:
            // joint self-attention across the batch's edge embeddings;
            // Step 4.3: per-node mean-pool readout.
            struct TokenGroup {
                events::NodeId node;
                std::vector<std::size_t> token_rows;
            };
            std::vector<TokenGroup> groups;
            std::vector<Value> tokens;
            std::vector<events::NodeId> token_owner;
            for (const auto& [node, items] : batch) {
                if (items.empty()) continue;
                TokenGroup group;
                group.node = node;
                // split into per-edge sequences, first-seen edge order
                std::vector<std::uint64_t> edge_order;
                std::vector<std::vector<MessageItem>> sequences;
                for (const auto& item : items) {
                    auto it = std::find(edge_order.begin(), edge_order.end(), item.edge_id);
                    if (it == edge_order.end()) {
                        edge_order.push_back(item.edge_id);
                        sequences.emplace_back();
                        it = edge_order.end() - 1;
                    }
                    sequences[static_cast<std::size_t>(it - edge_order.begin())].push_back(
                        item);
                }
                for (const auto& seq : sequences) {
                    Value final = encode_sequence(t, time_enc, agg, seq);
                    group.token_rows.push_back(tokens.size());
                    tokens.push_back(enc::apply(t, *agg.proj, final));
                    token_owner.push_back(node);
                }
                groups.push_back(std::move(group));
            }
            if (tokens.empty()) break;  // empty batch: no-op

            Value stacked = t.stack_rows(tokens);
            enc::TransformerOptions topt;
            topt.dropout_rate = opt.dropout_rate;
            topt.rng = opt.rng;
            topt.training = opt.training;
            std::vector<std::vector<bool>> allow;
            if (agg.scope == ContextScope::Node) {
                allow.assign(tokens.size(), std::vector<bool>(tokens.size(), false));
                for (std::size_t i = 0; i < tokens.size(); ++i)
                    for (std::size_t j = 0; j < tokens.size(); ++j)
                        allow[i][j] = token_owner[i] == token_owner[j];
                topt.allow = &allow;
            }
            Value ctx = enc::transformer_encode(t, *agg.context, stacked, topt);
            for (const auto& group : groups)
                out.push_back({group.node, readout_mean(t, ctx, group.token_rows)});
            break;
        }
    }
    return out;
}

}  // namespace bita::agg
