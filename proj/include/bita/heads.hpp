#pragma once

#include <vector>

#include "bita/encoders.hpp"
#include "bita/events.hpp"

namespace bita::heads {

using enc::Binder;
using enc::Tape;
using enc::Value;
using num::Array;
using num::Rng;

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] inside the losses
// so they stay finite.
constexpr double kProbClamp = 1e-12;

struct LinkHeadRef {
    enc::AffineRef l1, l2;
};

/// Directed link-existence head: two-layer tanh map from
/// concat(embed_i, embed_j) to one logit. (i, j) is not symmetrized.
struct LinkHead {
    enc::Affine l1;  // [2 d_node x d_hidden]
    enc::Affine l2;  // [d_hidden x 1]
    static LinkHead create(std::size_t d_node, std::size_t d_hidden, Rng& rng);
    void visit(const std::string& prefix, const enc::ParamVisitor& fn);
    LinkHeadRef bind(Binder& b, const std::string& prefix);
};

Value link_logit(Tape& t, const LinkHeadRef& head, Value embed_i, Value embed_j);
/// sigmoid of the logit, in (0, 1)
Value predict_link(Tape& t, const LinkHeadRef& head, Value embed_i, Value embed_j);

struct CategoryHeadRef {
    enc::AffineRef l1, l2;
};

/// Edge-category head: two-layer map from concat(embed_i, embed_j) to K logits.
struct CategoryHead {
    enc::Affine l1;
    enc::Affine l2;  // [d_hidden x K]
    static CategoryHead create(std::size_t d_node, std::size_t d_hidden, std::size_t k,
                               Rng& rng);
    void visit(const std::string& prefix, const enc::ParamVisitor& fn);
    CategoryHeadRef bind(Binder& b, const std::string& prefix);
    std::size_t k() const { return l2.out(); }
};

/// softmax over the K logits
Value predict_category(Tape& t, const CategoryHeadRef& head, Value embed_i, Value embed_j);

struct FocalLossCfg {
    Array alpha;         // [K] class weights, all positive
    double gamma = 2.0;  // focusing parameter, >= 0
};

/// -(y log p + (1-y) log(1-p)) with clamped p; label must be 0 or 1.
Value bce_loss(Tape& t, Value prob, double label);

/// -sum_k alpha_k (1 - p_k)^gamma y_k log p_k for a one-hot y.
Value focal_loss(Tape& t, Value probs, const Array& one_hot, const FocalLossCfg& cfg);

/// mean link loss over positives + negatives, plus lambda times the mean
/// focal loss over positives only.
Value joint_loss(Tape& t, const std::vector<Value>& link_losses,
                 const std::vector<Value>& category_losses, double lambda);

/// alpha_k = N / (K * count_k) over the training partition, normalized to
/// mean 1. Every class must appear at least once.
Array class_weights(const events::EventStream& train);

}  // namespace bita::heads
