#include "bita/heads.hpp"

#include <cmath>

#include "bita/errors.hpp"

namespace bita::heads {

LinkHead LinkHead::create(std::size_t d_node, std::size_t d_hidden, Rng& rng) {
    LinkHead h;
    h.l1 = enc::Affine::create(2 * d_node, d_hidden, rng);
    h.l2 = enc::Affine::create(d_hidden, 1, rng);
    return h;
}

void LinkHead::visit(const std::string& prefix, const enc::ParamVisitor& fn) {
    l1.visit(prefix + ".l1", fn);
    l2.visit(prefix + ".l2", fn);
}

LinkHeadRef LinkHead::bind(Binder& b, const std::string& prefix) {
    return {l1.bind(b, prefix + ".l1"), l2.bind(b, prefix + ".l2")};
}

namespace {

Value pair_hidden(Tape& t, const enc::AffineRef& l1, Value embed_i, Value embed_j) {
    return t.tanh_(enc::apply(t, l1, t.concat_vec({embed_i, embed_j})));
}

}  // namespace

Value link_logit(Tape& t, const LinkHeadRef& head, Value embed_i, Value embed_j) {
    return enc::apply(t, head.l2, pair_hidden(t, head.l1, embed_i, embed_j));
}

Value predict_link(Tape& t, const LinkHeadRef& head, Value embed_i, Value embed_j) {
    return t.sigmoid(link_logit(t, head, embed_i, embed_j));
}

CategoryHead CategoryHead::create(std::size_t d_node, std::size_t d_hidden, std::size_t k,
                                  Rng& rng) {
    if (k < 2) throw ConfigError("category head needs K >= 2 classes");
    CategoryHead h;
    h.l1 = enc::Affine::create(2 * d_node, d_hidden, rng);
    h.l2 = enc::Affine::create(d_hidden, k, rng);
    return h;
}

void CategoryHead::visit(const std::string& prefix, const enc::ParamVisitor& fn) {
    l1.visit(prefix + ".l1", fn);
    l2.visit(prefix + ".l2", fn);
}

CategoryHeadRef CategoryHead::bind(Binder& b, const std::string& prefix) {
    return {l1.bind(b, prefix + ".l1"), l2.bind(b, prefix + ".l2")};
}

Value predict_category(Tape& t, const CategoryHeadRef& head, Value embed_i, Value embed_j) {
    return t.softmax(enc::apply(t, head.l2, pair_hidden(t, head.l1, embed_i, embed_j)), 0);
}

Value bce_loss(Tape& t, Value prob, double label) {
    if (label != 0.0 && label != 1.0)
        throw ContractError("bce_loss: label must be 0 or 1");
    Value p = label == 1.0 ? prob : t.affine_const(prob, -1.0, 1.0);
    Value clamped = t.clamp(p, kProbClamp, 1.0 - kProbClamp);
    return t.affine_const(t.log_(clamped), -1.0, 0.0);
}

Value focal_loss(Tape& t, Value probs, const Array& one_hot, const FocalLossCfg& cfg) {
    const Array& p = t.val(probs);
    if (!p.same_shape(one_hot))
        throw DimError("focal_loss: probs " + p.shape_str() + " vs one-hot " +
                       num::shape_str(one_hot.shape()));
    if (cfg.alpha.size() != p.size())
        throw DimError("focal_loss: alpha width mismatch");
    if (cfg.gamma < 0.0) throw ContractError("focal_loss: gamma must be >= 0");
    std::size_t ones = 0;
    std::size_t true_class = 0;
    for (std::size_t k = 0; k < one_hot.size(); ++k) {
        if (one_hot[k] == 1.0) {
            ++ones;
            true_class = k;
        } else if (one_hot[k] != 0.0) {
            throw ContractError("focal_loss: y must be one-hot");
        }
    }
    if (ones != 1) throw ContractError("focal_loss: y must have exactly one 1");
    for (std::size_t k = 0; k < cfg.alpha.size(); ++k)
        if (!(cfg.alpha[k] > 0.0)) throw ContractError("focal_loss: alpha must be positive");

    // p_true = <probs, y>, then -alpha (1-p)^gamma log p
    Value p_true = t.sum_all(t.mul(probs, t.leaf(one_hot)));
    Value clamped = t.clamp(p_true, kProbClamp, 1.0 - kProbClamp);
    Value focus = t.pow_const(t.affine_const(clamped, -1.0, 1.0), cfg.gamma);
    Value nll = t.affine_const(t.log_(clamped), -cfg.alpha[true_class], 0.0);
    return t.mul(focus, nll);
}

Value joint_loss(Tape& t, const std::vector<Value>& link_losses,
                 const std::vector<Value>& category_losses, double lambda) {
    if (link_losses.empty()) throw ContractError("joint_loss: no link terms");
    Value link = t.mean_all(t.concat_vec(link_losses));
    if (category_losses.empty() || lambda == 0.0) {
        // lambda * 0-term contributes exactly nothing
        return t.affine_const(link, 1.0, 0.0);
    }
    Value cat = t.mean_all(t.concat_vec(category_losses));
    return t.add(link, t.affine_const(cat, lambda, 0.0));
}

Array class_weights(const events::EventStream& train) {
    const std::size_t k = train.category_names.size();
    if (k == 0) throw ConfigError("class_weights: stream has no categories");
    std::vector<std::size_t> counts(k, 0);
    for (const auto& e : train.events) counts[e.category] += 1;
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] == 0)
            throw ConfigError("class_weights: category '" + train.category_names[c] +
                              "' absent from the training partition; rebalance the split "
                              "or drop the class before training");
    const double n = static_cast<double>(train.events.size());
    Array alpha({k});
    double mean = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        alpha[c] = n / (static_cast<double>(k) * static_cast<double>(counts[c]));
        mean += alpha[c];
    }
    mean /= static_cast<double>(k);
    for (std::size_t c = 0; c < k; ++c) alpha[c] /= mean;
    return alpha;
}

}  // namespace bita::heads
