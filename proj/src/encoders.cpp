#include "bita/encoders.hpp"

#include <cmath>

#include "bita/errors.hpp"

namespace bita::enc {

Array uniform_init(std::vector<std::size_t> shape, std::size_t fan_in, Rng& rng) {
    Array a(std::move(shape));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.uniform(-bound, bound);
    return a;
}

Value Binder::bind(const std::string& name, Array& array) {
    const Value leaf = tape_.leaf(array);
    entries_.push_back({name, &array, leaf});
    return leaf;
}

// -- Affine ------------------------------------------------------------------

Affine Affine::create(std::size_t in, std::size_t out, Rng& rng) {
    Affine a;
    a.w = uniform_init({in, out}, in, rng);
    a.b = uniform_init({out}, in, rng);
    return a;
}

void Affine::visit(const std::string& prefix, const ParamVisitor& fn) {
    fn(prefix + ".w", w);
    fn(prefix + ".b", b);
}

AffineRef Affine::bind(Binder& binder, const std::string& prefix) {
    return {binder.bind(prefix + ".w", w), binder.bind(prefix + ".b", b)};
}

Value apply(Tape& t, const AffineRef& a, Value x) {
    const std::size_t in = t.val(a.w).shape()[0];
    const std::size_t out = t.val(a.w).shape()[1];
    if (t.val(x).size() != in)
        throw DimError("affine: input width " + t.val(x).shape_str() + " vs weight " +
                       t.val(a.w).shape_str());
    Value row = t.reshape(x, {1, in});
    Value y = t.add_rowvec(t.matmul(row, a.w), a.b);
    return t.reshape(y, {out});
}

Value apply_rows(Tape& t, const AffineRef& a, Value x) {
    return t.add_rowvec(t.matmul(x, a.w), a.b);
}

// -- TimeEncoder ---------------------------------------------------------------

TimeEncoder TimeEncoder::create(std::size_t d_time, Rng& rng) {
    (void)rng;
    TimeEncoder enc;
    enc.omega = Array({d_time});
    enc.phi = Array({d_time});
    // log-spaced frequencies from 1 down to 1e-7 (seconds .. weeks)
    const double span = d_time > 1 ? static_cast<double>(d_time - 1) : 1.0;
    for (std::size_t k = 0; k < d_time; ++k)
        enc.omega[k] = std::pow(10.0, -7.0 * static_cast<double>(k) / span);
    return enc;
}

void TimeEncoder::visit(const std::string& prefix, const ParamVisitor& fn) {
    fn(prefix + ".omega", omega);
    fn(prefix + ".phi", phi);
}

TimeEncoderRef TimeEncoder::bind(Binder& binder, const std::string& prefix) {
    return {binder.bind(prefix + ".omega", omega), binder.bind(prefix + ".phi", phi)};
}

Value time_encode(Tape& t, const TimeEncoderRef& enc, double time) {
    return t.cos_(t.add(t.affine_const(enc.omega, time, 0.0), enc.phi));
}

Array time_encode_plain(const TimeEncoder& enc, double time) {
    Array out({enc.dim()});
    for (std::size_t k = 0; k < enc.dim(); ++k)
        out[k] = std::cos(enc.omega[k] * time + enc.phi[k]);
    return out;
}

// -- GruCell -------------------------------------------------------------------

GruCell GruCell::create(std::size_t d_in, std::size_t d_h, Rng& rng) {
    GruCell c;
    c.w_z = uniform_init({d_in, d_h}, d_in, rng);
    c.w_r = uniform_init({d_in, d_h}, d_in, rng);
    c.w_h = uniform_init({d_in, d_h}, d_in, rng);
    c.u_z = uniform_init({d_h, d_h}, d_h, rng);
    c.u_r = uniform_init({d_h, d_h}, d_h, rng);
    c.u_h = uniform_init({d_h, d_h}, d_h, rng);
    c.b_z = Array({d_h});
    c.b_r = Array({d_h});
    c.b_h = Array({d_h});
    return c;
}

void GruCell::visit(const std::string& prefix, const ParamVisitor& fn) {
    fn(prefix + ".w_z", w_z);
    fn(prefix + ".w_r", w_r);
    fn(prefix + ".w_h", w_h);
    fn(prefix + ".u_z", u_z);
    fn(prefix + ".u_r", u_r);
    fn(prefix + ".u_h", u_h);
    fn(prefix + ".b_z", b_z);
    fn(prefix + ".b_r", b_r);
    fn(prefix + ".b_h", b_h);
}

GruCellRef GruCell::bind(Binder& binder, const std::string& prefix) {
    GruCellRef r;
    r.w_z = binder.bind(prefix + ".w_z", w_z);
    r.w_r = binder.bind(prefix + ".w_r", w_r);
    r.w_h = binder.bind(prefix + ".w_h", w_h);
    r.u_z = binder.bind(prefix + ".u_z", u_z);
    r.u_r = binder.bind(prefix + ".u_r", u_r);
    r.u_h = binder.bind(prefix + ".u_h", u_h);
    r.b_z = binder.bind(prefix + ".b_z", b_z);
    r.b_r = binder.bind(prefix + ".b_r", b_r);
    r.b_h = binder.bind(prefix + ".b_h", b_h);
    return r;
}

namespace {

Value matvec(Tape& t, Value x, Value w) {
    const std::size_t in = t.val(w).shape()[0];
    const std::size_t out = t.val(w).shape()[1];
    return t.reshape(t.matmul(t.reshape(x, {1, in}), w), {out});
}

}  // namespace

Value gru_step(Tape& t, const GruCellRef& cell, Value x, Value h) {
    Value z = t.sigmoid(t.add(t.add(matvec(t, x, cell.w_z), matvec(t, h, cell.u_z)), cell.b_z));
    Value r = t.sigmoid(t.add(t.add(matvec(t, x, cell.w_r), matvec(t, h, cell.u_r)), cell.b_r));
    Value hc = t.tanh_(
        t.add(t.add(matvec(t, x, cell.w_h), matvec(t, t.mul(r, h), cell.u_h)), cell.b_h));
    return t.add(t.mul(t.affine_const(z, -1.0, 1.0), h), t.mul(z, hc));
}

// -- BiGru ---------------------------------------------------------------------

BiGru BiGru::create(std::size_t d_in, std::size_t d_h, Rng& rng) {
    BiGru net;
    net.forward_cell = GruCell::create(d_in, d_h, rng);
    net.backward_cell = GruCell::create(d_in, d_h, rng);
    return net;
}

void BiGru::visit(const std::string& prefix, const ParamVisitor& fn) {
    forward_cell.visit(prefix + ".fwd", fn);
    backward_cell.visit(prefix + ".bwd", fn);
}

BiGruRef BiGru::bind(Binder& binder, const std::string& prefix) {
    BiGruRef r;
    r.fwd = forward_cell.bind(binder, prefix + ".fwd");
    r.bwd = backward_cell.bind(binder, prefix + ".bwd");
    r.d_h = d_h();
    return r;
}

BiGruOut bigru_encode(Tape& t, const BiGruRef& net, const std::vector<Value>& seq) {
    if (seq.empty()) throw ContractError("bigru_encode: empty sequence");
    const std::size_t n = seq.size();
    Value zero = t.leaf(Array({net.d_h}));

    std::vector<Value> fwd(n), bwd(n);
    Value h = zero;
    for (std::size_t i = 0; i < n; ++i) {
        h = gru_step(t, net.fwd, seq[i], h);
        fwd[i] = h;
    }
    h = zero;
    for (std::size_t i = n; i-- > 0;) {
        h = gru_step(t, net.bwd, seq[i], h);
        bwd[i] = h;
    }
    std::vector<Value> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = t.concat_vec({fwd[i], bwd[i]});
    BiGruOut out;
    out.states = t.stack_rows(rows);
    out.final = rows[n - 1];
    return out;
}

// -- TransformerBlock ------------------------------------------------------------

TransformerBlock TransformerBlock::create(std::size_t d_model, std::size_t heads, Rng& rng,
                                          std::size_t d_ff) {
    if (heads == 0 || d_model % heads != 0)
        throw ConfigError("transformer: d_model " + std::to_string(d_model) +
                          " not divisible by heads " + std::to_string(heads));
    if (d_ff == 0) d_ff = 2 * d_model;
    TransformerBlock b;
    b.heads = heads;
    b.w_q = uniform_init({d_model, d_model}, d_model, rng);
    b.w_k = uniform_init({d_model, d_model}, d_model, rng);
    b.w_v = uniform_init({d_model, d_model}, d_model, rng);
    b.w_o = uniform_init({d_model, d_model}, d_model, rng);
    b.b_q = Array({d_model});
    b.b_k = Array({d_model});
    b.b_v = Array({d_model});
    b.b_o = Array({d_model});
    b.w_f1 = uniform_init({d_model, d_ff}, d_model, rng);
    b.b_f1 = Array({d_ff});
    b.w_f2 = uniform_init({d_ff, d_model}, d_ff, rng);
    b.b_f2 = Array({d_model});
    b.ln1_g = Array::full({d_model}, 1.0);
    b.ln1_b = Array({d_model});
    b.ln2_g = Array::full({d_model}, 1.0);
    b.ln2_b = Array({d_model});
    return b;
}

void TransformerBlock::visit(const std::string& prefix, const ParamVisitor& fn) {
    fn(prefix + ".w_q", w_q);
    fn(prefix + ".w_k", w_k);
    fn(prefix + ".w_v", w_v);
    fn(prefix + ".w_o", w_o);
    fn(prefix + ".b_q", b_q);
    fn(prefix + ".b_k", b_k);
    fn(prefix + ".b_v", b_v);
    fn(prefix + ".b_o", b_o);
    fn(prefix + ".w_f1", w_f1);
    fn(prefix + ".b_f1", b_f1);
    fn(prefix + ".w_f2", w_f2);
    fn(prefix + ".b_f2", b_f2);
    fn(prefix + ".ln1_g", ln1_g);
    fn(prefix + ".ln1_b", ln1_b);
    fn(prefix + ".ln2_g", ln2_g);
    fn(prefix + ".ln2_b", ln2_b);
}

TransformerBlockRef TransformerBlock::bind(Binder& binder, const std::string& prefix) {
    TransformerBlockRef r;
    r.heads = heads;
    r.w_q = binder.bind(prefix + ".w_q", w_q);
    r.w_k = binder.bind(prefix + ".w_k", w_k);
    r.w_v = binder.bind(prefix + ".w_v", w_v);
    r.w_o = binder.bind(prefix + ".w_o", w_o);
    r.b_q = binder.bind(prefix + ".b_q", b_q);
    r.b_k = binder.bind(prefix + ".b_k", b_k);
    r.b_v = binder.bind(prefix + ".b_v", b_v);
    r.b_o = binder.bind(prefix + ".b_o", b_o);
    r.w_f1 = binder.bind(prefix + ".w_f1", w_f1);
    r.b_f1 = binder.bind(prefix + ".b_f1", b_f1);
    r.w_f2 = binder.bind(prefix + ".w_f2", w_f2);
    r.b_f2 = binder.bind(prefix + ".b_f2", b_f2);
    r.ln1_g = binder.bind(prefix + ".ln1_g", ln1_g);
    r.ln1_b = binder.bind(prefix + ".ln1_b", ln1_b);
    r.ln2_g = binder.bind(prefix + ".ln2_g", ln2_g);
    r.ln2_b = binder.bind(prefix + ".ln2_b", ln2_b);
    return r;
}

Value transformer_encode(Tape& t, const TransformerBlockRef& blk, Value tokens,
                         const TransformerOptions& opt) {
    const Array& X = t.val(tokens);
    if (X.rank() != 2 || X.rows() < 1)
        throw DimError("transformer_encode: tokens must be [n x d], got " + X.shape_str());
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    if (d != t.val(blk.w_q).rows())
        throw DimError("transformer_encode: token width " + std::to_string(d) +
                       " vs block width " + std::to_string(t.val(blk.w_q).rows()));
    const std::size_t dk = d / blk.heads;

    if (opt.masked) {
        if (opt.masked->size() != n)
            throw DimError("transformer_encode: mask length mismatch");
        bool any = false;
        for (bool m : *opt.masked) any = any || !m;
        if (!any) throw ContractError("transformer_encode: every position masked");
    }

    // Additive attention bias; -1e30 underflows to an exactly-zero weight
    // after the max-subtracted softmax.
    Array bias({n, n});
    bool biased = false;
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t k = 0; k < n; ++k) {
            bool blocked = false;
            if (opt.masked && (*opt.masked)[k]) blocked = true;
            if (opt.allow && !(*opt.allow)[q][k]) blocked = true;
            if (blocked) {
                bias.at(q, k) = -1e30;
                biased = true;
            }
        }
    if (opt.allow) {
        for (std::size_t q = 0; q < n; ++q) {
            bool any = false;
            for (std::size_t k = 0; k < n; ++k) any = any || bias.at(q, k) == 0.0;
            if (!any) throw ContractError("transformer_encode: query " + std::to_string(q) +
                                          " has no attention targets");
        }
    }

    auto dropout = [&](Value x) {
        if (opt.rng == nullptr) return x;
        return t.dropout(x, opt.dropout_rate, *opt.rng, opt.training);
    };

    Value normed = t.layer_norm(tokens, blk.ln1_g, blk.ln1_b, 1e-5);
    Value q = t.add_rowvec(t.matmul(normed, blk.w_q), blk.b_q);
    Value k = t.add_rowvec(t.matmul(normed, blk.w_k), blk.b_k);
    Value v = t.add_rowvec(t.matmul(normed, blk.w_v), blk.b_v);

    if (opt.attention_out) opt.attention_out->clear();
    std::vector<Value> head_outs;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    for (std::size_t h = 0; h < blk.heads; ++h) {
        Value qh = t.slice_cols(q, h * dk, (h + 1) * dk);
        Value kh = t.slice_cols(k, h * dk, (h + 1) * dk);
        Value vh = t.slice_cols(v, h * dk, (h + 1) * dk);
        Value scores = t.affine_const(t.matmul(qh, t.transpose(kh)), scale, 0.0);
        if (biased) scores = t.add_constarr(scores, bias);
        Value attn = t.softmax(scores, 1);
        if (opt.attention_out) opt.attention_out->push_back(t.val(attn));
        head_outs.push_back(t.matmul(attn, vh));
    }
    Value mixed = head_outs.size() == 1 ? head_outs[0] : t.hcat(head_outs);
    Value attn_out = dropout(t.add_rowvec(t.matmul(mixed, blk.w_o), blk.b_o));
    Value mid = t.add(tokens, attn_out);

    Value normed2 = t.layer_norm(mid, blk.ln2_g, blk.ln2_b, 1e-5);
    Value ff = t.add_rowvec(
        t.matmul(t.gelu(t.add_rowvec(t.matmul(normed2, blk.w_f1), blk.b_f1)), blk.w_f2),
        blk.b_f2);
    return t.add(mid, dropout(ff));
}

// -- MessageFunction -------------------------------------------------------------

MessageFunction MessageFunction::create(std::size_t d_mem, std::size_t d_feat,
                                        std::size_t d_time, std::size_t d_m, Rng& rng) {
    MessageFunction f;
    f.projection = Affine::create(2 * d_mem + d_feat + d_time, d_m, rng);
    return f;
}

void MessageFunction::visit(const std::string& prefix, const ParamVisitor& fn) {
    projection.visit(prefix + ".proj", fn);
}

MessageFunctionRef MessageFunction::bind(Binder& binder, const std::string& prefix) {
    return {projection.bind(binder, prefix + ".proj")};
}

Value build_message(Tape& t, const MessageFunctionRef& f, Value mem_u, Value mem_v,
                    Value edge_features, Value time_code) {
    return apply(t, f.projection, t.concat_vec({mem_u, mem_v, edge_features, time_code}));
}

}  // namespace bita::enc
