#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bita/rng.hpp"
#include "bita/tape.hpp"

namespace bita::enc {

using num::Array;
using num::Rng;
using num::Tape;
using num::Value;

using ParamVisitor = std::function<void(const std::string&, Array&)>;

/// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in))
Array uniform_init(std::vector<std::size_t> shape, std::size_t fan_in, Rng& rng);

/// Binds parameter arrays to tape leaves once per tape, keeping the
/// (name, array, leaf) triples so the optimizer can route gradients back.
class Binder {
public:
    explicit Binder(Tape& tape) : tape_(tape) {}

    Value bind(const std::string& name, Array& array);

    struct Entry {
        std::string name;
        Array* array;
        Value leaf;
    };
    const std::vector<Entry>& entries() const { return entries_; }
    Tape& tape() { return tape_; }

private:
    Tape& tape_;
    std::vector<Entry> entries_;
};

// Tape-bound views of each block's parameters.
struct AffineRef {
    Value w, b;
};
struct TimeEncoderRef {
    Value omega, phi;
};
struct GruCellRef {
    Value w_z, w_r, w_h, u_z, u_r, u_h, b_z, b_r, b_h;
};
struct BiGruRef {
    GruCellRef fwd, bwd;
    std::size_t d_h = 0;
};
struct TransformerBlockRef {
    std::size_t heads = 0;
    Value w_q, w_k, w_v, w_o, b_q, b_k, b_v, b_o;
    Value w_f1, b_f1, w_f2, b_f2;
    Value ln1_g, ln1_b, ln2_g, ln2_b;
};
struct MessageFunctionRef {
    AffineRef projection;
};

// ---------------------------------------------------------------------------

struct Affine {
    Array w;  // [in x out], row-vector convention
    Array b;  // [out]
    static Affine create(std::size_t in, std::size_t out, Rng& rng);
    void visit(const std::string& prefix, const ParamVisitor& fn);
    AffineRef bind(Binder& b, const std::string& prefix);
    std::size_t in() const { return w.shape()[0]; }
    std::size_t out() const { return w.shape()[1]; }
};

/// x [in] -> x.w + b [out]
Value apply(Tape& t, const AffineRef& a, Value x);
/// X [n x in] -> X.w + b [n x out]
Value apply_rows(Tape& t, const AffineRef& a, Value x);

// ---------------------------------------------------------------------------

/// output_k = cos(omega_k * t + phi_k); frequencies initialized log-spaced so
/// the encoding resolves gaps from seconds up to weeks.
struct TimeEncoder {
    Array omega;  // [d_time]
    Array phi;    // [d_time]
    static TimeEncoder create(std::size_t d_time, Rng& rng);
    void visit(const std::string& prefix, const ParamVisitor& fn);
    TimeEncoderRef bind(Binder& b, const std::string& prefix);
    std::size_t dim() const { return omega.size(); }
};

Value time_encode(Tape& t, const TimeEncoderRef& enc, double time);
/// Forward-only path for callers that do not differentiate.
Array time_encode_plain(const TimeEncoder& enc, double time);

// ---------------------------------------------------------------------------

struct GruCell {
    Array w_z, w_r, w_h;  // [d_in x d_h]
    Array u_z, u_r, u_h;  // [d_h x d_h]
    Array b_z, b_r, b_h;  // [d_h]
    static GruCell create(std::size_t d_in, std::size_t d_h, Rng& rng);
    void visit(const std::string& prefix, const ParamVisitor& fn);
    GruCellRef bind(Binder& b, const std::string& prefix);
    std::size_t d_in() const { return w_z.shape()[0]; }
    std::size_t d_h() const { return w_z.shape()[1]; }
};

/// z = sig(xWz + hUz + bz); r = sig(xWr + hUr + br);
/// hc = tanh(xWh + (r*h)Uh + bh); h' = (1-z)*h + z*hc
Value gru_step(Tape& t, const GruCellRef& cell, Value x, Value h);

// ---------------------------------------------------------------------------

struct BiGru {
    GruCell forward_cell;
    GruCell backward_cell;
    static BiGru create(std::size_t d_in, std::size_t d_h, Rng& rng);
    void visit(const std::string& prefix, const ParamVisitor& fn);
    BiGruRef bind(Binder& b, const std::string& prefix);
    std::size_t d_h() const { return forward_cell.d_h(); }
};

struct BiGruOut {
    Value states;  // [n x 2 d_h], position i = concat(fwd_i, bwd_i)
    Value final;   // [2 d_h], the concatenation at the last position
};
/// Both directions start from the zero state; empty sequences are rejected.
BiGruOut bigru_encode(Tape& t, const BiGruRef& net, const std::vector<Value>& seq);

// ---------------------------------------------------------------------------

struct TransformerOptions {
    /// masked[i] == true excludes position i as an attention key (exact zero
    /// weight under every query). A fully masked key set is a contract error.
    const std::vector<bool>* masked = nullptr;
    /// allow[q][k] == false blocks query q from attending key k (scope switch).
    const std::vector<std::vector<bool>>* allow = nullptr;
    /// When set, receives one [n x n] attention matrix per head.
    std::vector<Array>* attention_out = nullptr;
    double dropout_rate = 0.0;
    Rng* rng = nullptr;
    bool training = false;
};

/// Pre-norm encoder block: x + MHSA(LN(x)), then + FFN(LN(.)).
/// Temporal order is carried by the BiGRU stage, so there is no positional
/// encoding here and the block is permutation-equivariant over tokens.
struct TransformerBlock {
    std::size_t heads = 2;
    Array w_q, w_k, w_v, w_o;  // [d x d]
    Array b_q, b_k, b_v, b_o;  // [d]
    Array w_f1, b_f1, w_f2, b_f2;
    Array ln1_g, ln1_b, ln2_g, ln2_b;
    static TransformerBlock create(std::size_t d_model, std::size_t heads, Rng& rng,
                                   std::size_t d_ff = 0);
    void visit(const std::string& prefix, const ParamVisitor& fn);
    TransformerBlockRef bind(Binder& b, const std::string& prefix);
    std::size_t d_model() const { return w_q.shape()[0]; }
};

Value transformer_encode(Tape& t, const TransformerBlockRef& blk, Value tokens,
                         const TransformerOptions& opt = {});

// ---------------------------------------------------------------------------

/// Learnable message function: affine projection of
/// concat(mem_u, mem_v, edge_features, time_code) to d_m.
struct MessageFunction {
    Affine projection;
    static MessageFunction create(std::size_t d_mem, std::size_t d_feat,
                                  std::size_t d_time, std::size_t d_m, Rng& rng);
    void visit(const std::string& prefix, const ParamVisitor& fn);
    MessageFunctionRef bind(Binder& b, const std::string& prefix);
    std::size_t d_m() const { return projection.out(); }
};

Value build_message(Tape& t, const MessageFunctionRef& f, Value mem_u, Value mem_v,
                    Value edge_features, Value time_code);

}  // namespace bita::enc
