#pragma once

#include <cstddef>
#include <vector>

#include "bita/array.hpp"
#include "bita/rng.hpp"

namespace bita::num {

/// Handle to a node on a Tape. Only meaningful for the tape that created it.
struct Value {
    int idx = -1;
    bool valid() const { return idx >= 0; }
};

/// Define-by-run reverse-mode differentiation record.
///
/// Nodes are appended in execution order; backward() visits them in strict
/// reverse append order with fixed left-to-right accumulation inside every
/// reduction, so two backward passes over identical tapes are bitwise equal.
/// A tape is confined to one thread.
class Tape {
public:
    Value leaf(Array v);

    const Array& val(Value v) const;
    std::size_t size() const { return nodes_.size(); }

    // -- primitive ops ------------------------------------------------------
    Value matmul(Value a, Value b);
    Value transpose(Value a);

    Value add(Value a, Value b);
    Value sub(Value a, Value b);
    Value mul(Value a, Value b);
    /// m[r x c] + v[c], v broadcast over rows.
    Value add_rowvec(Value m, Value v);
    /// k*x + c elementwise, with scalar constants.
    Value affine_const(Value a, double k, double c);
    /// x + C with a constant array (no gradient into C).
    Value add_constarr(Value a, Array c);

    Value sigmoid(Value a);
    Value tanh_(Value a);
    Value exp_(Value a);
    Value log_(Value a);
    Value cos_(Value a);
    Value gelu(Value a);
    Value pow_const(Value a, double p);
    Value clamp(Value a, double lo, double hi);

    /// Stable softmax (max-subtraction) along `axis` (rank-1: axis 0;
    /// rank-2: 0 = down columns, 1 = across rows).
    Value softmax(Value a, int axis);
    /// Per-row zero-mean/unit-variance then gain & bias (both rank-1 [d]).
    Value layer_norm(Value a, Value gain, Value bias, double eps);

    /// Concatenate rank-1 values into one rank-1 value.
    Value concat_vec(const std::vector<Value>& parts);
    /// Stack rank-1 values of equal width into a rank-2 [n x d] value.
    Value stack_rows(const std::vector<Value>& rows);
    /// Concatenate rank-2 values side by side (equal row counts).
    Value hcat(const std::vector<Value>& parts);
    /// Gather rows of a rank-2 value; duplicates accumulate on backward.
    Value select_rows(Value a, std::vector<std::size_t> rows);
    /// Columns [begin, end) of a rank-2 value.
    Value slice_cols(Value a, std::size_t begin, std::size_t end);
    Value reshape(Value a, std::vector<std::size_t> shape);

    Value sum_all(Value a);
    Value mean_all(Value a);
    /// Mean over axis 0 of a rank-2 value, yielding rank-1 [c].
    Value mean_rows(Value a);

    /// Inverted dropout; identity when !active. Draws one uniform per element.
    Value dropout(Value a, double rate, Rng& rng, bool active);

    // -- reverse pass --------------------------------------------------------
    /// Accumulates d(loss)/d(node) for every node. The loss must be scalar;
    /// a second call on the same tape is rejected.
    void backward(Value loss);
    bool backward_done() const { return backward_done_; }
    const Array& grad(Value v) const;

private:
    enum class Op {
        Leaf,
        Matmul,
        Transpose,
        Add,
        Sub,
        Mul,
        AddRowvec,
        AffineConst,
        AddConstArr,
        Sigmoid,
        Tanh,
        Exp,
        Log,
        Cos,
        Gelu,
        PowConst,
        Clamp,
        Softmax,
        LayerNorm,
        ConcatVec,
        StackRows,
        Hcat,
        SelectRows,
        SliceCols,
        Reshape,
        SumAll,
        MeanAll,
        MeanRows,
        Dropout,
    };

    struct Node {
        Op op = Op::Leaf;
        int a = -1, b = -1, c = -1;
        Array value;
        double s0 = 0.0, s1 = 0.0;  // op-specific scalars (k/c, lo/hi, p, eps, rate)
        int axis = 0;
        std::vector<int> inputs;           // n-ary ops
        std::vector<std::size_t> indices;  // select_rows
        Array aux;                         // dropout mask / layer_norm xhat
        Array aux2;                        // layer_norm inv_std per row
    };

    Value push(Node n);
    const Array& v(int i) const { return nodes_[static_cast<std::size_t>(i)].value; }
    Array& g(int i) { return grads_[static_cast<std::size_t>(i)]; }
    void backprop_node(int i);

    std::vector<Node> nodes_;
    std::vector<Array> grads_;
    bool backward_done_ = false;
};

}  // namespace bita::num
