#include "bita/tape.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace bita::num {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

void matmul_into(const Array& a, const Array& b, Array& out, bool accumulate) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    if (!accumulate)
        for (std::size_t i = 0; i < m * n; ++i) po[i] = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double av = pa[i * k + p];
            if (av == 0.0) continue;
            const double* pbrow = pb + p * n;
            double* porow = po + i * n;
            for (std::size_t j = 0; j < n; ++j) porow[j] += av * pbrow[j];
        }
}

Array transposed(const Array& a) {
    const std::size_t r = a.rows(), c = a.cols();
    Array t({c, r});
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) t.data()[j * r + i] = a.data()[i * c + j];
    return t;
}

}  // namespace

Value Tape::push(Node n) {
    if (backward_done_)
        throw ContractError("tape: cannot append after backward; build a fresh tape");
    nodes_.push_back(std::move(n));
    return Value{static_cast<int>(nodes_.size()) - 1};
}

const Array& Tape::val(Value v) const {
    return nodes_[static_cast<std::size_t>(v.idx)].value;
}

Value Tape::leaf(Array v) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(v);
    return push(std::move(n));
}

Value Tape::matmul(Value a, Value b) {
    const Array& A = val(a);
    const Array& B = val(b);
    if (A.rank() != 2 || B.rank() != 2 || A.cols() != B.rows())
        throw DimError("matmul: incompatible shapes " + A.shape_str() + " vs " + B.shape_str());
    Node n;
    n.op = Op::Matmul;
    n.a = a.idx;
    n.b = b.idx;
    n.value = Array({A.rows(), B.cols()});
    matmul_into(A, B, n.value, false);
    return push(std::move(n));
}

Value Tape::transpose(Value a) {
    const Array& A = val(a);
    if (A.rank() != 2) throw DimError("transpose: needs rank 2, got " + A.shape_str());
    Node n;
    n.op = Op::Transpose;
    n.a = a.idx;
    n.value = transposed(A);
    return push(std::move(n));
}

Value Tape::add(Value a, Value b) {
    const Array& A = val(a);
    const Array& B = val(b);
    check_same_shape(A, B, "add");
    Node n;
    n.op = Op::Add;
    n.a = a.idx;
    n.b = b.idx;
    n.value = A;
    for (std::size_t i = 0; i < B.size(); ++i) n.value[i] += B[i];
    return push(std::move(n));
}

Value Tape::sub(Value a, Value b) {
    const Array& A = val(a);
    const Array& B = val(b);
    check_same_shape(A, B, "sub");
    Node n;
    n.op = Op::Sub;
    n.a = a.idx;
    n.b = b.idx;
    n.value = A;
    for (std::size_t i = 0; i < B.size(); ++i) n.value[i] -= B[i];
    return push(std::move(n));
}

Value Tape::mul(Value a, Value b) {
    const Array& A = val(a);
    const Array& B = val(b);
    check_same_shape(A, B, "mul");
    Node n;
    n.op = Op::Mul;
    n.a = a.idx;
    n.b = b.idx;
    n.value = A;
    for (std::size_t i = 0; i < B.size(); ++i) n.value[i] *= B[i];
    return push(std::move(n));
}

Value Tape::add_rowvec(Value m, Value vvec) {
    const Array& M = val(m);
    const Array& V = val(vvec);
    if (M.rank() != 2 || V.rank() != 1 || M.cols() != V.size())
        throw DimError("add_rowvec: shapes " + M.shape_str() + " vs " + V.shape_str());
    Node n;
    n.op = Op::AddRowvec;
    n.a = m.idx;
    n.b = vvec.idx;
    n.value = M;
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j) n.value.at(i, j) += V[j];
    return push(std::move(n));
}

Value Tape::affine_const(Value a, double k, double c) {
    const Array& A = val(a);
    Node n;
    n.op = Op::AffineConst;
    n.a = a.idx;
    n.s0 = k;
    n.s1 = c;
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i) n.value[i] = k * A[i] + c;
    return push(std::move(n));
}

Value Tape::add_constarr(Value a, Array c) {
    const Array& A = val(a);
    check_same_shape(A, c, "add_constarr");
    Node n;
    n.op = Op::AddConstArr;
    n.a = a.idx;
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i) n.value[i] += c[i];
    return push(std::move(n));
}

Value Tape::sigmoid(Value a) {
    const Array& A = val(a);
    Node n;
    n.op = Op::Sigmoid;
    n.a = a.idx;
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i) n.value[i] = 1.0 / (1.0 + std::exp(-A[i]));
    return push(std::move(n));
}

Value Tape::tanh_(Value a) {
    const Array& A = val(a);
    Node n;
    n.op = Op::Tanh;
    n.a = a.idx;
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i) n.value[i] = std::tanh(A[i]);
    return push(std::move(n));
}

Value Tape::exp_(Value a) {
    const Array& A = val(a);
    Node n;
    n.op = Op::Exp;
    n.a = a.idx;
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i) n.value[i] = std::exp(A[i]);
    return push(std::move(n));
}

Value Tape::log_(Value a) {
    const Array& A = val(a);
    for (std::size_t i = 0; i < A.size(); ++i)
        if (!(A[i] > 0.0))
            throw DomainError("log: non-positive input " + std::to_string(A[i]));
    Node n;
    n.op = Op::Log;
    n.a = a.idx;
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i) n.value[i] = std::log(A[i]);
    return push(std::move(n));
}

Value Tape::cos_(Value a) {
    const Array& A = val(a);
    Node n;
    n.op = Op::Cos;
    n.a = a.idx;
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i) n.value[i] = std::cos(A[i]);
    return push(std::move(n));
}

Value Tape::gelu(Value a) {
    const Array& A = val(a);
    Node n;
    n.op = Op::Gelu;
    n.a = a.idx;
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i)
        n.value[i] = 0.5 * A[i] * (1.0 + std::erf(A[i] * kInvSqrt2));
    return push(std::move(n));
}

Value Tape::pow_const(Value a, double p) {
    const Array& A = val(a);
    Node n;
    n.op = Op::PowConst;
    n.a = a.idx;
    n.s0 = p;
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i) n.value[i] = std::pow(A[i], p);
    return push(std::move(n));
}

Value Tape::clamp(Value a, double lo, double hi) {
    const Array& A = val(a);
    Node n;
    n.op = Op::Clamp;
    n.a = a.idx;
    n.s0 = lo;
    n.s1 = hi;
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i)
        n.value[i] = A[i] < lo ? lo : (A[i] > hi ? hi : A[i]);
    return push(std::move(n));
}

Value Tape::softmax(Value a, int axis) {
    const Array& A = val(a);
    if (A.rank() == 1) {
        if (axis != 0) throw DimError("softmax: rank-1 input, axis must be 0");
        if (A.size() == 0) throw DimError("softmax: empty axis");
    } else if (A.rank() == 2) {
        if (axis != 0 && axis != 1) throw DimError("softmax: axis must be 0 or 1");
        if (A.shape()[static_cast<std::size_t>(axis)] == 0)
            throw DimError("softmax: empty axis");
    } else {
        throw DimError("softmax: needs rank 1 or 2, got " + A.shape_str());
    }
    Node n;
    n.op = Op::Softmax;
    n.a = a.idx;
    n.axis = axis;
    n.value = A;
    auto norm_span = [](double* x, std::size_t cnt, std::size_t stride) {
        double mx = x[0];
        for (std::size_t i = 1; i < cnt; ++i) mx = std::max(mx, x[i * stride]);
        double s = 0.0;
        for (std::size_t i = 0; i < cnt; ++i) {
            x[i * stride] = std::exp(x[i * stride] - mx);
            s += x[i * stride];
        }
        for (std::size_t i = 0; i < cnt; ++i) x[i * stride] /= s;
    };
    if (A.rank() == 1) {
        norm_span(n.value.data(), A.size(), 1);
    } else if (axis == 1) {
        for (std::size_t i = 0; i < A.rows(); ++i)
            norm_span(n.value.data() + i * A.cols(), A.cols(), 1);
    } else {
        for (std::size_t j = 0; j < A.cols(); ++j)
            norm_span(n.value.data() + j, A.rows(), A.cols());
    }
    return push(std::move(n));
}

Value Tape::layer_norm(Value a, Value gain, Value bias, double eps) {
    const Array& A = val(a);
    const Array& G = val(gain);
    const Array& B = val(bias);
    if (eps <= 0.0) throw ContractError("layer_norm: eps must be positive");
    const std::size_t d = A.cols();
    if (G.rank() != 1 || B.rank() != 1 || G.size() != d || B.size() != d || d < 1)
        throw DimError("layer_norm: shapes " + A.shape_str() + ", gain " + G.shape_str() +
                       ", bias " + B.shape_str());
    const std::size_t r = A.rows();
    Node n;
    n.op = Op::LayerNorm;
    n.a = a.idx;
    n.b = gain.idx;
    n.c = bias.idx;
    n.s0 = eps;
    n.value = A;
    n.aux = Array({r, d});   // xhat
    n.aux2 = Array({r});     // inv_std
    for (std::size_t i = 0; i < r; ++i) {
        const double* x = A.data() + i * d;
        double mean = 0.0;
        for (std::size_t j = 0; j < d; ++j) mean += x[j];
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (std::size_t j = 0; j < d; ++j) var += (x[j] - mean) * (x[j] - mean);
        var /= static_cast<double>(d);
        const double inv_std = 1.0 / std::sqrt(var + eps);
        n.aux2[i] = inv_std;
        for (std::size_t j = 0; j < d; ++j) {
            const double xh = (x[j] - mean) * inv_std;
            n.aux.data()[i * d + j] = xh;
            n.value.data()[i * d + j] = G[j] * xh + B[j];
        }
    }
    return push(std::move(n));
}

Value Tape::concat_vec(const std::vector<Value>& parts) {
    if (parts.empty()) throw DimError("concat_vec: no parts");
    std::size_t total = 0;
    for (Value p : parts) {
        if (val(p).rank() != 1)
            throw DimError("concat_vec: rank-1 parts required, got " + val(p).shape_str());
        total += val(p).size();
    }
    Node n;
    n.op = Op::ConcatVec;
    n.value = Array({total});
    std::size_t off = 0;
    for (Value p : parts) {
        n.inputs.push_back(p.idx);
        const Array& P = val(p);
        for (std::size_t i = 0; i < P.size(); ++i) n.value[off + i] = P[i];
        off += P.size();
    }
    return push(std::move(n));
}

Value Tape::stack_rows(const std::vector<Value>& rows) {
    if (rows.empty()) throw DimError("stack_rows: no rows");
    const std::size_t d = val(rows[0]).size();
    for (Value p : rows)
        if (val(p).rank() != 1 || val(p).size() != d)
            throw DimError("stack_rows: all rows must be rank-1 of width " + std::to_string(d));
    Node n;
    n.op = Op::StackRows;
    n.value = Array({rows.size(), d});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        n.inputs.push_back(rows[i].idx);
        const Array& P = val(rows[i]);
        for (std::size_t j = 0; j < d; ++j) n.value.data()[i * d + j] = P[j];
    }
    return push(std::move(n));
}

Value Tape::hcat(const std::vector<Value>& parts) {
    if (parts.empty()) throw DimError("hcat: no parts");
    const std::size_t r = val(parts[0]).rows();
    std::size_t total = 0;
    for (Value p : parts) {
        if (val(p).rank() != 2 || val(p).rows() != r)
            throw DimError("hcat: rank-2 parts with equal rows required");
        total += val(p).cols();
    }
    Node n;
    n.op = Op::Hcat;
    n.value = Array({r, total});
    std::size_t off = 0;
    for (Value p : parts) {
        n.inputs.push_back(p.idx);
        const Array& P = val(p);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < P.cols(); ++j)
                n.value.data()[i * total + off + j] = P.data()[i * P.cols() + j];
        off += P.cols();
    }
    return push(std::move(n));
}

Value Tape::select_rows(Value a, std::vector<std::size_t> rows) {
    const Array& A = val(a);
    if (A.rank() != 2) throw DimError("select_rows: needs rank 2, got " + A.shape_str());
    for (std::size_t r : rows)
        if (r >= A.rows()) throw DimError("select_rows: row index out of range");
    Node n;
    n.op = Op::SelectRows;
    n.a = a.idx;
    n.indices = std::move(rows);
    n.value = Array({n.indices.size(), A.cols()});
    for (std::size_t i = 0; i < n.indices.size(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            n.value.data()[i * A.cols() + j] = A.data()[n.indices[i] * A.cols() + j];
    return push(std::move(n));
}

Value Tape::slice_cols(Value a, std::size_t begin, std::size_t end) {
    const Array& A = val(a);
    if (A.rank() != 2 || begin >= end || end > A.cols())
        throw DimError("slice_cols: bad range on shape " + A.shape_str());
    Node n;
    n.op = Op::SliceCols;
    n.a = a.idx;
    n.indices = {begin, end};
    n.value = Array({A.rows(), end - begin});
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = begin; j < end; ++j)
            n.value.data()[i * (end - begin) + (j - begin)] = A.data()[i * A.cols() + j];
    return push(std::move(n));
}

Value Tape::reshape(Value a, std::vector<std::size_t> shape) {
    const Array& A = val(a);
    std::size_t total = 1;
    for (std::size_t e : shape) total *= e;
    if (total != A.size())
        throw DimError("reshape: size mismatch " + A.shape_str() + " -> " + shape_str(shape));
    Node n;
    n.op = Op::Reshape;
    n.a = a.idx;
    std::vector<double> data(A.data(), A.data() + A.size());
    n.value = Array(std::move(shape), std::move(data));
    return push(std::move(n));
}

Value Tape::sum_all(Value a) {
    const Array& A = val(a);
    Node n;
    n.op = Op::SumAll;
    n.a = a.idx;
    double s = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) s += A[i];
    n.value = Array::scalar(s);
    return push(std::move(n));
}

Value Tape::mean_all(Value a) {
    const Array& A = val(a);
    if (A.size() == 0) throw DimError("mean_all: empty input");
    Node n;
    n.op = Op::MeanAll;
    n.a = a.idx;
    double s = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) s += A[i];
    n.value = Array::scalar(s / static_cast<double>(A.size()));
    return push(std::move(n));
}

Value Tape::mean_rows(Value a) {
    const Array& A = val(a);
    if (A.rank() != 2 || A.rows() == 0)
        throw DimError("mean_rows: needs non-empty rank 2, got " + A.shape_str());
    Node n;
    n.op = Op::MeanRows;
    n.a = a.idx;
    n.value = Array({A.cols()});
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) n.value[j] += A.data()[i * A.cols() + j];
    for (std::size_t j = 0; j < A.cols(); ++j) n.value[j] /= static_cast<double>(A.rows());
    return push(std::move(n));
}

Value Tape::dropout(Value a, double rate, Rng& rng, bool active) {
    if (!active || rate <= 0.0) return a;
    if (rate >= 1.0) throw ContractError("dropout: rate must be < 1");
    const Array& A = val(a);
    Node n;
    n.op = Op::Dropout;
    n.a = a.idx;
    n.s0 = rate;
    n.aux = Array(A.shape());
    const double keep_scale = 1.0 / (1.0 - rate);
    n.value = A;
    for (std::size_t i = 0; i < A.size(); ++i) {
        const double m = rng.uniform01() < rate ? 0.0 : keep_scale;
        n.aux[i] = m;
        n.value[i] *= m;
    }
    return push(std::move(n));
}

void Tape::backward(Value loss) {
    if (backward_done_)
        throw ContractError("backward: already run on this tape; reset by building a new tape");
    const Array& L = val(loss);
    if (L.size() != 1)
        throw ContractError("backward: loss must be scalar, got shape " + L.shape_str());
    grads_.clear();
    grads_.reserve(nodes_.size());
    for (const Node& n : nodes_) grads_.emplace_back(n.value.shape());
    g(loss.idx)[0] = 1.0;
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) backprop_node(i);
    backward_done_ = true;
}

const Array& Tape::grad(Value vv) const {
    if (!backward_done_) throw ContractError("grad: backward has not run");
    return grads_[static_cast<std::size_t>(vv.idx)];
}

void Tape::backprop_node(int i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    const Array& go = grads_[static_cast<std::size_t>(i)];
    switch (n.op) {
        case Op::Leaf:
            break;
        case Op::Matmul: {
            // dA = dC * B^T, dB = A^T * dC
            Array bt = transposed(v(n.b));
            matmul_into(go, bt, g(n.a), true);
            Array at = transposed(v(n.a));
            matmul_into(at, go, g(n.b), true);
            break;
        }
        case Op::Transpose: {
            const Array& A = v(n.a);
            Array& ga = g(n.a);
            for (std::size_t r = 0; r < A.rows(); ++r)
                for (std::size_t c = 0; c < A.cols(); ++c)
                    ga.data()[r * A.cols() + c] += go.data()[c * A.rows() + r];
            break;
        }
        case Op::Add: {
            for (std::size_t k = 0; k < go.size(); ++k) g(n.a)[k] += go[k];
            for (std::size_t k = 0; k < go.size(); ++k) g(n.b)[k] += go[k];
            break;
        }
        case Op::Sub: {
            for (std::size_t k = 0; k < go.size(); ++k) g(n.a)[k] += go[k];
            for (std::size_t k = 0; k < go.size(); ++k) g(n.b)[k] -= go[k];
            break;
        }
        case Op::Mul: {
            const Array& A = v(n.a);
            const Array& B = v(n.b);
            for (std::size_t k = 0; k < go.size(); ++k) g(n.a)[k] += go[k] * B[k];
            for (std::size_t k = 0; k < go.size(); ++k) g(n.b)[k] += go[k] * A[k];
            break;
        }
        case Op::AddRowvec: {
            const Array& M = v(n.a);
            for (std::size_t k = 0; k < go.size(); ++k) g(n.a)[k] += go[k];
            Array& gv = g(n.b);
            for (std::size_t r = 0; r < M.rows(); ++r)
                for (std::size_t c = 0; c < M.cols(); ++c)
                    gv[c] += go.data()[r * M.cols() + c];
            break;
        }
        case Op::AffineConst: {
            for (std::size_t k = 0; k < go.size(); ++k) g(n.a)[k] += n.s0 * go[k];
            break;
        }
        case Op::AddConstArr: {
            for (std::size_t k = 0; k < go.size(); ++k) g(n.a)[k] += go[k];
            break;
        }
        case Op::Sigmoid: {
            const Array& Y = n.value;
            for (std::size_t k = 0; k < go.size(); ++k)
                g(n.a)[k] += go[k] * Y[k] * (1.0 - Y[k]);
            break;
        }
        case Op::Tanh: {
            const Array& Y = n.value;
            for (std::size_t k = 0; k < go.size(); ++k)
                g(n.a)[k] += go[k] * (1.0 - Y[k] * Y[k]);
            break;
        }
        case Op::Exp: {
            const Array& Y = n.value;
            for (std::size_t k = 0; k < go.size(); ++k) g(n.a)[k] += go[k] * Y[k];
            break;
        }
        case Op::Log: {
            const Array& X = v(n.a);
            for (std::size_t k = 0; k < go.size(); ++k) g(n.a)[k] += go[k] / X[k];
            break;
        }
        case Op::Cos: {
            const Array& X = v(n.a);
            for (std::size_t k = 0; k < go.size(); ++k)
                g(n.a)[k] -= go[k] * std::sin(X[k]);
            break;
        }
        case Op::Gelu: {
            const Array& X = v(n.a);
            for (std::size_t k = 0; k < go.size(); ++k) {
                const double x = X[k];
                const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
                const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
                g(n.a)[k] += go[k] * (cdf + x * pdf);
            }
            break;
        }
        case Op::PowConst: {
            const Array& X = v(n.a);
            const double p = n.s0;
            for (std::size_t k = 0; k < go.size(); ++k) {
                double d = 0.0;
                if (p != 0.0 && !(X[k] == 0.0 && p < 1.0)) d = p * std::pow(X[k], p - 1.0);
                g(n.a)[k] += go[k] * d;
            }
            break;
        }
        case Op::Clamp: {
            const Array& X = v(n.a);
            for (std::size_t k = 0; k < go.size(); ++k)
                if (X[k] > n.s0 && X[k] < n.s1) g(n.a)[k] += go[k];
            break;
        }
        case Op::Softmax: {
            const Array& Y = n.value;
            Array& ga = g(n.a);
            auto back_span = [&](std::size_t base, std::size_t cnt, std::size_t stride) {
                double dot = 0.0;
                for (std::size_t k = 0; k < cnt; ++k)
                    dot += go[base + k * stride] * Y[base + k * stride];
                for (std::size_t k = 0; k < cnt; ++k)
                    ga[base + k * stride] +=
                        Y[base + k * stride] * (go[base + k * stride] - dot);
            };
            if (Y.rank() == 1) {
                back_span(0, Y.size(), 1);
            } else if (n.axis == 1) {
                for (std::size_t r = 0; r < Y.rows(); ++r)
                    back_span(r * Y.cols(), Y.cols(), 1);
            } else {
                for (std::size_t c = 0; c < Y.cols(); ++c)
                    back_span(c, Y.rows(), Y.cols());
            }
            break;
        }
        case Op::LayerNorm: {
            const Array& xhat = n.aux;
            const Array& inv_std = n.aux2;
            const Array& G = v(n.b);
            const std::size_t r = xhat.rows(), d = xhat.cols();
            Array& ga = g(n.a);
            Array& gg = g(n.b);
            Array& gb = g(n.c);
            for (std::size_t i = 0; i < r; ++i) {
                const double* xh = xhat.data() + i * d;
                const double* gout = go.data() + i * d;
                double mean_dxh = 0.0, mean_dxh_xh = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double dxh = gout[j] * G[j];
                    mean_dxh += dxh;
                    mean_dxh_xh += dxh * xh[j];
                    gg[j] += gout[j] * xh[j];
                    gb[j] += gout[j];
                }
                mean_dxh /= static_cast<double>(d);
                mean_dxh_xh /= static_cast<double>(d);
                for (std::size_t j = 0; j < d; ++j) {
                    const double dxh = gout[j] * G[j];
                    ga.data()[i * d + j] +=
                        inv_std[i] * (dxh - mean_dxh - xh[j] * mean_dxh_xh);
                }
            }
            break;
        }
        case Op::ConcatVec: {
            std::size_t off = 0;
            for (int in : n.inputs) {
                Array& gi = g(in);
                for (std::size_t k = 0; k < gi.size(); ++k) gi[k] += go[off + k];
                off += gi.size();
            }
            break;
        }
        case Op::StackRows: {
            const std::size_t d = n.value.cols();
            for (std::size_t r = 0; r < n.inputs.size(); ++r) {
                Array& gi = g(n.inputs[r]);
                for (std::size_t j = 0; j < d; ++j) gi[j] += go.data()[r * d + j];
            }
            break;
        }
        case Op::Hcat: {
            const std::size_t total = n.value.cols();
            std::size_t off = 0;
            for (int in : n.inputs) {
                Array& gi = g(in);
                const std::size_t c = gi.cols();
                for (std::size_t r = 0; r < gi.rows(); ++r)
                    for (std::size_t j = 0; j < c; ++j)
                        gi.data()[r * c + j] += go.data()[r * total + off + j];
                off += c;
            }
            break;
        }
        case Op::SelectRows: {
            const std::size_t c = n.value.cols();
            Array& ga = g(n.a);
            for (std::size_t k = 0; k < n.indices.size(); ++k)
                for (std::size_t j = 0; j < c; ++j)
                    ga.data()[n.indices[k] * c + j] += go.data()[k * c + j];
            break;
        }
        case Op::SliceCols: {
            Array& ga = g(n.a);
            const std::size_t begin = n.indices[0], end = n.indices[1];
            const std::size_t w = end - begin;
            for (std::size_t i = 0; i < ga.rows(); ++i)
                for (std::size_t j = 0; j < w; ++j)
                    ga.data()[i * ga.cols() + begin + j] += go.data()[i * w + j];
            break;
        }
        case Op::Reshape: {
            Array& ga = g(n.a);
            for (std::size_t k = 0; k < go.size(); ++k) ga[k] += go[k];
            break;
        }
        case Op::SumAll: {
            Array& ga = g(n.a);
            for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += go[0];
            break;
        }
        case Op::MeanAll: {
            Array& ga = g(n.a);
            const double s = go[0] / static_cast<double>(ga.size());
            for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += s;
            break;
        }
        case Op::MeanRows: {
            Array& ga = g(n.a);
            const std::size_t r = ga.rows(), c = ga.cols();
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j)
                    ga.data()[i * c + j] += go[j] / static_cast<double>(r);
            break;
        }
        case Op::Dropout: {
            const Array& mask = n.aux;
            for (std::size_t k = 0; k < go.size(); ++k) g(n.a)[k] += go[k] * mask[k];
            break;
        }
    }
}

}  // namespace bita::num
