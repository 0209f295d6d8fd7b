#include <cmath>
#include <functional>
#include <vector>

#include "bita/aggregators.hpp"
#include "doctest.h"

using namespace bita::agg;
using bita::num::Array;
using bita::num::Rng;
using bita::num::Tape;
using bita::num::Value;

namespace {

Array random_array(std::vector<std::size_t> shape, Rng& rng) {
    Array a(std::move(shape));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.uniform(-1.0, 1.0);
    return a;
}

struct RawItem {
    std::vector<double> msg;
    double t;
    std::uint64_t edge;
};

MessageBatch to_batch(Tape& t, const std::vector<std::pair<bita::events::NodeId,
                                                           std::vector<RawItem>>>& raw) {
    MessageBatch batch;
    for (const auto& [node, items] : raw) {
        std::vector<MessageItem> list;
        for (const auto& item : items)
            list.push_back({t.leaf(Array({item.msg.size()}, item.msg)), item.t, item.edge});
        batch.emplace_back(node, std::move(list));
    }
    return batch;
}

// independent last/mean oracles over raw items
std::vector<double> last_oracle(const std::vector<RawItem>& items) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < items.size(); ++i)
        if (items[i].t >= items[best].t) best = i;  // latest t, latest arrival
    return items[best].msg;
}

std::vector<double> mean_oracle(const std::vector<RawItem>& items) {
    std::vector<double> m(items[0].msg.size(), 0.0);
    for (const auto& item : items)
        for (std::size_t j = 0; j < m.size(); ++j) m[j] += item.msg[j];
    for (auto& v : m) v /= static_cast<double>(items.size());
    return m;
}

// plain-double GRU unrolling, independent of the tape
std::vector<double> gru_step_plain(const bita::enc::GruCell& c, const std::vector<double>& x,
                                   const std::vector<double>& h) {
    const std::size_t din = c.d_in(), dh = c.d_h();
    auto mix = [&](const Array& w, const std::vector<double>& v, const Array& u,
                   const std::vector<double>& s, const Array& b, std::size_t j) {
        double acc = b[j];
        for (std::size_t i = 0; i < din; ++i) acc += v[i] * w.at(i, j);
        for (std::size_t i = 0; i < dh; ++i) acc += s[i] * u.at(i, j);
        return acc;
    };
    std::vector<double> z(dh), r(dh), out(dh);
    for (std::size_t j = 0; j < dh; ++j)
        z[j] = 1.0 / (1.0 + std::exp(-mix(c.w_z, x, c.u_z, h, c.b_z, j)));
    for (std::size_t j = 0; j < dh; ++j)
        r[j] = 1.0 / (1.0 + std::exp(-mix(c.w_r, x, c.u_r, h, c.b_r, j)));
    std::vector<double> rh(dh);
    for (std::size_t j = 0; j < dh; ++j) rh[j] = r[j] * h[j];
    for (std::size_t j = 0; j < dh; ++j) {
        const double cand = std::tanh(mix(c.w_h, x, c.u_h, rh, c.b_h, j));
        out[j] = (1.0 - z[j]) * h[j] + z[j] * cand;
    }
    return out;
}

// finite-difference gradient check over every parameter reachable through a
// Binder-built forward pass
double binder_fd_check(
    const std::function<Value(Tape&, bita::enc::Binder&)>& forward, double h) {
    Tape t0;
    bita::enc::Binder b0(t0);
    Value loss0 = forward(t0, b0);
    t0.backward(loss0);

    double worst = 0.0;
    for (const auto& entry : b0.entries()) {
        const Array& analytic = t0.grad(entry.leaf);
        for (std::size_t i = 0; i < entry.array->size(); ++i) {
            const double saved = (*entry.array)[i];
            (*entry.array)[i] = saved + h;
            Tape tp;
            bita::enc::Binder bp(tp);
            const double fp = tp.val(forward(tp, bp))[0];
            (*entry.array)[i] = saved - h;
            Tape tm;
            bita::enc::Binder bm(tm);
            const double fm = tm.val(forward(tm, bm))[0];
            (*entry.array)[i] = saved;
            const double numeric = (fp - fm) / (2.0 * h);
            const double denom = std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-6});
            worst = std::max(worst, std::fabs(analytic[i] - numeric) / denom);
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("aggregate_last basics and tie rule") {
    Rng rng(1);
    Aggregator agg = Aggregator::create(Kind::Last, 3, 2, 1, rng);
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(3, rng);
    Tape t;
    bita::enc::Binder b(t);
    auto ref = agg.bind(b, "agg");
    auto teref = te.bind(b, "te");

    auto batch = to_batch(t, {{5, {{{1, 1, 1}, 1.0, 0}, {{2, 2, 2}, 2.0, 0}}},
                              {7, {{{9, 8, 7}, 4.0, 1}}},
                              {9, {{{1, 0, 0}, 3.0, 2}, {{0, 1, 0}, 3.0, 2}}}});
    auto out = aggregate(t, ref, teref, batch);
    REQUIRE(out.size() == 3);
    CHECK(t.val(out[0].value)[0] == 2.0);  // latest-t message
    CHECK(t.val(out[1].value)[0] == 9.0);  // single message is itself
    CHECK(t.val(out[2].value)[1] == 1.0);  // equal timestamps: last arrival
}

TEST_CASE("aggregate_mean basics") {
    Rng rng(2);
    Aggregator agg = Aggregator::create(Kind::Mean, 2, 2, 1, rng);
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(2, rng);
    Tape t;
    bita::enc::Binder b(t);
    auto ref = agg.bind(b, "agg");
    auto teref = te.bind(b, "te");

    auto batch = to_batch(t, {{1, {{{1, 3}, 0.0, 0}, {{3, 5}, 1.0, 0}}},
                              {2, {{{7, -2}, 0.0, 1}}},
                              {3, {{{0.5, -0.25}, 0.0, 2},
                                   {{0.5, -0.25}, 1.0, 2},
                                   {{0.5, -0.25}, 2.0, 2},
                                   {{0.5, -0.25}, 3.0, 2}}}});
    auto out = aggregate(t, ref, teref, batch);
    CHECK(t.val(out[0].value)[0] == 2.0);
    CHECK(t.val(out[0].value)[1] == 4.0);
    CHECK(t.val(out[1].value)[0] == 7.0);  // single message is itself
    // idempotence on copies (dyadic values keep the arithmetic exact)
    CHECK(t.val(out[2].value)[0] == 0.5);
    CHECK(t.val(out[2].value)[1] == -0.25);
}

TEST_CASE("last and mean match brute-force oracles on random batches") {
    Rng rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.uniform_int(6);
        std::vector<RawItem> items;
        double tcur = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            tcur += rng.uniform_int(2) == 0 ? 0.0 : rng.uniform(0.0, 2.0);  // allow ties
            items.push_back({{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)},
                             tcur,
                             rng.uniform_int(3)});
        }
        Tape t;
        bita::enc::Binder b(t);
        Aggregator last = Aggregator::create(Kind::Last, 3, 2, 1, rng);
        Aggregator mean = Aggregator::create(Kind::Mean, 3, 2, 1, rng);
        bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(3, rng);
        auto lref = last.bind(b, "l");
        auto mref = mean.bind(b, "m");
        auto teref = te.bind(b, "te");
        auto batch = to_batch(t, {{0, items}});
        auto lout = aggregate(t, lref, teref, batch);
        auto mout = aggregate(t, mref, teref, batch);
        auto lexp = last_oracle(items);
        auto mexp = mean_oracle(items);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(t.val(lout[0].value)[j] == lexp[j]);  // bitwise
            CHECK(std::fabs(t.val(mout[0].value)[j] - mexp[j]) <= 1e-15);
        }
    }
}

TEST_CASE("aggregate_attention trivial cases") {
    Rng rng(4);
    Aggregator agg = Aggregator::create(Kind::Attention, 3, 2, 1, rng);
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(3, rng);

    Tape t;
    bita::enc::Binder b(t);
    auto ref = agg.bind(b, "agg");
    auto teref = te.bind(b, "te");

    // one message: weight 1
    auto single = to_batch(t, {{1, {{{4, 5, 6}, 0.0, 0}}}});
    auto out1 = aggregate(t, ref, teref, single);
    for (std::size_t j = 0; j < 3; ++j) CHECK(t.val(out1[0].value)[j] == doctest::Approx(std::vector<double>{4, 5, 6}[j]).epsilon(1e-14));

    // identical messages: convexity returns the message
    auto same = to_batch(t, {{1, {{{2, -1, 0.5}, 0.0, 0}, {{2, -1, 0.5}, 1.0, 0},
                                  {{2, -1, 0.5}, 2.0, 0}}}});
    auto out2 = aggregate(t, ref, teref, same);
    CHECK(std::fabs(t.val(out2[0].value)[0] - 2.0) < 1e-12);
    CHECK(std::fabs(t.val(out2[0].value)[1] + 1.0) < 1e-12);
}

TEST_CASE("attention with zero query equals mean") {
    Rng rng(5);
    Aggregator attn = Aggregator::create(Kind::Attention, 4, 2, 1, rng);
    for (std::size_t i = 0; i < attn.attn_query->size(); ++i) (*attn.attn_query)[i] = 0.0;
    Aggregator mean = Aggregator::create(Kind::Mean, 4, 2, 1, rng);
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(4, rng);

    Tape t;
    bita::enc::Binder b(t);
    auto aref = attn.bind(b, "a");
    auto mref = mean.bind(b, "m");
    auto teref = te.bind(b, "te");

    std::vector<RawItem> items;
    for (int i = 0; i < 5; ++i)
        items.push_back(
            {{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)},
             static_cast<double>(i), 0});
    auto batch = to_batch(t, {{3, items}});
    auto aout = aggregate(t, aref, teref, batch);
    auto mout = aggregate(t, mref, teref, batch);
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(std::fabs(t.val(aout[0].value)[j] - t.val(mout[0].value)[j]) <= 1e-12);
}

TEST_CASE("aggregate_bigru zero parameters give the projection bias") {
    Rng rng(6);
    Aggregator agg = Aggregator::create(Kind::Bigru, 3, 2, 1, rng);
    agg.seq_net->visit("s", [](const std::string&, Array& a) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.0;
    });
    for (std::size_t i = 0; i < agg.proj->w.size(); ++i) agg.proj->w[i] = 0.0;
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(3, rng);

    Tape t;
    bita::enc::Binder b(t);
    auto ref = agg.bind(b, "agg");
    auto teref = te.bind(b, "te");
    auto batch = to_batch(t, {{1, {{{1, 2, 3}, 0.0, 0}, {{4, 5, 6}, 1.0, 0}}}});
    auto out = aggregate(t, ref, teref, batch);
    for (std::size_t j = 0; j < 3; ++j) CHECK(t.val(out[0].value)[j] == agg.proj->b[j]);
}

TEST_CASE("aggregate_bigru matches manual unrolling oracle") {
    Rng rng(7);
    const std::size_t d = 4, dh = 3;
    Aggregator agg = Aggregator::create(Kind::Bigru, d, dh, 1, rng);
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(d, rng);

    std::vector<RawItem> items;
    for (int i = 0; i < 5; ++i) {
        RawItem item;
        for (std::size_t j = 0; j < d; ++j) item.msg.push_back(rng.uniform(-1, 1));
        item.t = i * 10.0;
        item.edge = 0;
        items.push_back(item);
    }

    Tape t;
    bita::enc::Binder b(t);
    auto ref = agg.bind(b, "agg");
    auto teref = te.bind(b, "te");
    auto out = aggregate(t, ref, teref, to_batch(t, {{2, items}}));

    // oracle: time-encode, run both directions step by step, project
    auto encode_x = [&](const RawItem& item) {
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j)
            x[j] = item.msg[j] + std::cos(te.omega[j] * item.t + te.phi[j]);
        return x;
    };
    std::vector<double> hf(dh, 0.0), hb(dh, 0.0);
    for (const auto& item : items) hf = gru_step_plain(agg.seq_net->forward_cell, encode_x(item), hf);
    hb = gru_step_plain(agg.seq_net->backward_cell, encode_x(items.back()), hb);
    std::vector<double> final;
    final.insert(final.end(), hf.begin(), hf.end());
    final.insert(final.end(), hb.begin(), hb.end());
    for (std::size_t j = 0; j < d; ++j) {
        double expect = agg.proj->b[j];
        for (std::size_t i = 0; i < 2 * dh; ++i) expect += final[i] * agg.proj->w.at(i, j);
        CHECK(std::fabs(t.val(out[0].value)[j] - expect) < 1e-10);
    }
}

TEST_CASE("bita single edge and single node readout") {
    Rng rng(8);
    Aggregator agg = Aggregator::create(Kind::Bita, 4, 2, 2, rng);
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(4, rng);
    Tape t;
    bita::enc::Binder b(t);
    auto ref = agg.bind(b, "agg");
    auto teref = te.bind(b, "te");
    auto batch = to_batch(t, {{1, {{{1, 0, -1, 2}, 0.0, 42}, {{0, 1, 1, 0}, 5.0, 42}}}});
    auto out = aggregate(t, ref, teref, batch);
    REQUIRE(out.size() == 1);
    CHECK(t.val(out[0].value).size() == 4);
    // a second run is bitwise identical (determinism)
    Tape t2;
    bita::enc::Binder b2(t2);
    auto ref2 = agg.bind(b2, "agg");
    auto teref2 = te.bind(b2, "te");
    auto batch2 = to_batch(t2, {{1, {{{1, 0, -1, 2}, 0.0, 42}, {{0, 1, 1, 0}, 5.0, 42}}}});
    auto out2 = aggregate(t2, ref2, teref2, batch2);
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(t.val(out[0].value)[j] == t2.val(out2[0].value)[j]);
}

TEST_CASE("bita with neutralized transformer equals projected bigru") {
    Rng rng(9);
    Aggregator bita_agg = Aggregator::create(Kind::Bita, 4, 3, 2, rng);
    // zero every transformer parameter: the residual path becomes the identity
    bita_agg.context->visit("c", [](const std::string&, Array& a) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.0;
    });
    Aggregator bigru_agg = Aggregator::create(Kind::Bigru, 4, 3, 1, rng);
    bigru_agg.seq_net = bita_agg.seq_net;  // tie sequence nets and projections
    bigru_agg.proj = bita_agg.proj;
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(4, rng);

    Tape t;
    bita::enc::Binder b(t);
    auto bref = bita_agg.bind(b, "bita");
    auto gref = bigru_agg.bind(b, "bigru");
    auto teref = te.bind(b, "te");

    // one edge per node so the node sequence equals the edge sequence
    std::vector<std::pair<bita::events::NodeId, std::vector<RawItem>>> raw;
    for (int node = 0; node < 3; ++node) {
        std::vector<RawItem> items;
        for (int i = 0; i < 3; ++i)
            items.push_back({{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                              rng.uniform(-1, 1)},
                             static_cast<double>(i), static_cast<std::uint64_t>(node)});
        raw.emplace_back(node, items);
    }
    auto bout = aggregate(t, bref, teref, to_batch(t, raw));
    auto gout = aggregate(t, gref, teref, to_batch(t, raw));
    REQUIRE(bout.size() == gout.size());
    for (std::size_t i = 0; i < bout.size(); ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::fabs(t.val(bout[i].value)[j] - t.val(gout[i].value)[j]) <= 1e-10);
}

TEST_CASE("bita mean readout over contextual embeddings") {
    Tape t;
    Value tokens = t.leaf(Array({2, 2}, {2, 0, 0, 2}));
    Value pooled = readout_mean(t, tokens, {0, 1});
    CHECK(t.val(pooled)[0] == 1.0);
    CHECK(t.val(pooled)[1] == 1.0);
}

TEST_CASE("dispatch: all five kinds produce identical shapes") {
    Rng rng(10);
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(4, rng);
    std::vector<std::pair<bita::events::NodeId, std::vector<RawItem>>> raw = {
        {1, {{{1, 2, 3, 4}, 0.0, 0}, {{2, 3, 4, 5}, 1.0, 0}}},
        {4, {{{0, 0, 1, 1}, 0.5, 1}}},
    };
    for (Kind kind : all_kinds()) {
        Aggregator agg = Aggregator::create(kind, 4, 2, 2, rng);
        Tape t;
        bita::enc::Binder b(t);
        auto ref = agg.bind(b, "agg");
        auto teref = te.bind(b, "te");
        auto out = aggregate(t, ref, teref, to_batch(t, raw));
        REQUIRE(out.size() == 2);
        CHECK(out[0].node == 1);
        CHECK(out[1].node == 4);
        for (const auto& item : out) CHECK(t.val(item.value).size() == 4);
    }
    CHECK_THROWS_AS(kind_from_string("bogus"), bita::ConfigError);
    CHECK(kind_from_string("bita") == Kind::Bita);
}

TEST_CASE("order sensitivity: sequences matter for bigru and bita, not mean") {
    Rng rng(11);
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(4, rng);
    std::vector<RawItem> fwd;
    for (int i = 0; i < 3; ++i)
        fwd.push_back({{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                        rng.uniform(-1, 1)},
                       static_cast<double>(i), 0});
    std::vector<RawItem> rev(fwd.rbegin(), fwd.rend());
    for (std::size_t i = 0; i < rev.size(); ++i) rev[i].t = static_cast<double>(i);

    for (Kind kind : {Kind::Bigru, Kind::Bita}) {
        Aggregator agg = Aggregator::create(kind, 4, 3, 2, rng);
        Tape t;
        bita::enc::Binder b(t);
        auto ref = agg.bind(b, "agg");
        auto teref = te.bind(b, "te");
        auto a = aggregate(t, ref, teref, to_batch(t, {{0, fwd}}));
        auto c = aggregate(t, ref, teref, to_batch(t, {{0, rev}}));
        double diff = 0.0;
        for (std::size_t j = 0; j < 4; ++j)
            diff += std::fabs(t.val(a[0].value)[j] - t.val(c[0].value)[j]);
        CHECK(diff > 0.0);
    }

    Aggregator mean = Aggregator::create(Kind::Mean, 4, 2, 1, rng);
    Tape t;
    bita::enc::Binder b(t);
    auto mref = mean.bind(b, "m");
    auto teref = te.bind(b, "te");
    auto a = aggregate(t, mref, teref, to_batch(t, {{0, fwd}}));
    auto c = aggregate(t, mref, teref, to_batch(t, {{0, rev}}));
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(std::fabs(t.val(a[0].value)[j] - t.val(c[0].value)[j]) <= 1e-15);
}

TEST_CASE("gradients flow through bita into every block") {
    Rng rng(12);
    Aggregator agg = Aggregator::create(Kind::Bita, 4, 2, 2, rng);
    bita::enc::TimeEncoder te = bita::enc::TimeEncoder::create(4, rng);
    std::vector<std::pair<bita::events::NodeId, std::vector<RawItem>>> raw = {
        {1, {{{0.3, -0.2, 0.5, 0.1}, 0.0, 0}, {{0.1, 0.4, -0.6, 0.2}, 1.0, 0}}},
        {2, {{{-0.5, 0.2, 0.0, 0.7}, 0.5, 1}}},
    };

    auto forward = [&](Tape& t, bita::enc::Binder& b) {
        auto ref = agg.bind(b, "agg");
        auto teref = te.bind(b, "te");
        auto out = aggregate(t, ref, teref, to_batch(t, raw));
        std::vector<Value> rows;
        for (const auto& item : out) rows.push_back(item.value);
        Value stacked = t.stack_rows(rows);
        return t.mean_all(t.mul(stacked, stacked));
    };

    // non-zero gradient norm per block family
    Tape t;
    bita::enc::Binder b(t);
    Value loss = forward(t, b);
    t.backward(loss);
    double seq_norm = 0, proj_norm = 0, ctx_norm = 0;
    for (const auto& entry : b.entries()) {
        double norm = 0;
        const Array& g = t.grad(entry.leaf);
        for (std::size_t i = 0; i < g.size(); ++i) norm += g[i] * g[i];
        if (entry.name.find(".seq") != std::string::npos) seq_norm += norm;
        if (entry.name.find(".proj") != std::string::npos) proj_norm += norm;
        if (entry.name.find(".ctx") != std::string::npos) ctx_norm += norm;
    }
    CHECK(seq_norm > 0.0);
    CHECK(proj_norm > 0.0);
    CHECK(ctx_norm > 0.0);

    CHECK(binder_fd_check(forward, 1e-5) < 1e-4);
}
