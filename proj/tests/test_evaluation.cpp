#include <cmath>

#include "bita/evaluation.hpp"
#include "doctest.h"

using namespace bita::eval;
using bita::engine::Engine;
using bita::engine::EngineConfig;
using bita::events::EventStream;
using bita::events::SynthSpec;
using bita::num::Rng;
namespace agg = bita::agg;

namespace {

EngineConfig tiny_config() {
    EngineConfig c;
    c.kind = agg::Kind::Bita;
    c.d_mem = 4;
    c.d_msg = 8;
    c.d_time = 8;
    c.d_node = 8;
    c.bigru_hidden = 4;
    c.heads = 2;
    c.dropout = 0.0;
    c.batch_size = 16;
    c.lr = 1e-3;
    c.epochs = 2;
    c.window = 8;
    c.seed = 11;
    return c;
}

EventStream small_stream(std::uint64_t seed = 3) {
    SynthSpec spec;
    spec.n_attackers = 6;
    spec.n_victims = 6;
    spec.pairs_per_attacker = 2;
    spec.horizon = 1200.0;
    spec.period = 100.0;
    spec.jitter = 20.0;
    spec.categories = 3;
    Rng rng(seed);
    return bita::events::synth_stream(spec, rng);
}

}  // namespace

TEST_CASE("evaluate produces deterministic reports and filters by mode") {
    EventStream s = small_stream();
    auto split = bita::events::temporal_split(s);
    Rng mask_rng(5);
    bita::events::inductive_mask(split, mask_rng, 0.10);

    auto run_eval = [&] {
        Engine eng(tiny_config(), s);
        Rng rng(21);
        return evaluate(eng, split.test, split.test_inductive, EvalMode::Both, rng, 10);
    };
    auto reports = run_eval();
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].mode == "transductive");
    CHECK(reports[1].mode == "inductive");
    CHECK(reports[0].event_count + reports[1].event_count == split.test.events.size());
    if (!reports[0].empty) {
        CHECK(reports[0].auc >= 0.0);
        CHECK(reports[0].auc <= 1.0);
        CHECK(reports[0].mrr > 0.0);
        CHECK(reports[0].hits.at(1) <= reports[0].hits.at(3));
        CHECK_FALSE(reports[0].roc.empty());
        CHECK_FALSE(reports[0].pr.empty());
    }

    auto reports2 = run_eval();
    CHECK(reports2[0].auc == reports[0].auc);
    CHECK(reports2[0].mrr == reports[0].mrr);
    CHECK(reports2[1].event_count == reports[1].event_count);
}

TEST_CASE("evaluate reports empty status when a mode has no events") {
    EventStream s = small_stream();
    auto split = bita::events::temporal_split(s);
    // no inductive flags at all: the inductive report must be empty
    Engine eng(tiny_config(), s);
    Rng rng(3);
    auto reports = evaluate(eng, split.test, {}, EvalMode::Inductive, rng, 5);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].empty);
    CHECK(reports[0].event_count == 0);
}

TEST_CASE("causality audit: shipped engine is exact, leaky build fails") {
    EventStream s = small_stream();
    EngineConfig cfg = tiny_config();
    auto report = causality_audit(cfg, s, 5, 0.0);
    CHECK(report.determinism_ok);
    CHECK(report.probes > 0);
    CHECK(report.compared > 0);
    CHECK(report.delta_max == 0.0);
    CHECK(report.delta_mean == 0.0);
    CHECK(report.pearson_r == doctest::Approx(1.0));
    CHECK(report.pass);

    EngineConfig leaky = cfg;
    leaky.leak_current_batch = true;
    auto bad = causality_audit(leaky, s, 5, 0.0);
    CHECK(bad.determinism_ok);
    CHECK(bad.delta_max > 0.0);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("order invariance: identical batch order gives zero variance") {
    EventStream s = small_stream();
    EngineConfig cfg = tiny_config();
    cfg.epochs = 1;
    auto report = order_invariance_audit(cfg, s, 3, 1, /*shuffle=*/false);
    CHECK(report.runs == 3);
    CHECK(report.edges > 0);
    CHECK(report.mean_variance == 0.0);
    CHECK(report.max_variance == 0.0);
    CHECK(report.fraction_below_1e2 == 1.0);
}

TEST_CASE("order invariance: shuffled batches stay within desk-scale bounds") {
    EventStream s = small_stream();
    EngineConfig cfg = tiny_config();
    cfg.epochs = 2;
    auto report = order_invariance_audit(cfg, s, 3, 7, /*shuffle=*/true);
    CHECK(report.edges > 0);
    CHECK(report.mean_variance < 1e-2);
    CHECK(report.max_variance < 5e-2);
    CHECK_THROWS_AS(order_invariance_audit(cfg, s, 1, 7, true), bita::ContractError);
}
