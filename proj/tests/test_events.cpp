#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include "bita/events.hpp"
#include "doctest.h"

using namespace bita::events;
using bita::num::Rng;

namespace {

const char* kFixture = BITA_DATA_DIR "/alerts_sample.csv";

EventStream uniform_stream(std::size_t n, std::uint32_t categories = 1) {
    // n events at t = 1..n, round-robin over a few node pairs.
    EventStream s;
    s.attacker_count = 3;
    s.node_count = 6;
    for (int i = 0; i < 6; ++i) s.node_names.push_back("n" + std::to_string(i));
    for (std::uint32_t c = 0; c < categories; ++c)
        s.category_names.push_back("c" + std::to_string(c));
    for (std::size_t i = 0; i < n; ++i) {
        TemporalEvent e;
        e.src = static_cast<NodeId>(i % 3);
        e.dst = static_cast<NodeId>(3 + (i % 3));
        e.t = static_cast<double>(i + 1);
        e.category = static_cast<std::uint32_t>(i % categories);
        e.features = {1, 0, 0, 1, 0, 0, 0.5};
        s.events.push_back(e);
    }
    return s;
}

bool events_equal(const TemporalEvent& a, const TemporalEvent& b) {
    return a.src == b.src && a.dst == b.dst && a.t == b.t && a.category == b.category &&
           a.flow_count == b.flow_count && a.port == b.port && a.protocol == b.protocol &&
           a.features == b.features;
}

}  // namespace

TEST_CASE("parse_csv on the shipped sample") {
    EventStream s = parse_csv(kFixture);
    REQUIRE(s.events.size() == 3);
    CHECK(s.attacker_count == 2);
    CHECK(s.node_count == 4);
    REQUIRE(s.category_names.size() == 3);
    CHECK(s.category_names[0] == "Recon scan");
    CHECK(s.category_names[1] == "Availability Dos");
    CHECK(s.category_names[2] == "Anomaly.Traffic");

    CHECK(s.events[0].t == 0.0);
    CHECK(s.events[1].t == 88800.0);   // +1d 0:40
    CHECK(s.events[2].t == 260400.0);  // +3d 0:20
    CHECK(s.events[1].src == s.events[2].src);
    CHECK(s.events[1].dst == s.events[2].dst);
    CHECK(s.events[0].src != s.events[1].src);
    CHECK(s.feature_width() == 7);
    // port 22 -> well-known bucket, TCP one-hot
    CHECK(s.events[0].features[0] == 1.0);
    CHECK(s.events[0].features[3] == 1.0);
    // max flow row normalizes to 1
    CHECK(s.events[0].features[6] == 1.0);
    s.check_sorted();
}

TEST_CASE("parse_csv empty file with header") {
    const char* path = "/tmp/bita_empty.csv";
    {
        std::ofstream f(path);
        f << "detect_time,flow_count,source_ip,target_ip,port,protocol,category\n";
    }
    EventStream s = parse_csv(path);
    CHECK(s.events.empty());
    CHECK(s.node_count == 0);
}

TEST_CASE("parse_csv reports the failing line") {
    const char* path = "/tmp/bita_bad.csv";
    {
        std::ofstream f(path);
        f << "detect_time,flow_count,source_ip,target_ip,port,protocol,category\n";
        f << "2019-03-11T00:05:00+02:00,1,a,b,22,TCP,x\n";
        f << "not-a-time,1,a,b,22,TCP,x\n";
    }
    try {
        parse_csv(path);
        FAIL("expected IoError");
    } catch (const bita::IoError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("parse_csv keeps identical timestamps in file order") {
    const char* path = "/tmp/bita_ties.csv";
    {
        std::ofstream f(path);
        f << "detect_time,flow_count,source_ip,target_ip,port,protocol,category\n";
        f << "2019-03-11T00:00:00Z,1,a1,v1,1,TCP,x\n";
        f << "2019-03-11T00:00:00Z,2,a2,v2,2,TCP,x\n";
        f << "2019-03-11T00:00:00Z,3,a3,v3,3,TCP,x\n";
    }
    EventStream s = parse_csv(path);
    REQUIRE(s.events.size() == 3);
    CHECK(s.events[0].flow_count == 1);
    CHECK(s.events[1].flow_count == 2);
    CHECK(s.events[2].flow_count == 3);
}

TEST_CASE("csv round-trip preserves the parsed stream") {
    EventStream s1 = parse_csv(kFixture);
    const char* out = "/tmp/bita_roundtrip.csv";
    write_csv(out, s1);
    EventStream s2 = parse_csv(out);
    REQUIRE(s2.events.size() == s1.events.size());
    for (std::size_t i = 0; i < s1.events.size(); ++i)
        CHECK(events_equal(s1.events[i], s2.events[i]));
    CHECK(s1.category_names == s2.category_names);
    CHECK(s1.node_names == s2.node_names);
    CHECK(s1.epoch_seconds == s2.epoch_seconds);
}

TEST_CASE("stream file round-trip") {
    Rng rng(5);
    EventStream s1 = synth_stream({}, rng);
    const char* path = "/tmp/bita_stream.bin";
    save_stream(path, s1);
    EventStream s2 = load_stream(path);
    REQUIRE(s2.events.size() == s1.events.size());
    for (std::size_t i = 0; i < s1.events.size(); ++i)
        CHECK(events_equal(s1.events[i], s2.events[i]));
    CHECK(s2.attacker_count == s1.attacker_count);
    CHECK(s2.category_names == s1.category_names);
}

TEST_CASE("balance_classes aligns to the median class size") {
    EventStream s;
    s.attacker_count = 1;
    s.node_count = 2;
    s.node_names = {"a", "v"};
    s.category_names = {"A", "B", "C"};
    // sizes {A:10, B:4, C:2} -> median 4
    double t = 0.0;
    auto add = [&](std::uint32_t cat, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            TemporalEvent e;
            e.src = 0;
            e.dst = 1;
            e.t = (t += 1.0);
            e.category = cat;
            e.features = {0};
            s.events.push_back(e);
        }
    };
    add(0, 10);
    add(1, 4);
    add(2, 2);

    Rng rng(7);
    EventStream b = balance_classes(s, rng);
    CHECK(b.events.size() == 12);
    std::vector<std::size_t> counts(3, 0);
    for (const auto& e : b.events) counts[e.category]++;
    CHECK(counts[0] == 4);
    CHECK(counts[1] == 4);
    CHECK(counts[2] == 4);
    b.check_sorted();

    // no new categories, timestamps all from the input
    std::set<double> input_times;
    for (const auto& e : s.events) input_times.insert(e.t);
    for (const auto& e : b.events) CHECK(input_times.count(e.t) == 1);
}

TEST_CASE("balance_classes identity cases") {
    EventStream s = uniform_stream(9, 3);  // 3 per class == median
    Rng rng(1);
    EventStream b = balance_classes(s, rng);
    REQUIRE(b.events.size() == s.events.size());
    for (std::size_t i = 0; i < s.events.size(); ++i)
        CHECK(events_equal(b.events[i], s.events[i]));

    EventStream single = uniform_stream(5, 1);
    EventStream b2 = balance_classes(single, rng);
    CHECK(b2.events.size() == 5);
}

TEST_CASE("temporal_split nearest-rank percentiles") {
    EventStream s = uniform_stream(100);
    SplitResult r = temporal_split(s);
    CHECK(r.spec.t_validation == 70.0);
    CHECK(r.spec.t_test == 85.0);
    CHECK(r.train.events.size() == 70);
    CHECK(r.validation.events.size() == 15);
    CHECK(r.test.events.size() == 15);
    r.train.check_sorted();
    r.validation.check_sorted();
    r.test.check_sorted();

    // disjoint partitions whose union is the input (multiset by time here)
    CHECK(r.train.events.size() + r.validation.events.size() + r.test.events.size() ==
          s.events.size());
    std::multiset<double> all;
    for (const auto* part : {&r.train, &r.validation, &r.test})
        for (const auto& e : part->events) all.insert(e.t);
    std::multiset<double> in;
    for (const auto& e : s.events) in.insert(e.t);
    CHECK(all == in);
}

TEST_CASE("temporal_split degenerate equal timestamps") {
    EventStream s = uniform_stream(10);
    for (auto& e : s.events) e.t = 5.0;
    SplitResult r = temporal_split(s);
    CHECK(r.train.events.size() == 10);
    CHECK(r.validation.events.empty());
    CHECK(r.test.events.empty());
}

TEST_CASE("inductive_mask samples only post-validation first-appearers") {
    // 50 nodes total; 10 appear only after t_validation.
    EventStream s;
    s.attacker_count = 25;
    s.node_count = 50;
    for (int i = 0; i < 50; ++i) s.node_names.push_back("n" + std::to_string(i));
    s.category_names = {"c"};
    auto add = [&s](NodeId a, NodeId v, double t) {
        TemporalEvent e;
        e.src = a;
        e.dst = v;
        e.t = t;
        e.category = 0;
        e.features = {0};
        s.events.push_back(e);
    };
    // 70 early events over 20 attackers x 20 victims
    for (int i = 0; i < 70; ++i) add(i % 20, 25 + (i % 20), 1.0 + i * 0.1);
    // 30 late events introducing attackers 20..24 and victims 45..49
    for (int i = 0; i < 30; ++i)
        add(20 + (i % 5), 45 + (i % 5), 100.0 + i);

    SplitResult r = temporal_split(s);
    Rng rng(3);
    inductive_mask(r, rng, 0.10);
    CHECK(r.spec.new_nodes.size() == 5);  // 10% of 50
    for (NodeId n : r.spec.new_nodes) {
        const bool late = (n >= 20 && n < 25) || (n >= 45);
        CHECK(late);
    }

    for (const auto& e : r.train.events) {
        CHECK_FALSE(r.spec.is_new_node(e.src));
        CHECK_FALSE(r.spec.is_new_node(e.dst));
    }
    // labels line up with membership
    for (std::size_t i = 0; i < r.test.events.size(); ++i) {
        const auto& e = r.test.events[i];
        const bool touches =
            r.spec.is_new_node(e.src) || r.spec.is_new_node(e.dst);
        CHECK(r.test_inductive[i] == touches);
    }
}

TEST_CASE("inductive_mask with no late nodes is empty") {
    EventStream s = uniform_stream(100);
    SplitResult r = temporal_split(s);
    Rng rng(3);
    inductive_mask(r, rng, 0.10);
    CHECK(r.spec.new_nodes.empty());
    for (bool f : r.validation_inductive) CHECK_FALSE(f);
}

TEST_CASE("sample_negative excludes the positive and is uniform") {
    EventStream s;
    s.attacker_count = 1;
    s.node_count = 3;
    s.node_names = {"a", "v1", "v2"};
    TemporalEvent pos;
    pos.src = 0;
    pos.dst = 1;  // v1
    Rng rng(42);
    for (int i = 0; i < 100; ++i) CHECK(sample_negative(pos, s, rng) == 2);

    // 100 victims, 1e5 draws: each bin within 3 sigma of uniform
    EventStream big;
    big.attacker_count = 1;
    big.node_count = 101;
    TemporalEvent p2;
    p2.src = 0;
    p2.dst = 1;
    std::unordered_map<NodeId, std::size_t> counts;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) counts[sample_negative(p2, big, rng)]++;
    CHECK(counts.count(1) == 0);
    CHECK(counts.size() == 99);
    // chi-square goodness of fit against the uniform multinomial, within
    // 3 sigma of its expectation (dof 98, sd sqrt(2*98))
    const double expected = draws / 99.0;
    double chi2 = 0.0;
    for (const auto& [node, c] : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    const double dof = 98.0;
    CHECK(chi2 < dof + 3.0 * std::sqrt(2.0 * dof));

    EventStream tiny;
    tiny.attacker_count = 1;
    tiny.node_count = 2;
    CHECK_THROWS_AS(sample_negative(pos, tiny, rng), bita::ContractError);
}

TEST_CASE("synth_stream interval structure") {
    SynthSpec spec;
    spec.n_attackers = 5;
    spec.n_victims = 5;
    spec.pairs_per_attacker = 1;
    spec.horizon = 3000.0;
    spec.period = 150.0;
    spec.jitter = 0.0;
    Rng rng(2);
    EventStream s = synth_stream(spec, rng);
    s.check_sorted();
    StreamStats st = stream_stats(s);
    CHECK(st.interarrival_global.size() == 1);  // single spike at the period

    spec.jitter = 30.0;
    Rng rng2(2);
    EventStream s2 = synth_stream(spec, rng2);
    StreamStats st2 = stream_stats(s2);
    auto mode = st2.mode_bin();
    REQUIRE(mode.has_value());
    const double lo = static_cast<double>(*mode) * st2.bin_width;
    CHECK(lo >= 120.0);
    CHECK(lo < 180.0);
}

TEST_CASE("synth_stream per-pair categories are constant") {
    SynthSpec spec;
    spec.n_attackers = 4;
    spec.n_victims = 8;
    spec.pairs_per_attacker = 2;
    spec.categories = 2;
    spec.noise_rate = 0.1;
    Rng rng(9);
    EventStream s = synth_stream(spec, rng);
    std::map<std::pair<NodeId, NodeId>, std::uint32_t> seen;
    for (const auto& e : s.events) {
        auto key = std::make_pair(e.src, e.dst);
        auto it = seen.find(key);
        if (it == seen.end())
            seen[key] = e.category;
        else
            CHECK(it->second == e.category);
    }
}

TEST_CASE("stream_stats basics") {
    EventStream s;
    s.attacker_count = 1;
    s.node_count = 2;
    s.node_names = {"a", "v"};
    s.category_names = {"c"};
    for (double t : {0.0, 60.0}) {
        TemporalEvent e;
        e.src = 0;
        e.dst = 1;
        e.t = t;
        e.category = 0;
        e.features = {0};
        s.events.push_back(e);
    }
    StreamStats st = stream_stats(s);
    REQUIRE(st.interarrival_global.size() == 1);
    CHECK(st.interarrival_global.begin()->first == 6);  // bin [60, 70)
    CHECK(st.interarrival_global.begin()->second == 1);

    Rng rng(4);
    EventStream synth = synth_stream({}, rng);
    StreamStats st2 = stream_stats(synth);
    std::size_t prev = 0;
    double prev_t = -1.0;
    for (const auto& [t, count] : st2.cumulative) {
        CHECK(count >= prev);
        CHECK(t >= prev_t);
        prev = count;
        prev_t = t;
    }
    CHECK(st2.cumulative.back().second == synth.events.size());
}
