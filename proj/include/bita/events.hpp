#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bita/array.hpp"
#include "bita/rng.hpp"

namespace bita::events {

using NodeId = std::uint32_t;

enum class Protocol : std::uint8_t { Tcp = 0, Udp = 1, Other = 2 };

Protocol protocol_from_string(const std::string& s);
std::string protocol_to_string(Protocol p);

/// One row of the alert CSV, as parsed.
struct AlertRecord {
    std::string detect_time;  // RFC3339 with offset
    std::uint64_t flow_count = 0;
    std::string source_ip;
    std::string target_ip;
    int port = 0;
    Protocol protocol = Protocol::Other;
    std::string category;
};

/// One timestamped attacker -> victim interaction.
/// Raw fields (flow/port/protocol) are retained so streams round-trip to CSV.
struct TemporalEvent {
    NodeId src = 0;
    NodeId dst = 0;
    double t = 0.0;  // seconds since stream epoch
    std::vector<double> features;
    std::uint32_t category = 0;
    std::uint64_t flow_count = 0;
    std::uint16_t port = 0;
    Protocol protocol = Protocol::Other;
};

/// Chronologically sorted event sequence over a bipartite node universe:
/// attacker ids are [0, attacker_count), victim ids [attacker_count, node_count),
/// which makes the attacker/victim partitions disjoint by construction.
struct EventStream {
    std::vector<TemporalEvent> events;
    std::vector<std::string> node_names;  // id -> label
    std::vector<std::string> category_names;
    NodeId attacker_count = 0;
    NodeId node_count = 0;
    std::int64_t epoch_seconds = 0;  // absolute UTC seconds of t = 0
    double flow_log_norm = 1.0;      // divisor for the log1p(flow) feature

    std::size_t feature_width() const;
    bool is_attacker(NodeId id) const { return id < attacker_count; }
    bool is_victim(NodeId id) const { return id >= attacker_count && id < node_count; }
    NodeId victim_count() const { return node_count - attacker_count; }
    void check_sorted() const;  // throws ContractError when out of order
};

struct SplitSpec {
    double t_validation = 0.0;
    double t_test = 0.0;
    std::vector<NodeId> new_nodes;  // sorted
    bool is_new_node(NodeId id) const;
};

struct SplitResult {
    SplitSpec spec;
    EventStream train;
    EventStream validation;
    EventStream test;
    // Filled by inductive_mask: flags parallel to validation/test events.
    std::vector<bool> validation_inductive;
    std::vector<bool> test_inductive;
};

/// Maps CSV header names onto record fields; defaults match the shipped schema.
struct SchemaConfig {
    std::string detect_time = "detect_time";
    std::string flow_count = "flow_count";
    std::string source_ip = "source_ip";
    std::string target_ip = "target_ip";
    std::string port = "port";
    std::string protocol = "protocol";
    std::string category = "category";
};

EventStream parse_csv(const std::string& path, const SchemaConfig& schema = {});
void write_csv(const std::string& path, const EventStream& stream);

/// Aligns every category to the median class size: majority classes are
/// uniformly undersampled without replacement, minority classes keep their
/// events and gain uniform with-replacement duplicates; the result is
/// re-sorted chronologically (stable).
EventStream balance_classes(const EventStream& stream, num::Rng& rng);

/// Nearest-rank 70th/85th percentile split into train / validation / test.
SplitResult temporal_split(const EventStream& stream);

/// Samples the new-node set from nodes first appearing after t_validation,
/// up to fraction * total unique nodes, drops training interactions touching
/// them, and labels validation/test events as inductive.
void inductive_mask(SplitResult& split, num::Rng& rng, double fraction = 0.10);

/// Uniform draw from the victim partition excluding the positive destination.
NodeId sample_negative(const TemporalEvent& positive, const EventStream& stream,
                       num::Rng& rng);

/// The same draw from explicit partition bounds (victims are
/// [attacker_count, node_count)).
NodeId draw_negative(NodeId positive_dst, NodeId attacker_count, NodeId node_count,
                     num::Rng& rng);

/// Synthetic recursive-attack stream: sparse attacker-victim pairs firing at
/// near-regular intervals with pair-specific categories, plus optional one-off
/// noise interactions.
struct SynthSpec {
    std::uint32_t n_attackers = 30;
    std::uint32_t n_victims = 30;
    double horizon = 12000.0;
    double period = 150.0;
    double jitter = 30.0;
    std::uint32_t categories = 4;
    std::uint32_t pairs_per_attacker = 2;
    double noise_rate = 0.0;
};

EventStream synth_stream(const SynthSpec& spec, num::Rng& rng);

/// Inter-arrival here means the gap between consecutive events of the same
/// source; the global histogram pools the gaps of every source. Histogram
/// bins are centered on multiples of bin_width.
struct StreamStats {
    double bin_width = 10.0;
    std::size_t event_count = 0;
    std::map<std::int64_t, std::size_t> interarrival_global;          // bin -> count
    std::map<NodeId, std::map<std::int64_t, std::size_t>> interarrival_by_source;
    std::vector<std::pair<double, std::size_t>> cumulative;           // (t, count)
    std::vector<std::pair<std::string, std::size_t>> category_counts;
    std::optional<std::int64_t> mode_bin() const;
};

StreamStats stream_stats(const EventStream& stream, double bin_width = 10.0);

void save_stream(const std::string& path, const EventStream& stream);
EventStream load_stream(const std::string& path);

}  // namespace bita::events
