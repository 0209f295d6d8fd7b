#include "bita/events.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bita/binio.hpp"
#include "bita/errors.hpp"

namespace bita::events {

namespace {

constexpr std::uint32_t kStreamMagic = 0x42535452;  // "BSTR"
constexpr std::uint32_t kStreamVersion = 1;

// days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

// RFC3339 with mandatory offset ('Z' or +-HH:MM); fractional seconds accepted
// and truncated. Returns UTC seconds.
std::int64_t parse_rfc3339(const std::string& s) {
    int y, mo, d, h, mi, se;
    int n = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &se, &n) != 6)
        throw IoError("unparsable timestamp: " + s);
    std::size_t pos = static_cast<std::size_t>(n);
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    std::int64_t offset = 0;
    if (pos >= s.size()) throw IoError("timestamp missing offset: " + s);
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        const int sign = s[pos] == '+' ? 1 : -1;
        int oh, om;
        int n2 = 0;
        if (std::sscanf(s.c_str() + pos + 1, "%2d:%2d%n", &oh, &om, &n2) != 2)
            throw IoError("bad timestamp offset: " + s);
        offset = sign * (oh * 3600 + om * 60);
        pos += 1 + static_cast<std::size_t>(n2);
    } else {
        throw IoError("bad timestamp offset: " + s);
    }
    if (pos != s.size()) throw IoError("trailing characters in timestamp: " + s);
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60)
        throw IoError("timestamp out of range: " + s);
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se - offset;
}

std::string format_rfc3339_utc(std::int64_t secs) {
    std::int64_t days = secs / 86400;
    std::int64_t rem = secs % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    // civil_from_days
    std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(y + (m <= 2)), m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

// RFC4180-lite row split: quoted fields, "" escapes, no embedded newlines.
std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += "\"\"";
        q += c;
    }
    q += "\"";
    return q;
}

int port_bucket(int port) {
    if (port < 1024) return 0;   // well-known
    if (port < 49152) return 1;  // registered
    return 2;                    // dynamic
}

std::vector<double> encode_features(Protocol protocol, int port, std::uint64_t flow,
                                    double flow_log_norm) {
    std::vector<double> f(7, 0.0);
    f[static_cast<std::size_t>(protocol)] = 1.0;
    f[3 + static_cast<std::size_t>(port_bucket(port))] = 1.0;
    f[6] = std::log1p(static_cast<double>(flow)) / flow_log_norm;
    return f;
}

std::size_t nearest_rank_index(double percentile, std::size_t n) {
    // 1-indexed rank = ceil(p * n), as an integer computation.
    const std::size_t pct = static_cast<std::size_t>(percentile * 100.0 + 0.5);
    const std::size_t rank = (pct * n + 99) / 100;
    return (rank == 0 ? 1 : rank) - 1;
}

}  // namespace

Protocol protocol_from_string(const std::string& s) {
    std::string up;
    for (char c : s) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "TCP") return Protocol::Tcp;
    if (up == "UDP") return Protocol::Udp;
    return Protocol::Other;
}

std::string protocol_to_string(Protocol p) {
    switch (p) {
        case Protocol::Tcp: return "TCP";
        case Protocol::Udp: return "UDP";
        default: return "other";
    }
}

std::size_t EventStream::feature_width() const {
    return events.empty() ? 7 : events.front().features.size();
}

void EventStream::check_sorted() const {
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].t < events[i - 1].t)
            throw ContractError("event stream out of chronological order at index " +
                                std::to_string(i));
}

bool SplitSpec::is_new_node(NodeId id) const {
    return std::binary_search(new_nodes.begin(), new_nodes.end(), id);
}

EventStream parse_csv(const std::string& path, const SchemaConfig& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("CSV missing header row: " + path);
    const auto header = split_csv_row(line);
    auto col = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw IoError("CSV header missing column '" + name + "' in " + path);
    };
    const std::size_t c_time = col(schema.detect_time), c_flow = col(schema.flow_count),
                      c_src = col(schema.source_ip), c_dst = col(schema.target_ip),
                      c_port = col(schema.port), c_proto = col(schema.protocol),
                      c_cat = col(schema.category);

    struct Row {
        std::int64_t abs_secs;
        std::size_t src, dst, cat;
        std::uint64_t flow;
        int port;
        Protocol protocol;
    };
    std::vector<Row> rows;
    std::vector<std::string> attacker_names, victim_names, category_names;
    std::unordered_map<std::string, std::size_t> attacker_idx, victim_idx, category_idx;
    auto intern = [](const std::string& name, std::vector<std::string>& names,
                     std::unordered_map<std::string, std::size_t>& idx) {
        auto it = idx.find(name);
        if (it != idx.end()) return it->second;
        idx[name] = names.size();
        names.push_back(name);
        return names.size() - 1;
    };

    std::size_t line_no = 1;
    std::uint64_t max_flow = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_row(line);
        if (fields.size() != header.size())
            throw IoError("line " + std::to_string(line_no) + ": expected " +
                          std::to_string(header.size()) + " fields, got " +
                          std::to_string(fields.size()));
        Row r;
        try {
            r.abs_secs = parse_rfc3339(fields[c_time]);
        } catch (const IoError& e) {
            throw IoError("line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            r.flow = std::stoull(fields[c_flow]);
            r.port = std::stoi(fields[c_port]);
        } catch (const std::exception&) {
            throw IoError("line " + std::to_string(line_no) + ": bad numeric field");
        }
        if (r.port < 0 || r.port > 65535)
            throw IoError("line " + std::to_string(line_no) + ": port out of range");
        r.protocol = protocol_from_string(fields[c_proto]);
        r.src = intern(fields[c_src], attacker_names, attacker_idx);
        r.dst = intern(fields[c_dst], victim_names, victim_idx);
        r.cat = intern(fields[c_cat], category_names, category_idx);
        max_flow = std::max(max_flow, r.flow);
        rows.push_back(std::move(r));
    }

    EventStream s;
    s.attacker_count = static_cast<NodeId>(attacker_names.size());
    s.node_count = static_cast<NodeId>(attacker_names.size() + victim_names.size());
    s.node_names = attacker_names;
    s.node_names.insert(s.node_names.end(), victim_names.begin(), victim_names.end());
    s.category_names = category_names;
    const double norm = std::log1p(static_cast<double>(max_flow));
    s.flow_log_norm = norm > 0.0 ? norm : 1.0;
    std::int64_t epoch = rows.empty() ? 0 : rows.front().abs_secs;
    for (const Row& r : rows) epoch = std::min(epoch, r.abs_secs);
    s.epoch_seconds = epoch;

    s.events.reserve(rows.size());
    for (const Row& r : rows) {
        TemporalEvent e;
        e.src = static_cast<NodeId>(r.src);
        e.dst = static_cast<NodeId>(attacker_names.size() + r.dst);
        e.t = static_cast<double>(r.abs_secs - epoch);
        e.category = static_cast<std::uint32_t>(r.cat);
        e.flow_count = r.flow;
        e.port = static_cast<std::uint16_t>(r.port);
        e.protocol = r.protocol;
        e.features = encode_features(r.protocol, r.port, r.flow, s.flow_log_norm);
        s.events.push_back(std::move(e));
    }
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const TemporalEvent& a, const TemporalEvent& b) { return a.t < b.t; });
    return s;
}

void write_csv(const std::string& path, const EventStream& stream) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "detect_time,flow_count,source_ip,target_ip,port,protocol,category\n";
    for (const auto& e : stream.events) {
        const std::int64_t abs_secs =
            stream.epoch_seconds + static_cast<std::int64_t>(std::llround(e.t));
        out << format_rfc3339_utc(abs_secs) << ',' << e.flow_count << ','
            << csv_quote(stream.node_names[e.src]) << ',' << csv_quote(stream.node_names[e.dst])
            << ',' << e.port << ',' << protocol_to_string(e.protocol) << ','
            << csv_quote(stream.category_names[e.category]) << '\n';
    }
}

EventStream balance_classes(const EventStream& stream, num::Rng& rng) {
    if (stream.category_names.empty() || stream.events.empty()) return stream;
    const std::size_t k = stream.category_names.size();
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < stream.events.size(); ++i)
        by_class[stream.events[i].category].push_back(i);

    std::vector<std::size_t> sizes;
    for (const auto& c : by_class)
        if (!c.empty()) sizes.push_back(c.size());
    std::sort(sizes.begin(), sizes.end());
    const std::size_t median = sizes[(sizes.size() + 1) / 2 - 1];  // nearest rank

    // keep[i]: original event i retained; extras appended afterwards per class.
    std::vector<bool> keep(stream.events.size(), true);
    std::vector<std::size_t> extras;
    for (const auto& members : by_class) {
        if (members.empty()) continue;
        if (members.size() > median) {
            // undersample without replacement: partial Fisher-Yates choose `median`
            std::vector<std::size_t> pool = members;
            for (std::size_t i = 0; i < median; ++i) {
                const std::size_t j = i + rng.uniform_int(pool.size() - i);
                std::swap(pool[i], pool[j]);
            }
            for (std::size_t i = 0; i < members.size(); ++i) keep[members[i]] = false;
            for (std::size_t i = 0; i < median; ++i) keep[pool[i]] = true;
        } else if (members.size() < median) {
            // oversample with replacement: keep originals, add duplicates
            const std::size_t need = median - members.size();
            for (std::size_t i = 0; i < need; ++i)
                extras.push_back(members[rng.uniform_int(members.size())]);
        }
    }

    EventStream out = stream;
    out.events.clear();
    for (std::size_t i = 0; i < stream.events.size(); ++i)
        if (keep[i]) out.events.push_back(stream.events[i]);
    for (std::size_t i : extras) out.events.push_back(stream.events[i]);
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const TemporalEvent& a, const TemporalEvent& b) { return a.t < b.t; });
    return out;
}

SplitResult temporal_split(const EventStream& stream) {
    if (stream.events.empty()) throw ContractError("temporal_split: empty stream");
    std::vector<double> ts;
    ts.reserve(stream.events.size());
    for (const auto& e : stream.events) ts.push_back(e.t);
    std::sort(ts.begin(), ts.end());
    SplitResult r;
    r.spec.t_validation = ts[nearest_rank_index(0.70, ts.size())];
    r.spec.t_test = ts[nearest_rank_index(0.85, ts.size())];
    auto empty_like = [&stream] {
        EventStream s = stream;
        s.events.clear();
        return s;
    };
    r.train = empty_like();
    r.validation = empty_like();
    r.test = empty_like();
    for (const auto& e : stream.events) {
        if (e.t <= r.spec.t_validation)
            r.train.events.push_back(e);
        else if (e.t <= r.spec.t_test)
            r.validation.events.push_back(e);
        else
            r.test.events.push_back(e);
    }
    return r;
}

void inductive_mask(SplitResult& split, num::Rng& rng, double fraction) {
    // First appearance per node across the whole chronology.
    std::unordered_map<NodeId, double> first_seen;
    auto scan = [&first_seen](const EventStream& s) {
        for (const auto& e : s.events) {
            for (NodeId n : {e.src, e.dst})
                if (!first_seen.count(n)) first_seen[n] = e.t;
        }
    };
    scan(split.train);
    scan(split.validation);
    scan(split.test);

    std::vector<NodeId> pool;
    for (const auto& [node, t] : first_seen)
        if (t > split.spec.t_validation) pool.push_back(node);
    std::sort(pool.begin(), pool.end());

    const std::size_t total_nodes = first_seen.size();
    const std::size_t target =
        std::min(pool.size(), static_cast<std::size_t>(fraction * static_cast<double>(total_nodes)));
    for (std::size_t i = 0; i < target; ++i) {
        const std::size_t j = i + rng.uniform_int(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(target);
    std::sort(pool.begin(), pool.end());
    split.spec.new_nodes = std::move(pool);

    // Drop training interactions touching a new node (vacuous when the pool is
    // restricted to post-validation first-appearers, but enforced regardless).
    std::vector<TemporalEvent> kept;
    kept.reserve(split.train.events.size());
    for (const auto& e : split.train.events)
        if (!split.spec.is_new_node(e.src) && !split.spec.is_new_node(e.dst))
            kept.push_back(e);
    split.train.events = std::move(kept);

    auto label = [&split](const EventStream& s) {
        std::vector<bool> flags;
        flags.reserve(s.events.size());
        for (const auto& e : s.events)
            flags.push_back(split.spec.is_new_node(e.src) || split.spec.is_new_node(e.dst));
        return flags;
    };
    split.validation_inductive = label(split.validation);
    split.test_inductive = label(split.test);
}

NodeId draw_negative(NodeId positive_dst, NodeId attacker_count, NodeId node_count,
                     num::Rng& rng) {
    const NodeId victims = node_count - attacker_count;
    if (victims < 2) throw ContractError("sample_negative: victim set needs >= 2 members");
    const NodeId pos_off = positive_dst - attacker_count;
    NodeId draw = static_cast<NodeId>(rng.uniform_int(victims - 1));
    if (draw >= pos_off) ++draw;
    return attacker_count + draw;
}

NodeId sample_negative(const TemporalEvent& positive, const EventStream& stream,
                       num::Rng& rng) {
    return draw_negative(positive.dst, stream.attacker_count, stream.node_count, rng);
}

EventStream synth_stream(const SynthSpec& spec, num::Rng& rng) {
    if (spec.period <= 0.0) throw ContractError("synth_stream: period must be positive");
    EventStream s;
    s.attacker_count = spec.n_attackers;
    s.node_count = spec.n_attackers + spec.n_victims;
    s.epoch_seconds = 0;
    for (std::uint32_t i = 0; i < spec.n_attackers; ++i)
        s.node_names.push_back("atk" + std::to_string(i));
    for (std::uint32_t i = 0; i < spec.n_victims; ++i)
        s.node_names.push_back("vic" + std::to_string(i));
    for (std::uint32_t c = 0; c < spec.categories; ++c)
        s.category_names.push_back("cat" + std::to_string(c));
    s.flow_log_norm = std::log1p(1100.0);

    const std::uint16_t ports[4] = {22, 80, 443, 8080};
    std::map<std::pair<NodeId, NodeId>, std::uint32_t> pair_category;
    std::size_t pair_counter = 0;

    auto emit = [&](NodeId a, NodeId v, double t, std::uint32_t cat) {
        TemporalEvent e;
        e.src = a;
        e.dst = v;
        e.t = t;
        e.category = cat;
        e.port = ports[cat % 4];
        e.protocol = static_cast<Protocol>(cat % 3);
        e.flow_count = 100 + rng.uniform_int(1000);
        e.features = encode_features(e.protocol, e.port, e.flow_count, s.flow_log_norm);
        s.events.push_back(std::move(e));
    };

    for (std::uint32_t a = 0; a < spec.n_attackers; ++a) {
        // distinct victims for this attacker
        std::vector<NodeId> chosen;
        const std::uint32_t want = std::min(spec.pairs_per_attacker, spec.n_victims);
        while (chosen.size() < want) {
            const NodeId v = spec.n_attackers + static_cast<NodeId>(rng.uniform_int(spec.n_victims));
            if (std::find(chosen.begin(), chosen.end(), v) == chosen.end()) chosen.push_back(v);
        }
        for (NodeId v : chosen) {
            // round-robin categories guarantee every class appears
            const std::uint32_t cat = static_cast<std::uint32_t>(pair_counter++ % spec.categories);
            pair_category[{a, v}] = cat;
            double t = rng.uniform(0.0, spec.period);
            while (t < spec.horizon) {
                emit(a, v, t, cat);
                t += spec.period + (spec.jitter > 0.0 ? rng.uniform(-spec.jitter, spec.jitter) : 0.0);
            }
        }
    }

    if (spec.noise_rate > 0.0) {
        const std::size_t base = s.events.size();
        const auto extra = static_cast<std::size_t>(spec.noise_rate * static_cast<double>(base));
        for (std::size_t i = 0; i < extra; ++i) {
            const NodeId a = static_cast<NodeId>(rng.uniform_int(spec.n_attackers));
            const NodeId v =
                spec.n_attackers + static_cast<NodeId>(rng.uniform_int(spec.n_victims));
            auto it = pair_category.find({a, v});
            std::uint32_t cat;
            if (it != pair_category.end()) {
                cat = it->second;  // per-pair category stays constant
            } else {
                cat = static_cast<std::uint32_t>(rng.uniform_int(spec.categories));
                pair_category[{a, v}] = cat;
            }
            emit(a, v, rng.uniform(0.0, spec.horizon), cat);
        }
    }

    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const TemporalEvent& a, const TemporalEvent& b) { return a.t < b.t; });
    return s;
}

std::optional<std::int64_t> StreamStats::mode_bin() const {
    std::optional<std::int64_t> best;
    std::size_t best_count = 0;
    for (const auto& [bin, count] : interarrival_global)
        if (count > best_count) {
            best_count = count;
            best = bin;
        }
    return best;
}

StreamStats stream_stats(const EventStream& stream, double bin_width) {
    StreamStats st;
    st.bin_width = bin_width;
    st.event_count = stream.events.size();

    std::map<NodeId, double> last_by_source;
    for (const auto& e : stream.events) {
        auto it = last_by_source.find(e.src);
        if (it != last_by_source.end()) {
            const double gap = e.t - it->second;
            // bins centered on multiples of bin_width: bin k covers
            // [k*w - w/2, k*w + w/2)
            const auto bin = static_cast<std::int64_t>(std::floor(gap / bin_width + 0.5));
            st.interarrival_global[bin] += 1;
            st.interarrival_by_source[e.src][bin] += 1;
        }
        last_by_source[e.src] = e.t;
    }

    // cumulative counts at up to 200 checkpoints (always including the end)
    const std::size_t n = stream.events.size();
    if (n > 0) {
        const std::size_t step = std::max<std::size_t>(1, n / 200);
        for (std::size_t i = step - 1; i < n; i += step)
            st.cumulative.emplace_back(stream.events[i].t, i + 1);
        if (st.cumulative.empty() || st.cumulative.back().second != n)
            st.cumulative.emplace_back(stream.events.back().t, n);
    }

    std::vector<std::size_t> counts(stream.category_names.size(), 0);
    for (const auto& e : stream.events) counts[e.category] += 1;
    for (std::size_t c = 0; c < counts.size(); ++c)
        st.category_counts.emplace_back(stream.category_names[c], counts[c]);
    return st;
}

void save_stream(const std::string& path, const EventStream& s) {
    auto os = io::open_out(path);
    io::write_u32(os, kStreamMagic);
    io::write_u32(os, kStreamVersion);
    io::write_u64(os, static_cast<std::uint64_t>(s.epoch_seconds));
    io::write_f64(os, s.flow_log_norm);
    io::write_u32(os, s.attacker_count);
    io::write_u32(os, s.node_count);
    io::write_u64(os, s.node_names.size());
    for (const auto& n : s.node_names) io::write_string(os, n);
    io::write_u64(os, s.category_names.size());
    for (const auto& c : s.category_names) io::write_string(os, c);
    io::write_u32(os, static_cast<std::uint32_t>(s.feature_width()));
    io::write_u64(os, s.events.size());
    for (const auto& e : s.events) {
        io::write_u32(os, e.src);
        io::write_u32(os, e.dst);
        io::write_f64(os, e.t);
        io::write_u32(os, e.category);
        io::write_u64(os, e.flow_count);
        io::write_u32(os, e.port);
        io::write_u32(os, static_cast<std::uint32_t>(e.protocol));
        for (double f : e.features) io::write_f64(os, f);
    }
}

EventStream load_stream(const std::string& path) {
    auto is = io::open_in(path);
    io::expect_magic(is, kStreamMagic, kStreamVersion, "stream file");
    EventStream s;
    s.epoch_seconds = static_cast<std::int64_t>(io::read_u64(is));
    s.flow_log_norm = io::read_f64(is);
    s.attacker_count = io::read_u32(is);
    s.node_count = io::read_u32(is);
    const std::uint64_t names = io::read_u64(is);
    for (std::uint64_t i = 0; i < names; ++i) s.node_names.push_back(io::read_string(is));
    const std::uint64_t cats = io::read_u64(is);
    for (std::uint64_t i = 0; i < cats; ++i) s.category_names.push_back(io::read_string(is));
    const std::uint32_t width = io::read_u32(is);
    const std::uint64_t count = io::read_u64(is);
    s.events.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        TemporalEvent e;
        e.src = io::read_u32(is);
        e.dst = io::read_u32(is);
        e.t = io::read_f64(is);
        e.category = io::read_u32(is);
        e.flow_count = io::read_u64(is);
        e.port = static_cast<std::uint16_t>(io::read_u32(is));
        e.protocol = static_cast<Protocol>(io::read_u32(is));
        e.features.resize(width);
        for (auto& f : e.features) f = io::read_f64(is);
        s.events.push_back(std::move(e));
    }
    return s;
}

}  // namespace bita::events
