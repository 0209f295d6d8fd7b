#include "bita/config.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "bita/errors.hpp"

namespace bita::cli {

engine::EngineConfig Config::to_engine_config() const {
    engine::EngineConfig e;
    e.kind = agg::kind_from_string(aggregator);
    e.d_mem = memory_dim;
    e.d_msg = message_dim;
    e.d_time = time_dim;
    e.d_node = node_dim;
    e.bigru_hidden = bigru_hidden;
    e.heads = heads;
    e.dropout = dropout;
    e.batch_size = batch_size;
    e.lr = lr;
    e.epochs = epochs;
    e.patience = patience;
    e.lambda = lambda;
    e.gamma = gamma;
    e.seed = seed;
    e.window = window;
    if (scope == "batch")
        e.scope = agg::ContextScope::Batch;
    else if (scope == "node")
        e.scope = agg::ContextScope::Node;
    else
        throw ConfigError("unknown scope '" + scope + "' (batch|node)");
    e.time_absolute = time_absolute;
    e.negatives_per_positive = negatives;
    return e;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> Config::entries() const {
    return {
        {"aggregator", aggregator},
        {"node_dim", std::to_string(node_dim)},
        {"time_dim", std::to_string(time_dim)},
        {"message_dim", std::to_string(message_dim)},
        {"memory_dim", std::to_string(memory_dim)},
        {"heads", std::to_string(heads)},
        {"bigru_hidden", std::to_string(bigru_hidden)},
        {"scope", scope},
        {"time_absolute", time_absolute ? "true" : "false"},
        {"dropout", fmt_double(dropout)},
        {"batch_size", std::to_string(batch_size)},
        {"lr", fmt_double(lr)},
        {"epochs", std::to_string(epochs)},
        {"patience", std::to_string(patience)},
        {"lambda", fmt_double(lambda)},
        {"gamma", fmt_double(gamma)},
        {"seed", std::to_string(seed)},
        {"window", std::to_string(window)},
        {"negatives", std::to_string(negatives)},
        {"candidates", std::to_string(candidates)},
        {"balance", balance ? "true" : "false"},
        {"inductive_fraction", fmt_double(inductive_fraction)},
        {"schema.detect_time", schema.detect_time},
        {"schema.flow_count", schema.flow_count},
        {"schema.source_ip", schema.source_ip},
        {"schema.target_ip", schema.target_ip},
        {"schema.port", schema.port},
        {"schema.protocol", schema.protocol},
        {"schema.category", schema.category},
    };
}

void apply_override(Config& c, const std::string& key, const std::string& value) {
    auto as_size = [&](const char* what) -> std::size_t {
        try {
            return std::stoull(value);
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad integer for ") + what + ": " + value);
        }
    };
    auto as_double = [&](const char* what) -> double {
        try {
            return std::stod(value);
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad number for ") + what + ": " + value);
        }
    };
    auto as_bool = [&]() -> bool {
        if (value == "true" || value == "1" || value == "on") return true;
        if (value == "false" || value == "0" || value == "off") return false;
        throw ConfigError("bad boolean: " + value);
    };

    if (key == "aggregator") {
        agg::kind_from_string(value);  // validate now, fail at startup
        c.aggregator = value;
    } else if (key == "node_dim") {
        c.node_dim = as_size("node_dim");
    } else if (key == "time_dim") {
        c.time_dim = as_size("time_dim");
    } else if (key == "message_dim") {
        c.message_dim = as_size("message_dim");
    } else if (key == "memory_dim") {
        c.memory_dim = as_size("memory_dim");
    } else if (key == "heads") {
        c.heads = as_size("heads");
    } else if (key == "bigru_hidden") {
        c.bigru_hidden = as_size("bigru_hidden");
    } else if (key == "scope") {
        c.scope = value;
    } else if (key == "time_absolute") {
        c.time_absolute = as_bool();
    } else if (key == "dropout") {
        c.dropout = as_double("dropout");
    } else if (key == "batch_size") {
        c.batch_size = as_size("batch_size");
    } else if (key == "lr") {
        c.lr = as_double("lr");
    } else if (key == "epochs") {
        c.epochs = as_size("epochs");
    } else if (key == "patience") {
        c.patience = as_size("patience");
    } else if (key == "lambda") {
        c.lambda = as_double("lambda");
    } else if (key == "gamma") {
        c.gamma = as_double("gamma");
    } else if (key == "seed") {
        c.seed = as_size("seed");
    } else if (key == "window") {
        c.window = as_size("window");
    } else if (key == "negatives") {
        c.negatives = as_size("negatives");
    } else if (key == "candidates") {
        c.candidates = as_size("candidates");
    } else if (key == "balance") {
        c.balance = as_bool();
    } else if (key == "inductive_fraction") {
        c.inductive_fraction = as_double("inductive_fraction");
    } else if (key == "schema.detect_time") {
        c.schema.detect_time = value;
    } else if (key == "schema.flow_count") {
        c.schema.flow_count = value;
    } else if (key == "schema.source_ip") {
        c.schema.source_ip = value;
    } else if (key == "schema.target_ip") {
        c.schema.target_ip = value;
    } else if (key == "schema.port") {
        c.schema.port = value;
    } else if (key == "schema.protocol") {
        c.schema.protocol = value;
    } else if (key == "schema.category") {
        c.schema.category = value;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

Config load_config_file(const std::string& path, Config base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r' ||
                                 line.back() == '\t'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        const auto eq = line.find('=', start);
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key=value");
        std::string key = line.substr(start, eq - start);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        std::string value = line.substr(eq + 1);
        const auto vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? "" : value.substr(vstart);
        apply_override(base, key, value);
    }
    return base;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for digest: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char out[20];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

void write_manifest(const std::string& path, const Config& config,
                    const ManifestInputs& manifest) {
    std::vector<report::Record> records;
    records.push_back(report::header("run_manifest"));

    report::Record run("run");
    run.field("command", manifest.command)
        .field("code_version", report::kToolVersion)
        .field("seed", config.seed);
    const auto now = std::chrono::system_clock::now();
    run.field("created_unix",
              static_cast<std::uint64_t>(
                  std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
                      .count()));
    records.push_back(run);

    for (const auto& [name, p] : manifest.inputs) {
        report::Record r("input");
        r.field("name", name).field("path", p);
        r.field("digest", file_digest(p));
        records.push_back(r);
    }
    for (const auto& [name, p] : manifest.outputs) {
        report::Record r("output");
        r.field("name", name).field("path", p);
        records.push_back(r);
    }
    for (const auto& [key, value] : config.entries()) {
        report::Record r("config");
        r.field("key", key).field("value", value);
        records.push_back(r);
    }
    report::write_records(path, records);
}

}  // namespace bita::cli
