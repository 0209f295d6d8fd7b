#pragma once

#include <string>
#include <vector>

#include "bita/engine.hpp"
#include "bita/report.hpp"

namespace bita::cli {

/// Operator-facing configuration; defaults mirror the reference
/// hyperparameters exactly (asserted by a golden test).
struct Config {
    // data / schema
    events::SchemaConfig schema;
    bool balance = true;
    double inductive_fraction = 0.10;

    // model
    std::string aggregator = "bita";
    std::size_t node_dim = 100;
    std::size_t time_dim = 100;
    std::size_t message_dim = 100;
    std::size_t memory_dim = 9;
    std::size_t heads = 2;
    std::size_t bigru_hidden = 32;
    std::string scope = "batch";  // bita attention scope: batch|node
    bool time_absolute = false;

    // training
    double dropout = 0.1;
    std::size_t batch_size = 128;
    double lr = 1e-4;
    std::size_t epochs = 50;
    std::size_t patience = 5;
    double lambda = 1.0;
    double gamma = 2.0;
    std::uint64_t seed = 0;
    std::size_t window = 32;
    std::size_t negatives = 1;

    // evaluation
    std::size_t candidates = 50;

    engine::EngineConfig to_engine_config() const;
    std::vector<std::pair<std::string, std::string>> entries() const;
};

/// key=value file; '#' starts a comment; unknown keys are config errors.
Config load_config_file(const std::string& path, Config base = {});
void apply_override(Config& config, const std::string& key, const std::string& value);

/// FNV-1a over the file bytes, as a hex string.
std::string file_digest(const std::string& path);

struct ManifestInputs {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;   // name -> path
    std::vector<std::pair<std::string, std::string>> outputs;  // name -> path
};

/// Written before any computation: resolved config, code version, seed,
/// input digests, timestamps, and output paths.
void write_manifest(const std::string& path, const Config& config,
                    const ManifestInputs& manifest);

}  // namespace bita::cli
