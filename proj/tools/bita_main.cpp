// bita: temporal-graph alert prediction engine.
// Subcommands: ingest, train, eval, audit, bench, compare, report.
// Exit codes: 0 success, 2 input/config error, 3 training failure,
// 4 audit fail, 5 nondeterminism.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "bita/config.hpp"
#include "bita/evaluation.hpp"
#include "bita/report.hpp"

namespace fs = std::filesystem;
using namespace bita;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitTraining = 3;
constexpr int kExitAuditFail = 4;
constexpr int kExitNondeterminism = 5;

struct CommonArgs {
    std::string out_dir;
    std::string config_file;
    std::vector<std::string> overrides;  // key=value
    cli::Config config;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "output directory (default $BITA_OUTPUT_DIR)");
        cmd->add_option("--config", config_file, "key=value config file");
        cmd->add_option("--set", overrides, "config override key=value (repeatable)");
        cmd->add_option("--seed", config.seed, "rng seed");
        cmd->add_option("--aggregator", config.aggregator,
                        "aggregator tag: last|mean|attention|bigru|bita");
    }

    fs::path resolve_out() {
        std::string dir = out_dir;
        if (dir.empty()) {
            if (const char* env = std::getenv("BITA_OUTPUT_DIR")) dir = env;
        }
        if (dir.empty()) dir = "bita_out";
        fs::create_directories(dir);
        return dir;
    }

    void finalize(const CLI::App* cmd) {
        // precedence: defaults < config file < --set < dedicated flags
        cli::Config base;
        if (!config_file.empty()) base = cli::load_config_file(config_file);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects key=value, got '" + kv + "'");
            cli::apply_override(base, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (cmd->count("--seed")) base.seed = config.seed;
        if (cmd->count("--aggregator")) {
            agg::kind_from_string(config.aggregator);
            base.aggregator = config.aggregator;
        }
        config = base;
    }
};

struct Prepared {
    events::EventStream stream;  // balanced when enabled
    events::SplitResult split;
};

Prepared prepare(const events::EventStream& input, const cli::Config& cfg) {
    Prepared p;
    num::Rng rng(cfg.seed);
    p.stream = cfg.balance ? events::balance_classes(input, rng) : input;
    p.split = events::temporal_split(p.stream);
    events::inductive_mask(p.split, rng, cfg.inductive_fraction);
    return p;
}

std::vector<report::Record> stats_records(const events::EventStream& stream) {
    const auto st = events::stream_stats(stream);
    std::vector<report::Record> records;
    records.push_back(report::header("stream_stats"));
    report::Record summary("summary");
    summary.field("events", st.event_count)
        .field("attackers", static_cast<std::size_t>(stream.attacker_count))
        .field("victims", static_cast<std::size_t>(stream.victim_count()))
        .field("categories", stream.category_names.size())
        .field("bin_width", st.bin_width);
    records.push_back(summary);
    for (const auto& [name, count] : st.category_counts) {
        report::Record r("category");
        r.field("name", name).field("count", count);
        records.push_back(r);
    }
    for (const auto& [bin, count] : st.interarrival_global) {
        report::Record r("interarrival");
        r.field("scope", "global")
            .field("bin_center", static_cast<double>(bin) * st.bin_width)
            .field("count", count);
        records.push_back(r);
    }
    for (const auto& [source, hist] : st.interarrival_by_source) {
        for (const auto& [bin, count] : hist) {
            report::Record r("interarrival");
            r.field("scope", "source")
                .field("source", stream.node_names.empty()
                                     ? std::to_string(source)
                                     : stream.node_names[source])
                .field("bin_center", static_cast<double>(bin) * st.bin_width)
                .field("count", count);
            records.push_back(r);
        }
    }
    for (const auto& [t, count] : st.cumulative) {
        report::Record r("cumulative");
        r.field("t", t).field("count", count);
        records.push_back(r);
    }
    return records;
}

std::string na_or(double v) {
    if (std::isnan(v)) return "N/A";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void append_eval_records(std::vector<report::Record>& records,
                         const eval::EvalReport& r, const std::string& partition) {
    report::Record rec("eval");
    rec.field("partition", partition).field("mode", r.mode);
    if (r.empty) {
        rec.field("status", "empty");
        records.push_back(rec);
        return;
    }
    rec.field("status", "ok")
        .field("events", r.event_count)
        .field("auc", r.auc)
        .field("ap", r.ap)
        .field("mrr", r.mrr);
    for (const auto& [k, v] : r.hits) rec.field("hits" + std::to_string(k), v);
    rec.field("tpr", r.tpr).field("tnr", r.tnr).field("fpr", r.fpr).field("fnr", r.fnr);
    rec.field("macro_f1", r.per_class.per_class.empty() ? 0.0 : r.per_class.macro_f1);
    records.push_back(rec);
    for (std::size_t c = 0; c < r.per_class.per_class.size(); ++c) {
        const auto& m = r.per_class.per_class[c];
        report::Record cr("class");
        cr.field("partition", partition)
            .field("mode", r.mode)
            .field("name", c < r.category_names.size() ? r.category_names[c]
                                                       : std::to_string(c))
            .field("present", m.present)
            .field("accuracy", na_or(m.accuracy))
            .field("precision", na_or(m.precision))
            .field("auc", na_or(m.auc))
            .field("recall", na_or(m.recall))
            .field("tpr", na_or(m.tpr))
            .field("tnr", na_or(m.tnr))
            .field("fpr", na_or(m.fpr))
            .field("fnr", na_or(m.fnr));
        records.push_back(cr);
    }
}

void write_curve_csv(const std::string& path, const std::vector<eval::CurvePoint>& points,
                     const char* xname, const char* yname) {
    std::ofstream out(path, std::ios::trunc);
    out << "threshold," << xname << ',' << yname << '\n';
    for (const auto& p : points) out << p.threshold << ',' << p.x << ',' << p.y << '\n';
}

// -- subcommands -------------------------------------------------------------

int cmd_ingest(CommonArgs& args, const std::string& csv_path, bool synth,
               const events::SynthSpec& synth_spec) {
    const fs::path out = args.resolve_out();
    cli::ManifestInputs mi;
    mi.command = "ingest";
    if (!synth) mi.inputs.emplace_back("csv", csv_path);
    mi.outputs.emplace_back("stream", (out / "stream.bin").string());
    mi.outputs.emplace_back("stats", (out / "ingest_stats.txt").string());
    cli::write_manifest((out / "ingest_manifest.txt").string(), args.config, mi);

    events::EventStream stream;
    if (synth) {
        num::Rng rng(args.config.seed);
        stream = events::synth_stream(synth_spec, rng);
    } else {
        stream = events::parse_csv(csv_path, args.config.schema);
    }
    events::save_stream((out / "stream.bin").string(), stream);
    report::write_records((out / "ingest_stats.txt").string(), stats_records(stream));
    if (stream.events.empty())
        std::cerr << "warning: ingested stream is empty\n";
    std::cout << "ingested " << stream.events.size() << " events, "
              << stream.node_count << " nodes, " << stream.category_names.size()
              << " categories -> " << (out / "stream.bin").string() << "\n";
    return kExitOk;
}

int cmd_train(CommonArgs& args, const std::string& stream_path) {
    const fs::path out = args.resolve_out();
    cli::ManifestInputs mi;
    mi.command = "train";
    mi.inputs.emplace_back("stream", stream_path);
    mi.outputs.emplace_back("checkpoint", (out / "checkpoint.bin").string());
    mi.outputs.emplace_back("log", (out / "train_log.txt").string());
    cli::write_manifest((out / "train_manifest.txt").string(), args.config, mi);

    const auto input = events::load_stream(stream_path);
    Prepared p = prepare(input, args.config);
    engine::Engine eng(args.config.to_engine_config(), p.stream);
    const auto log = eng.train(p.split);
    eng.save((out / "checkpoint.bin").string());

    std::vector<report::Record> records;
    records.push_back(report::header("train_log"));
    for (std::size_t i = 0; i < log.epochs.size(); ++i) {
        report::Record r("epoch");
        r.field("epoch", i + 1)
            .field("train_loss", log.epochs[i].train_loss)
            .field("val_loss", log.epochs[i].val_loss)
            .field("improved", log.epochs[i].improved);
        records.push_back(r);
    }
    report::Record best("best");
    best.field("epoch", log.best_epoch).field("val_loss", log.best_val_loss);
    records.push_back(best);
    report::write_records((out / "train_log.txt").string(), records);
    std::cout << "trained " << args.config.aggregator << " for " << log.epochs.size()
              << " epochs (best " << log.best_epoch << ", val loss "
              << log.best_val_loss << ") -> " << (out / "checkpoint.bin").string()
              << "\n";
    return kExitOk;
}

int cmd_eval(CommonArgs& args, const std::string& checkpoint_path,
             const std::string& stream_path, const std::string& mode_str) {
    const fs::path out = args.resolve_out();
    cli::ManifestInputs mi;
    mi.command = "eval";
    mi.inputs.emplace_back("checkpoint", checkpoint_path);
    mi.inputs.emplace_back("stream", stream_path);
    mi.outputs.emplace_back("report", (out / "eval_report.txt").string());
    cli::write_manifest((out / "eval_manifest.txt").string(), args.config, mi);

    const auto mode = eval::eval_mode_from_string(mode_str);
    engine::Engine eng = engine::Engine::restore(checkpoint_path);
    const auto input = events::load_stream(stream_path);
    Prepared p = prepare(input, args.config);
    eng.check_compatible(p.stream);

    // bring the memory forward over the validation span, then score the test span
    engine::ProcessOptions warm;
    eng.replay(p.split.validation, warm);
    num::Rng rng(args.config.seed ^ 0x6576616c5f726e67ULL);
    const auto reports = eval::evaluate(eng, p.split.test, p.split.test_inductive, mode,
                                        rng, args.config.candidates);

    std::vector<report::Record> records;
    records.push_back(report::header("eval_report"));
    for (const auto& r : reports) append_eval_records(records, r, "test");
    report::write_records((out / "eval_report.txt").string(), records);
    for (const auto& r : reports) {
        if (r.empty) continue;
        write_curve_csv((out / ("roc_" + r.mode + ".csv")).string(), r.roc, "fpr", "tpr");
        write_curve_csv((out / ("pr_" + r.mode + ".csv")).string(), r.pr, "recall",
                        "precision");
    }
    for (const auto& r : reports) {
        std::cout << "test/" << r.mode << ": ";
        if (r.empty) {
            std::cout << "empty (no events for this mode)\n";
        } else {
            std::cout << "auc=" << r.auc << " ap=" << r.ap << " mrr=" << r.mrr
                      << " events=" << r.event_count << "\n";
        }
    }
    return kExitOk;
}

int cmd_audit(CommonArgs& args, const std::string& stream_path, const std::string& kind,
              const std::string& checkpoint_path, std::size_t probes, double tolerance,
              std::size_t runs, bool inject_leak) {
    const fs::path out = args.resolve_out();
    cli::ManifestInputs mi;
    mi.command = "audit";
    mi.inputs.emplace_back("stream", stream_path);
    if (!checkpoint_path.empty()) mi.inputs.emplace_back("checkpoint", checkpoint_path);
    mi.outputs.emplace_back("report", (out / "audit_report.txt").string());
    cli::write_manifest((out / "audit_manifest.txt").string(), args.config, mi);

    const auto stream = events::load_stream(stream_path);
    engine::EngineConfig cfg = args.config.to_engine_config();
    cfg.leak_current_batch = inject_leak;
    eval::EngineFactory factory;
    if (checkpoint_path.empty()) {
        factory = [cfg, &stream] { return engine::Engine(cfg, stream); };
    } else {
        factory = [checkpoint_path, inject_leak] {
            engine::Engine e = engine::Engine::restore(checkpoint_path);
            if (inject_leak)
                throw ConfigError("--inject-leak applies to config-built audits only");
            return e;
        };
    }

    std::vector<report::Record> records;
    records.push_back(report::header("audit_report"));
    int exit_code = kExitOk;
    if (kind == "causality") {
        const auto r = eval::causality_audit(factory, stream, probes, tolerance);
        report::Record rec("causality");
        rec.field("probes", r.probes)
            .field("compared_events", r.compared)
            .field("delta_max", r.delta_max)
            .field("delta_mean", r.delta_mean)
            .field("pearson_r", r.pearson_r)
            .field("tolerance", r.tolerance)
            .field("determinism_ok", r.determinism_ok)
            .field("pass", r.pass);
        records.push_back(rec);
        std::cout << "causality audit: delta_max=" << r.delta_max
                  << " delta_mean=" << r.delta_mean << " r=" << r.pearson_r << " -> "
                  << (r.pass ? "PASS" : "FAIL") << "\n";
        if (!r.determinism_ok)
            exit_code = kExitNondeterminism;
        else if (!r.pass)
            exit_code = kExitAuditFail;
    } else if (kind == "order") {
        const auto r = eval::order_invariance_audit(factory, stream, runs,
                                                    args.config.seed, true);
        const bool pass = r.mean_variance < 1e-2 && r.max_variance < 5e-2;
        report::Record rec("order_invariance");
        rec.field("runs", r.runs)
            .field("edges", r.edges)
            .field("mean_variance", r.mean_variance)
            .field("max_variance", r.max_variance)
            .field("fraction_below_1e-2", r.fraction_below_1e2)
            .field("pass", pass);
        records.push_back(rec);
        std::cout << "order audit: mean_var=" << r.mean_variance
                  << " max_var=" << r.max_variance << " -> " << (pass ? "PASS" : "FAIL")
                  << "\n";
        if (!pass) exit_code = kExitAuditFail;
    } else {
        throw ConfigError("unknown audit kind '" + kind + "' (causality|order)");
    }
    report::write_records((out / "audit_report.txt").string(), records);
    return exit_code;
}

int cmd_bench(CommonArgs& args, std::vector<std::size_t> batch_sizes,
              std::vector<std::size_t> graph_sizes) {
    const fs::path out = args.resolve_out();
    cli::ManifestInputs mi;
    mi.command = "bench";
    mi.outputs.emplace_back("report", (out / "bench_report.txt").string());
    cli::write_manifest((out / "bench_manifest.txt").string(), args.config, mi);

    if (batch_sizes.empty()) batch_sizes = {100, 200, 300, 400, 500};
    if (graph_sizes.empty()) graph_sizes = {2000, 3000, 4000, 5000, 6000};

    auto synth_edges = [&](std::size_t edges) {
        events::SynthSpec spec;
        spec.n_attackers = 30;
        spec.n_victims = 30;
        spec.pairs_per_attacker = 2;
        spec.period = 150.0;
        spec.jitter = 30.0;
        spec.categories = 4;
        spec.horizon = static_cast<double>(edges) / 60.0 * 150.0;
        num::Rng rng(args.config.seed);
        return events::synth_stream(spec, rng);
    };

    std::vector<report::Record> records;
    records.push_back(report::header("bench_report"));
    auto sweep = [&](const std::string& sweep_name, std::size_t batch_size,
                     const events::EventStream& stream, std::size_t size_label) {
        engine::EngineConfig cfg = args.config.to_engine_config();
        cfg.batch_size = batch_size;
        engine::Engine eng(cfg, stream);
        std::vector<double> per_edge_ms;
        double total_s = 0.0;
        std::size_t total_edges = 0;
        for (const auto& [begin, end] : engine::Engine::batch_plan(stream.events.size(),
                                                                   batch_size)) {
            std::span<const events::TemporalEvent> span(stream.events.data() + begin,
                                                        end - begin);
            const auto t0 = std::chrono::steady_clock::now();
            engine::ProcessOptions opt;
            eng.process_batch(span, opt);
            const auto t1 = std::chrono::steady_clock::now();
            const double secs = std::chrono::duration<double>(t1 - t0).count();
            total_s += secs;
            total_edges += span.size();
            per_edge_ms.push_back(secs * 1e3 / static_cast<double>(span.size()));
        }
        std::sort(per_edge_ms.begin(), per_edge_ms.end());
        auto pct = [&per_edge_ms](double q) {
            const std::size_t n = per_edge_ms.size();
            const std::size_t rank =
                std::min(n - 1, static_cast<std::size_t>(std::ceil(q * n)) - 1);
            return per_edge_ms[rank];
        };
        const double mean_ms = total_s * 1e3 / static_cast<double>(total_edges);
        const double throughput = static_cast<double>(total_edges) / total_s;
        report::Record r("bench_row");
        r.field("sweep", sweep_name)
            .field("size", size_label)
            .field("batch_size", batch_size)
            .field("edges", total_edges)
            .field("latency_mean_ms", mean_ms)
            .field("latency_median_ms", pct(0.50))
            .field("latency_p95_ms", pct(0.95))
            .field("latency_p99_ms", pct(0.99))
            .field("throughput_eps", throughput);
        records.push_back(r);
        std::cout << sweep_name << " " << size_label << ": mean=" << mean_ms
                  << "ms p99=" << pct(0.99) << "ms throughput=" << throughput
                  << " edges/s\n";
    };

    const auto base_stream = synth_edges(3000);
    for (std::size_t b : batch_sizes) sweep("batch_size", b, base_stream, b);
    for (std::size_t g : graph_sizes)
        sweep("graph_size", args.config.batch_size, synth_edges(g), g);
    report::write_records((out / "bench_report.txt").string(), records);
    return kExitOk;
}

int cmd_compare(CommonArgs& args, const std::string& stream_path,
                std::vector<std::string> tags) {
    if (tags.size() < 2)
        throw ConfigError("compare needs at least two aggregator tags");
    for (const auto& t : tags) agg::kind_from_string(t);

    const fs::path out = args.resolve_out();
    cli::ManifestInputs mi;
    mi.command = "compare";
    mi.inputs.emplace_back("stream", stream_path);
    mi.outputs.emplace_back("report", (out / "compare_report.txt").string());
    cli::write_manifest((out / "compare_manifest.txt").string(), args.config, mi);

    const auto input = events::load_stream(stream_path);
    std::vector<report::Record> records;
    records.push_back(report::header("compare_report"));
    std::string note = "parameter budgets:";
    for (const auto& tag : tags) {
        cli::Config cfg = args.config;
        cfg.aggregator = tag;
        Prepared p = prepare(input, cfg);
        engine::Engine eng(cfg.to_engine_config(), p.stream);
        note += " " + tag + "=" + std::to_string(eng.model().parameter_count());
        eng.train(p.split);
        engine::ProcessOptions warm;
        eng.replay(p.split.validation, warm);
        num::Rng rng(cfg.seed ^ 0x6576616c5f726e67ULL);
        const auto reports = eval::evaluate(eng, p.split.test, p.split.test_inductive,
                                            eval::EvalMode::Both, rng, cfg.candidates);
        for (const auto& r : reports) {
            report::Record row("compare_row");
            row.field("aggregator", tag).field("mode", r.mode);
            if (r.empty) {
                row.field("status", "empty");
            } else {
                row.field("status", "ok")
                    .field("auc", r.auc)
                    .field("ap", r.ap)
                    .field("mrr", r.mrr)
                    .field("hits1", r.hits.at(1))
                    .field("hits3", r.hits.at(3))
                    .field("macro_f1", r.per_class.macro_f1);
            }
            records.push_back(row);
            std::cout << tag << "/" << r.mode << ": "
                      << (r.empty ? std::string("empty")
                                  : "auc=" + std::to_string(r.auc) +
                                        " mrr=" + std::to_string(r.mrr))
                      << "\n";
        }
    }
    // the aggregator is the only varying component; widths are shared, so
    // parameter budgets differ only by the aggregator's own blocks
    report::Record note_rec("note");
    note_rec.field("text", note);
    records.push_back(note_rec);
    report::write_records((out / "compare_report.txt").string(), records);
    return kExitOk;
}

int cmd_report(CommonArgs& args, const std::string& stream_path) {
    const fs::path out = args.resolve_out();
    cli::ManifestInputs mi;
    mi.command = "report";
    mi.inputs.emplace_back("stream", stream_path);
    mi.outputs.emplace_back("stats", (out / "stats_report.txt").string());
    cli::write_manifest((out / "report_manifest.txt").string(), args.config, mi);
    const auto stream = events::load_stream(stream_path);
    report::write_records((out / "stats_report.txt").string(), stats_records(stream));
    std::cout << "stats for " << stream.events.size() << " events -> "
              << (out / "stats_report.txt").string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal-graph alert prediction engine"};
    app.require_subcommand(1);

    CommonArgs ingest_args, train_args, eval_args, audit_args, bench_args, compare_args,
        report_args;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse an alert CSV into a stream file");
    std::string csv_path;
    bool synth = false;
    events::SynthSpec synth_spec;
    ingest->add_option("csv", csv_path, "input CSV path");
    ingest->add_flag("--synth", synth, "generate a synthetic stream instead of parsing");
    ingest->add_option("--synth-attackers", synth_spec.n_attackers);
    ingest->add_option("--synth-victims", synth_spec.n_victims);
    ingest->add_option("--synth-horizon", synth_spec.horizon);
    ingest->add_option("--synth-period", synth_spec.period);
    ingest->add_option("--synth-jitter", synth_spec.jitter);
    ingest->add_option("--synth-categories", synth_spec.categories);
    ingest->add_option("--synth-pairs", synth_spec.pairs_per_attacker);
    ingest->add_option("--synth-noise", synth_spec.noise_rate);
    ingest_args.add_to(ingest);

    // train
    auto* train = app.add_subcommand("train", "train on a stream file");
    std::string train_stream;
    train->add_option("stream", train_stream, "canonical stream file")->required();
    train_args.add_to(train);

    // eval
    auto* evalc = app.add_subcommand("eval", "evaluate a checkpoint");
    std::string eval_checkpoint, eval_stream, eval_mode = "both";
    evalc->add_option("checkpoint", eval_checkpoint)->required();
    evalc->add_option("stream", eval_stream)->required();
    evalc->add_option("--mode", eval_mode, "transductive|inductive|both");
    eval_args.add_to(evalc);

    // audit
    auto* audit = app.add_subcommand("audit", "causality / order-invariance audits");
    std::string audit_stream, audit_kind = "causality", audit_checkpoint;
    std::size_t audit_probes = 20, audit_runs = 5;
    double audit_tolerance = 0.0;
    bool inject_leak = false;
    audit->add_option("stream", audit_stream)->required();
    audit->add_option("--kind", audit_kind, "causality|order");
    audit->add_option("--checkpoint", audit_checkpoint, "audit a trained checkpoint");
    audit->add_option("--probes", audit_probes);
    audit->add_option("--tolerance", audit_tolerance);
    audit->add_option("--runs", audit_runs);
    audit->add_flag("--inject-leak", inject_leak,
                    "fault injection: flush current-batch messages before prediction");
    audit_args.add_to(audit);

    // bench
    auto* bench = app.add_subcommand("bench", "latency / throughput sweeps");
    std::vector<std::size_t> batch_sizes, graph_sizes;
    bench->add_option("--batch-sizes", batch_sizes)->delimiter(',');
    bench->add_option("--graph-sizes", graph_sizes)->delimiter(',');
    bench_args.add_to(bench);

    // compare
    auto* compare = app.add_subcommand("compare", "train several aggregators side by side");
    std::string compare_stream;
    std::vector<std::string> compare_tags;
    compare->add_option("stream", compare_stream)->required();
    compare->add_option("--aggregators", compare_tags)->delimiter(',')->required();
    compare_args.add_to(compare);

    // report
    auto* reportc = app.add_subcommand("report", "stream statistics report");
    std::string report_stream;
    reportc->add_option("stream", report_stream)->required();
    report_args.add_to(reportc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*ingest) {
            ingest_args.finalize(ingest);
            if (!synth && csv_path.empty())
                throw ConfigError("ingest needs a CSV path (or --synth)");
            return cmd_ingest(ingest_args, csv_path, synth, synth_spec);
        }
        if (*train) {
            train_args.finalize(train);
            return cmd_train(train_args, train_stream);
        }
        if (*evalc) {
            eval_args.finalize(evalc);
            return cmd_eval(eval_args, eval_checkpoint, eval_stream, eval_mode);
        }
        if (*audit) {
            audit_args.finalize(audit);
            return cmd_audit(audit_args, audit_stream, audit_kind, audit_checkpoint,
                             audit_probes, audit_tolerance, audit_runs, inject_leak);
        }
        if (*bench) {
            bench_args.finalize(bench);
            return cmd_bench(bench_args, batch_sizes, graph_sizes);
        }
        if (*compare) {
            compare_args.finalize(compare);
            return cmd_compare(compare_args, compare_stream, compare_tags);
        }
        if (*reportc) {
            report_args.finalize(reportc);
            return cmd_report(report_args, report_stream);
        }
    } catch (const TrainingError& e) {
        std::cerr << "training failure: " << e.what() << "\n";
        return kExitTraining;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
