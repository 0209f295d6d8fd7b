#include "bita/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bita/binio.hpp"
#include "bita/errors.hpp"
#include "bita/params.hpp"

namespace bita::engine {

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x4254434b;  // "BTCK"
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

Array row_of(const Array& matrix, std::size_t row) {
    Array out({matrix.cols()});
    for (std::size_t j = 0; j < matrix.cols(); ++j) out[j] = matrix.at(row, j);
    return out;
}

}  // namespace

std::uint64_t edge_key(NodeId src, NodeId dst) {
    return (static_cast<std::uint64_t>(src) << 32) | static_cast<std::uint64_t>(dst);
}

void Model::visit(const enc::ParamVisitor& fn) {
    time_enc.visit("time_enc", fn);
    msg_fn.visit("msg", fn);
    aggregator.visit("agg", fn);
    memory_upd.visit("memory_upd", fn);
    embed.visit("embed", fn);
    link_head.visit("link", fn);
    cat_head.visit("cat", fn);
}

std::size_t Model::parameter_count() {
    std::size_t n = 0;
    visit([&n](const std::string&, Array& a) { n += a.size(); });
    return n;
}

ModelRefs Engine::bind_model(enc::Binder& binder) {
    // Must mirror Model::visit order: the optimizer walks binder entries and
    // adam slots in parallel.
    ModelRefs refs;
    refs.time_enc = model_.time_enc.bind(binder, "time_enc");
    refs.msg_fn = model_.msg_fn.bind(binder, "msg");
    refs.aggregator = model_.aggregator.bind(binder, "agg");
    refs.memory_upd = model_.memory_upd.bind(binder, "memory_upd");
    refs.embed = model_.embed.bind(binder, "embed");
    refs.link_head = model_.link_head.bind(binder, "link");
    refs.cat_head = model_.cat_head.bind(binder, "cat");
    return refs;
}

Engine::Engine(const EngineConfig& config, const EventStream& stream) : config_(config) {
    k_ = stream.category_names.size();
    if (k_ < 2)
        throw ConfigError("engine: the joint objective needs >= 2 categories, got " +
                          std::to_string(k_));
    feat_width_ = stream.feature_width();
    n_nodes_ = stream.node_count;
    attacker_count_ = stream.attacker_count;
    if ((config.kind == agg::Kind::Bigru || config.kind == agg::Kind::Bita) &&
        config.d_time != config.d_msg)
        throw ConfigError("engine: additive time encoding needs d_time == d_msg for " +
                          agg::to_string(config.kind));

    rng_.reseed(config.seed);
    model_.time_enc = enc::TimeEncoder::create(config.d_time, rng_);
    model_.msg_fn = enc::MessageFunction::create(config.d_mem, feat_width_, config.d_time,
                                                 config.d_msg, rng_);
    model_.aggregator = agg::Aggregator::create(config.kind, config.d_msg,
                                                config.bigru_hidden, config.heads, rng_,
                                                config.scope, config.window);
    model_.memory_upd = enc::GruCell::create(config.d_msg, config.d_mem, rng_);
    model_.embed = enc::Affine::create(config.d_mem + config.d_time, config.d_node, rng_);
    model_.link_head = heads::LinkHead::create(config.d_node, config.d_node, rng_);
    model_.cat_head = heads::CategoryHead::create(config.d_node, config.d_node, k_, rng_);

    model_.visit([this](const std::string&, Array& a) {
        adam_m_.emplace_back(a.shape());
        adam_v_.emplace_back(a.shape());
    });
    focal_.alpha = Array::full({k_}, 1.0);
    focal_.gamma = config.gamma;

    memory_ = Array({n_nodes_, config.d_mem});
    last_update_.assign(n_nodes_, 0.0);
    slots_.resize(n_nodes_);
}

void Engine::set_class_weights(Array alpha) {
    if (alpha.size() != k_)
        throw DimError("class weights " + alpha.shape_str() + " vs K=" + std::to_string(k_));
    focal_.alpha = std::move(alpha);
}

void Engine::ensure_node(NodeId node) {
    if (node < n_nodes_) return;
    const std::size_t grown = node + 1;
    Array bigger({grown, config_.d_mem});
    for (std::size_t i = 0; i < n_nodes_; ++i)
        for (std::size_t j = 0; j < config_.d_mem; ++j)
            bigger.at(i, j) = memory_.at(i, j);
    memory_ = std::move(bigger);
    last_update_.resize(grown, 0.0);
    slots_.resize(grown);
    n_nodes_ = grown;
}

std::vector<std::pair<std::size_t, std::size_t>> Engine::batch_plan(std::size_t n_events,
                                                                    std::size_t batch_size) {
    std::vector<std::pair<std::size_t, std::size_t>> plan;
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    for (std::size_t begin = 0; begin < n_events; begin += batch_size)
        plan.emplace_back(begin, std::min(begin + batch_size, n_events));
    return plan;
}

std::size_t Engine::raw_store_size() const {
    std::size_t n = 0;
    for (const auto& s : slots_)
        if (s) ++n;
    return n;
}

void Engine::store_batch(std::span<const TemporalEvent> batch) {
    for (const TemporalEvent& e : batch) {
        ensure_node(e.src);
        ensure_node(e.dst);
        const std::uint64_t key = edge_key(e.src, e.dst);
        RawSlot tuple{e.dst, e.t, key, e.features};
        auto& hist = history_[key];
        hist.push_back(tuple);
        while (hist.size() > config_.window) hist.pop_front();
        slots_[e.src] = RawSlot{e.dst, e.t, key, e.features};
        slots_[e.dst] = RawSlot{e.src, e.t, key, e.features};
    }
}

BatchResult Engine::process_batch(std::span<const TemporalEvent> batch,
                                  const ProcessOptions& opt) {
    BatchResult result;
    if (batch.empty()) return result;
    phases_.clear();
    for (const TemporalEvent& e : batch) {
        ensure_node(e.src);
        ensure_node(e.dst);
    }
    if (!opt.allow_unordered && batch.front().t < clock_)
        throw CausalityError("process_batch: batch starts at t=" +
                             std::to_string(batch.front().t) +
                             " before the engine clock " + std::to_string(clock_));

    const bool compute_loss = opt.train || opt.compute_loss;
    if (compute_loss && config_.negatives_per_positive > 0 &&
        n_nodes_ - attacker_count_ < 2)
        throw ContractError("negative sampling needs >= 2 victims");

    if (config_.leak_current_batch) {
        // fault injection: current batch becomes visible to its own flush
        store_batch(batch);
        phases_ += "store;";
    }

    num::Tape tape;
    enc::Binder binder(tape);
    ModelRefs refs = bind_model(binder);

    // (1) flush: aggregate stored raw messages and update memories
    phases_ += "flush;";
    std::vector<NodeId> pending;
    for (NodeId n = 0; n < n_nodes_; ++n)
        if (slots_[n]) pending.push_back(n);

    agg::MessageBatch message_batch;
    std::vector<num::Value> mem_leaf(n_nodes_, num::Value{});
    auto memory_leaf = [&](NodeId n) {
        if (!mem_leaf[n].valid()) mem_leaf[n] = tape.leaf(row_of(memory_, n));
        return mem_leaf[n];
    };
    for (NodeId n : pending) {
        const RawSlot& slot = *slots_[n];
        const auto& hist = history_.at(slot.edge_key);
        // gather and sort chronologically; already sorted unless batches were
        // deliberately shuffled (order-invariance audit)
        std::vector<RawSlot> tuples(hist.begin(), hist.end());
        std::stable_sort(tuples.begin(), tuples.end(),
                         [](const RawSlot& a, const RawSlot& b) { return a.t < b.t; });
        std::vector<agg::MessageItem> items;
        items.reserve(tuples.size());
        for (const RawSlot& tuple : tuples) {
            const double enc_t =
                config_.time_absolute ? tuple.t : tuple.t - last_update_[n];
            num::Value msg = enc::build_message(
                tape, refs.msg_fn, memory_leaf(n), memory_leaf(slot.partner),
                tape.leaf(Array({tuple.features.size()}, tuple.features)),
                enc::time_encode(tape, refs.time_enc, enc_t));
            items.push_back({msg, enc_t, slot.edge_key});
        }
        message_batch.emplace_back(n, std::move(items));
    }

    agg::AggregateOptions agg_opt;
    agg_opt.dropout_rate = config_.dropout;
    agg_opt.rng = &rng_;
    agg_opt.training = opt.train;
    auto aggregates = agg::aggregate(tape, refs.aggregator, refs.time_enc, message_batch,
                                     agg_opt);

    std::vector<num::Value> new_memory(n_nodes_, num::Value{});
    std::vector<double> flushed_time(n_nodes_, 0.0);
    for (const auto& na : aggregates) {
        new_memory[na.node] = enc::gru_step(tape, refs.memory_upd, na.value,
                                            memory_leaf(na.node));
        flushed_time[na.node] = slots_[na.node]->t;
    }

    // (2)+(3) embed endpoints and score positives (and candidates/negatives)
    phases_ += "predict;";
    auto effective_last_update = [&](NodeId n) {
        return new_memory[n].valid() ? flushed_time[n] : last_update_[n];
    };
    auto embed_at = [&](NodeId n, double t) {
        const double last = effective_last_update(n);
        if (t < last && !opt.allow_unordered && !config_.leak_current_batch)
            throw CausalityError("embedding for node " + std::to_string(n) + " at t=" +
                                 std::to_string(t) + " precedes its last update " +
                                 std::to_string(last));
        const double enc_t = config_.time_absolute ? t : t - last;
        num::Value mem = new_memory[n].valid() ? new_memory[n] : memory_leaf(n);
        num::Value code = enc::time_encode(tape, refs.time_enc, enc_t);
        return enc::apply(tape, refs.embed, tape.concat_vec({mem, code}));
    };

    std::vector<num::Value> link_losses;
    std::vector<num::Value> cat_losses;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const TemporalEvent& e = batch[i];
        num::Value e_src = embed_at(e.src, e.t);
        num::Value e_dst = embed_at(e.dst, e.t);
        num::Value p = heads::predict_link(tape, refs.link_head, e_src, e_dst);
        num::Value cat = heads::predict_category(tape, refs.cat_head, e_src, e_dst);
        result.link_probs.push_back(tape.val(p)[0]);
        const Array& cat_val = tape.val(cat);
        result.categories.emplace_back(cat_val.data(), cat_val.data() + cat_val.size());

        if (opt.extra_candidates) {
            const auto& cands = (*opt.extra_candidates)[i];
            std::vector<double> probs;
            probs.reserve(cands.size());
            for (NodeId c : cands) {
                ensure_node(c);
                num::Value pc =
                    heads::predict_link(tape, refs.link_head, e_src, embed_at(c, e.t));
                probs.push_back(tape.val(pc)[0]);
            }
            result.candidate_probs.push_back(std::move(probs));
        }

        if (compute_loss) {
            link_losses.push_back(heads::bce_loss(tape, p, 1.0));
            for (std::size_t nn = 0; nn < config_.negatives_per_positive; ++nn) {
                Rng& sampler = opt.rng_override ? *opt.rng_override : rng_;
                const NodeId neg = events::draw_negative(
                    e.dst, attacker_count_, static_cast<NodeId>(n_nodes_), sampler);
                num::Value pn =
                    heads::predict_link(tape, refs.link_head, e_src, embed_at(neg, e.t));
                link_losses.push_back(heads::bce_loss(tape, pn, 0.0));
            }
            if (e.category >= k_)
                throw ContractError("event category " + std::to_string(e.category) +
                                    " out of range (open-set ingestion is rejected at "
                                    "training time)");
            Array one_hot({k_});
            one_hot[e.category] = 1.0;
            cat_losses.push_back(heads::focal_loss(tape, cat, one_hot, focal_));
        }
    }

    // (4) one optimizer step on the joint loss
    if (compute_loss) {
        num::Value loss = heads::joint_loss(tape, link_losses, cat_losses, config_.lambda);
        result.loss = tape.val(loss)[0];
        result.has_loss = true;
        if (!std::isfinite(result.loss))
            throw TrainingError("non-finite loss " + std::to_string(result.loss) +
                                " at step " + std::to_string(step_) + " (batch of " +
                                std::to_string(batch.size()) + " events at t=" +
                                std::to_string(batch.front().t) + ")");
        if (opt.train) {
            tape.backward(loss);
            adam_step(binder, tape);
        }
    }

    // materialize post-flush memories (computed with pre-step parameters)
    for (NodeId n = 0; n < n_nodes_; ++n) {
        if (!new_memory[n].valid()) continue;
        const Array& val = tape.val(new_memory[n]);
        for (std::size_t j = 0; j < config_.d_mem; ++j) memory_.at(n, j) = val[j];
        if (!opt.allow_unordered)
            last_update_[n] = std::max(last_update_[n], flushed_time[n]);
        else
            last_update_[n] = flushed_time[n];
        slots_[n].reset();
    }

    // (5) only now are the current batch's raw messages stored
    if (!config_.leak_current_batch) {
        store_batch(batch);
        phases_ += "store";
    }
    clock_ = std::max(clock_, batch.back().t);
    return result;
}

void Engine::adam_step(enc::Binder& binder, num::Tape& tape) {
    ++step_;
    const auto& entries = binder.entries();
    if (entries.size() != adam_m_.size())
        throw Error("optimizer state out of sync with bound parameters");
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step_));
    for (std::size_t p = 0; p < entries.size(); ++p) {
        const Array& g = tape.grad(entries[p].leaf);
        Array& m = adam_m_[p];
        Array& v = adam_v_[p];
        Array& w = *entries[p].array;
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g[i];
            v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= config_.lr * mhat / (std::sqrt(vhat) + kAdamEps);
        }
    }
}

double Engine::replay(const EventStream& part, const ProcessOptions& opt) {
    double loss_sum = 0.0;
    std::size_t events_seen = 0;
    for (const auto& [begin, end] : batch_plan(part.events.size(), config_.batch_size)) {
        std::span<const TemporalEvent> span(part.events.data() + begin, end - begin);
        BatchResult r = process_batch(span, opt);
        if (r.has_loss) {
            loss_sum += r.loss * static_cast<double>(span.size());
            events_seen += span.size();
        }
    }
    return events_seen > 0 ? loss_sum / static_cast<double>(events_seen) : 0.0;
}

TrainLog Engine::train(const events::SplitResult& split, const TrainOptions& opt) {
    if (k_ >= 2 && !split.train.events.empty())
        set_class_weights(heads::class_weights(split.train));

    TrainLog log;
    log.best_val_loss = std::numeric_limits<double>::infinity();
    std::string best_blob;
    std::size_t strikes = 0;

    const auto plan = batch_plan(split.train.events.size(), config_.batch_size);
    for (std::size_t epoch = 1; epoch <= config_.epochs; ++epoch) {
        reset_dynamic_state();
        std::vector<std::size_t> order(plan.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        if (opt.batch_order) order = opt.batch_order(plan.size(), epoch);

        double loss_sum = 0.0;
        std::size_t seen = 0;
        ProcessOptions train_opt;
        train_opt.train = true;
        train_opt.allow_unordered = opt.allow_unordered;
        for (std::size_t idx : order) {
            const auto [begin, end] = plan[idx];
            std::span<const TemporalEvent> span(split.train.events.data() + begin,
                                                end - begin);
            BatchResult r = process_batch(span, train_opt);
            loss_sum += r.loss * static_cast<double>(span.size());
            seen += span.size();
        }
        EpochLog entry;
        entry.train_loss = seen > 0 ? loss_sum / static_cast<double>(seen) : 0.0;

        // snapshot before the validation replay so a restored checkpoint
        // reproduces the same validation pass bitwise
        std::ostringstream snapshot;
        serialize(snapshot);

        ProcessOptions val_opt;
        val_opt.compute_loss = true;
        val_opt.allow_unordered = opt.allow_unordered;
        Rng val_rng(config_.seed ^ 0x76616c5f73706c69ULL);  // fixed negatives per epoch
        val_opt.rng_override = &val_rng;
        entry.val_loss = split.validation.events.empty()
                             ? entry.train_loss
                             : replay(split.validation, val_opt);

        entry.improved = entry.val_loss < log.best_val_loss;
        if (entry.improved) {
            log.best_val_loss = entry.val_loss;
            log.best_epoch = epoch;
            best_blob = snapshot.str();
            strikes = 0;
        } else {
            ++strikes;
        }
        log.epochs.push_back(entry);
        if (!opt.fixed_epochs && strikes >= config_.patience) break;
    }

    if (!opt.fixed_epochs && !best_blob.empty()) {
        std::istringstream in(best_blob);
        *this = deserialize(in);
    }
    return log;
}

void Engine::reset_dynamic_state() {
    memory_ = Array({n_nodes_, config_.d_mem});
    last_update_.assign(n_nodes_, 0.0);
    slots_.assign(n_nodes_, std::nullopt);
    history_.clear();
    clock_ = 0.0;
}

Array Engine::compute_embedding(NodeId node, double t) {
    ensure_node(node);
    if (t < last_update_[node])
        throw CausalityError("compute_embedding: t=" + std::to_string(t) +
                             " precedes node " + std::to_string(node) +
                             " last update " + std::to_string(last_update_[node]));
    num::Tape tape;
    enc::Binder binder(tape);
    auto te = model_.time_enc.bind(binder, "time_enc");
    auto emb = model_.embed.bind(binder, "embed");
    const double enc_t = config_.time_absolute ? t : t - last_update_[node];
    num::Value mem = tape.leaf(row_of(memory_, node));
    num::Value code = enc::time_encode(tape, te, enc_t);
    num::Value out = enc::apply(tape, emb, tape.concat_vec({mem, code}));
    return tape.val(out);
}

// -- serialization ------------------------------------------------------------

void Engine::serialize(std::ostream& os) const {
    io::write_u32(os, kCheckpointMagic);
    io::write_u32(os, kCheckpointVersion);

    io::write_string(os, agg::to_string(config_.kind));
    io::write_u64(os, config_.d_mem);
    io::write_u64(os, config_.d_msg);
    io::write_u64(os, config_.d_time);
    io::write_u64(os, config_.d_node);
    io::write_u64(os, config_.bigru_hidden);
    io::write_u64(os, config_.heads);
    io::write_f64(os, config_.dropout);
    io::write_u64(os, config_.batch_size);
    io::write_f64(os, config_.lr);
    io::write_u64(os, config_.epochs);
    io::write_u64(os, config_.patience);
    io::write_f64(os, config_.lambda);
    io::write_f64(os, config_.gamma);
    io::write_u64(os, config_.seed);
    io::write_u64(os, config_.window);
    io::write_u32(os, config_.scope == agg::ContextScope::Batch ? 0 : 1);
    io::write_u32(os, config_.time_absolute ? 1 : 0);
    io::write_u64(os, config_.negatives_per_positive);
    io::write_u32(os, config_.leak_current_batch ? 1 : 0);

    io::write_u64(os, k_);
    io::write_u64(os, feat_width_);
    io::write_u64(os, n_nodes_);
    io::write_u64(os, attacker_count_);

    io::write_array(os, focal_.alpha);
    io::write_f64(os, focal_.gamma);

    ParamPack params;
    const_cast<Model&>(model_).visit(
        [&params](const std::string& name, Array& a) { params.add(name, a); });
    write_params(os, params);
    io::write_u64(os, adam_m_.size());
    for (const auto& a : adam_m_) io::write_array(os, a);
    for (const auto& a : adam_v_) io::write_array(os, a);
    io::write_u64(os, step_);

    for (std::uint64_t w : rng_.state()) io::write_u64(os, w);
    io::write_f64(os, clock_);
    io::write_array(os, memory_);
    io::write_u64(os, last_update_.size());
    for (double v : last_update_) io::write_f64(os, v);

    std::uint64_t slot_count = 0;
    for (const auto& s : slots_)
        if (s) ++slot_count;
    io::write_u64(os, slot_count);
    for (std::size_t n = 0; n < slots_.size(); ++n) {
        if (!slots_[n]) continue;
        io::write_u64(os, n);
        io::write_u64(os, slots_[n]->partner);
        io::write_f64(os, slots_[n]->t);
        io::write_u64(os, slots_[n]->edge_key);
        io::write_u64(os, slots_[n]->features.size());
        for (double f : slots_[n]->features) io::write_f64(os, f);
    }

    io::write_u64(os, history_.size());
    for (const auto& [key, tuples] : history_) {
        io::write_u64(os, key);
        io::write_u64(os, tuples.size());
        for (const RawSlot& tuple : tuples) {
            io::write_u64(os, tuple.partner);
            io::write_f64(os, tuple.t);
            io::write_u64(os, tuple.features.size());
            for (double f : tuple.features) io::write_f64(os, f);
        }
    }
}

Engine Engine::deserialize(std::istream& is) {
    io::expect_magic(is, kCheckpointMagic, kCheckpointVersion, "checkpoint");

    EngineConfig config;
    config.kind = agg::kind_from_string(io::read_string(is));
    config.d_mem = io::read_u64(is);
    config.d_msg = io::read_u64(is);
    config.d_time = io::read_u64(is);
    config.d_node = io::read_u64(is);
    config.bigru_hidden = io::read_u64(is);
    config.heads = io::read_u64(is);
    config.dropout = io::read_f64(is);
    config.batch_size = io::read_u64(is);
    config.lr = io::read_f64(is);
    config.epochs = io::read_u64(is);
    config.patience = io::read_u64(is);
    config.lambda = io::read_f64(is);
    config.gamma = io::read_f64(is);
    config.seed = io::read_u64(is);
    config.window = io::read_u64(is);
    config.scope = io::read_u32(is) == 0 ? agg::ContextScope::Batch : agg::ContextScope::Node;
    config.time_absolute = io::read_u32(is) != 0;
    config.negatives_per_positive = io::read_u64(is);
    config.leak_current_batch = io::read_u32(is) != 0;

    const std::uint64_t k = io::read_u64(is);
    const std::uint64_t feat_width = io::read_u64(is);
    const std::uint64_t n_nodes = io::read_u64(is);
    const std::uint64_t attackers = io::read_u64(is);

    // reconstruct a skeleton stream carrying the dims the constructor needs
    EventStream skeleton;
    skeleton.node_count = static_cast<NodeId>(n_nodes);
    skeleton.attacker_count = static_cast<NodeId>(attackers);
    for (std::uint64_t c = 0; c < k; ++c)
        skeleton.category_names.push_back("c" + std::to_string(c));
    events::TemporalEvent probe;
    probe.features.assign(feat_width, 0.0);
    skeleton.events.push_back(probe);

    Engine e(config, skeleton);
    e.focal_.alpha = io::read_array(is);
    e.focal_.gamma = io::read_f64(is);

    ParamPack params = read_params(is);
    e.model_.visit([&params](const std::string& name, Array& a) {
        const Array& loaded = params.at(name);
        if (!loaded.same_shape(a))
            throw DimError("checkpoint parameter " + name + " shape " +
                           loaded.shape_str() + " vs expected " + a.shape_str());
        a = loaded;
    });
    const std::uint64_t n_slots_adam = io::read_u64(is);
    if (n_slots_adam != e.adam_m_.size())
        throw IoError("checkpoint optimizer state count mismatch");
    for (auto& a : e.adam_m_) a = io::read_array(is);
    for (auto& a : e.adam_v_) a = io::read_array(is);
    e.step_ = io::read_u64(is);

    std::array<std::uint64_t, 4> rng_state{};
    for (auto& w : rng_state) w = io::read_u64(is);
    e.rng_.set_state(rng_state);
    e.clock_ = io::read_f64(is);
    e.memory_ = io::read_array(is);
    const std::uint64_t n_last = io::read_u64(is);
    e.last_update_.resize(n_last);
    for (auto& v : e.last_update_) v = io::read_f64(is);

    const std::uint64_t slot_count = io::read_u64(is);
    for (std::uint64_t i = 0; i < slot_count; ++i) {
        const auto node = static_cast<std::size_t>(io::read_u64(is));
        RawSlot s;
        s.partner = static_cast<NodeId>(io::read_u64(is));
        s.t = io::read_f64(is);
        s.edge_key = io::read_u64(is);
        s.features.resize(io::read_u64(is));
        for (auto& f : s.features) f = io::read_f64(is);
        e.slots_[node] = std::move(s);
    }

    const std::uint64_t edges = io::read_u64(is);
    for (std::uint64_t i = 0; i < edges; ++i) {
        const std::uint64_t key = io::read_u64(is);
        const std::uint64_t count = io::read_u64(is);
        std::deque<RawSlot> tuples;
        for (std::uint64_t j = 0; j < count; ++j) {
            RawSlot s;
            s.partner = static_cast<NodeId>(io::read_u64(is));
            s.t = io::read_f64(is);
            s.edge_key = key;
            s.features.resize(io::read_u64(is));
            for (auto& f : s.features) f = io::read_f64(is);
            tuples.push_back(std::move(s));
        }
        e.history_[key] = std::move(tuples);
    }
    return e;
}

void Engine::save(const std::string& path) const {
    auto os = io::open_out(path);
    serialize(os);
}

Engine Engine::restore(const std::string& path) {
    auto is = io::open_in(path);
    return deserialize(is);
}

void Engine::check_compatible(const EventStream& stream) const {
    if (stream.node_count != n_nodes_)
        throw DimError("checkpoint node count " + std::to_string(n_nodes_) +
                       " vs stream " + std::to_string(stream.node_count));
    if (stream.category_names.size() != k_)
        throw DimError("checkpoint category count " + std::to_string(k_) + " vs stream " +
                       std::to_string(stream.category_names.size()));
    if (stream.feature_width() != feat_width_)
        throw DimError("checkpoint feature width " + std::to_string(feat_width_) +
                       " vs stream " + std::to_string(stream.feature_width()));
}

}  // namespace bita::engine
