#include "ggen/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ggen/codec.hpp"
#include "ggen/errors.hpp"
#include "ggen/parallel.hpp"
#include "ggen/rng.hpp"

namespace ggen {

namespace {
constexpr int kGradChunks = 8;  // fixed reduction layout, independent of thread count
}

void TrainConfig::validate() const {
    if (learning_rate <= 0 || total_iters < 1 || batch_size < 1 || grad_accum_steps < 1)
        throw ConfigError("train config: rates/iterations must be positive");
    if (warmup_iters < 0 || warmup_iters > total_iters)
        throw ConfigError("train config: warmup_iters must lie in [0, total_iters]");
    if (augmentations_per_graph < 1)
        throw ConfigError("train config: augmentations_per_graph must be positive");
    if (grad_clip_norm <= 0) throw ConfigError("train config: grad_clip_norm must be positive");
}

double lr_at(const TrainConfig& cfg, int iter) {
    if (cfg.warmup_iters > 0 && iter < cfg.warmup_iters)
        return cfg.learning_rate * iter / cfg.warmup_iters;
    int decay_span = cfg.total_iters - cfg.warmup_iters;
    if (decay_span <= 0) return cfg.learning_rate;
    double progress = static_cast<double>(iter - cfg.warmup_iters) / decay_span;
    progress = std::clamp(progress, 0.0, 1.0);
    return cfg.learning_rate * 0.5 * (1.0 + std::cos(M_PI * progress));
}

std::vector<std::vector<int>> build_sequence_dataset(const std::vector<Graph>& graphs,
                                                     const Vocabulary& v, OrderPolicy policy,
                                                     int augmentations_per_graph,
                                                     std::uint64_t seed) {
    for (const Graph& g : graphs)
        if (g.n > v.n_max)
            throw DataError("build_sequence_dataset: graph with " + std::to_string(g.n) +
                            " nodes exceeds vocabulary n_max=" + std::to_string(v.n_max));
    std::vector<std::vector<int>> seqs(graphs.size() *
                                       static_cast<std::size_t>(augmentations_per_graph));
    parallel_chunks(static_cast<int>(graphs.size()), kGradChunks, [&](int, int begin, int end) {
        for (int gi = begin; gi < end; ++gi) {
            for (int a = 0; a < augmentations_per_graph; ++a) {
                std::uint64_t node_seed = mix_seed(seed, gi, 2 * a);
                std::uint64_t edge_seed = mix_seed(seed, gi, 2 * a + 1);
                auto toks = encode(graphs[gi], node_seed, policy, edge_seed);
                seqs[static_cast<std::size_t>(gi) * augmentations_per_graph + a] =
                    tokenize_all(toks, v);
            }
        }
    });
    return seqs;
}

AdamW::AdamW(const ModelState& model, const TrainConfig& cfg)
    : AdamW(model, cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay) {}

AdamW::AdamW(const ModelState& model, double b1, double b2, double e, double wd)
    : beta1(b1), beta2(b2), eps(e), weight_decay(wd) {
    m.resize(model.n_tensors);
    v.resize(model.n_tensors);
    model.for_each_tensor([&](const Tensor& t) {
        m[t.idx].setZero(t.v.rows(), t.v.cols());
        v[t.idx].setZero(t.v.rows(), t.v.cols());
    });
}

void AdamW::step(ModelState& model, const GradStore& g,
                 const std::function<double(const Tensor&)>& lr_for) {
    t++;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    model.for_each_tensor([&](Tensor& p) {
        double lr = lr_for(p);
        if (lr == 0.0) return;
        auto& mt = m[p.idx];
        auto& vt = v[p.idx];
        const auto& gt = g.g[p.idx];
        mt = beta1 * mt + (1.0 - beta1) * gt;
        vt = beta2 * vt + (1.0 - beta2) * gt.cwiseProduct(gt);
        Eigen::ArrayXXd mhat = mt.array() / bc1;
        Eigen::ArrayXXd vhat = vt.array() / bc2;
        p.v.array() -= lr * (mhat / (vhat.sqrt() + eps));
        if (weight_decay > 0.0 && p.v.rows() > 1) p.v *= (1.0 - lr * weight_decay);
    });
}

void AdamW::step(ModelState& model, const GradStore& g, double lr) {
    step(model, g, [lr](const Tensor&) { return lr; });
}

NllResult batch_loss_and_grad(const ModelState& m, const std::vector<std::vector<int>>& batch,
                              GradStore* gs, int skip_id) {
    // Pass 1: token counts so every sequence can be scaled by the final
    // batch-mean factor in a single backward sweep.
    long long total_count = 0;
    for (const auto& ids : batch) {
        for (std::size_t t = 1; t < ids.size(); ++t)
            if (ids[t] != skip_id) total_count++;
    }
    NllResult out;
    out.count = total_count;
    if (total_count == 0) return out;
    double scale = 1.0 / static_cast<double>(total_count);

    int n = static_cast<int>(batch.size());
    std::vector<double> loss_chunk(kGradChunks, 0.0);
    std::vector<GradStore> grads;
    if (gs) {
        grads.reserve(kGradChunks);
        for (int c = 0; c < kGradChunks; ++c) grads.emplace_back(GradStore{});
    }
    const ModelState* mp = &m;
    parallel_chunks(n, kGradChunks, [&](int chunk, int begin, int end) {
        GradStore* local = nullptr;
        if (gs) {
            grads[chunk] = GradStore(*mp);
            local = &grads[chunk];
        }
        double loss = 0.0;
        for (int i = begin; i < end; ++i) {
            NllResult r = nll_loss_and_grad(*mp, batch[i], local, scale, skip_id);
            loss += r.loss_sum;
        }
        loss_chunk[chunk] = loss;
    });
    for (int c = 0; c < kGradChunks; ++c) out.loss_sum += loss_chunk[c];
    if (gs)
        for (int c = 0; c < std::min(kGradChunks, n); ++c) gs->add(grads[c]);
    return out;
}

double clip_gradients(GradStore& gs, double clip) {
    double norm = gs.global_norm();
    if (norm > clip) gs.scale(clip / norm);
    return norm;
}

double mean_nll(const ModelState& m, const std::vector<std::vector<int>>& seqs) {
    if (seqs.empty()) return -1.0;
    int n = static_cast<int>(seqs.size());
    std::vector<double> loss(kGradChunks, 0.0);
    std::vector<long long> count(kGradChunks, 0);
    parallel_chunks(n, kGradChunks, [&](int chunk, int begin, int end) {
        for (int i = begin; i < end; ++i) {
            ForwardCache cache = forward(m, seqs[i]);
            NllResult r = nll_from_logits(cache.logits, seqs[i], -1);
            loss[chunk] += r.loss_sum;
            count[chunk] += r.count;
        }
    });
    double ls = 0.0;
    long long ct = 0;
    for (int c = 0; c < kGradChunks; ++c) {
        ls += loss[c];
        ct += count[c];
    }
    return ct > 0 ? ls / ct : 0.0;
}

TrainResult train_model(ModelState& model, const Vocabulary& v,
                        const std::vector<std::vector<int>>& train_seqs,
                        const std::vector<std::vector<int>>& val_seqs, const TrainConfig& cfg,
                        const std::function<void(const TracePoint&)>& on_log) {
    cfg.validate();
    if (train_seqs.empty()) throw DataError("train: empty dataset");

    // Fully shuffled pool, re-shuffled per epoch; within each shuffle window
    // sequences are bucketed by length to keep batch shapes tight. PAD is
    // appended so every batch is rectangular.
    Rng shuffle_rng = make_rng(mix_seed(cfg.seed, 0xba7c4));
    std::vector<int> pool(train_seqs.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
    std::size_t cursor = pool.size();  // force initial shuffle

    const int pad = v.pad_id();
    AdamW opt(model, cfg);
    TrainResult result;

    auto next_batch = [&]() {
        if (cursor + cfg.batch_size > pool.size()) {
            shuffle_vec(pool, shuffle_rng);
            // bucket by length inside windows of 8 batches
            std::size_t window = static_cast<std::size_t>(cfg.batch_size) * 8;
            for (std::size_t w = 0; w + 1 < pool.size(); w += window) {
                auto first = pool.begin() + static_cast<long>(w);
                auto last = pool.begin() +
                            static_cast<long>(std::min(w + window, pool.size()));
                std::stable_sort(first, last, [&](int a, int b) {
                    return train_seqs[a].size() < train_seqs[b].size();
                });
            }
            cursor = 0;
        }
        std::vector<std::vector<int>> batch;
        batch.reserve(cfg.batch_size);
        std::size_t take = std::min<std::size_t>(cfg.batch_size, pool.size() - cursor);
        std::size_t max_len = 0;
        for (std::size_t i = 0; i < take; ++i)
            max_len = std::max(max_len, train_seqs[pool[cursor + i]].size());
        for (std::size_t i = 0; i < take; ++i) {
            std::vector<int> ids = train_seqs[pool[cursor + i]];
            ids.resize(max_len, pad);
            batch.push_back(std::move(ids));
        }
        cursor += take;
        return batch;
    };

    GradStore grads(model);
    for (int iter = 1; iter <= cfg.total_iters; ++iter) {
        double lr = lr_at(cfg, iter);
        grads.zero();
        double loss_sum = 0.0;
        long long count = 0;
        for (int micro = 0; micro < cfg.grad_accum_steps; ++micro) {
            auto batch = next_batch();
            GradStore micro_grads(model);
            NllResult r = batch_loss_and_grad(model, batch, &micro_grads, pad);
            micro_grads.scale(1.0 / cfg.grad_accum_steps);
            grads.add(micro_grads);
            loss_sum += r.loss_sum;
            count += r.count;
        }
        double loss = count > 0 ? loss_sum / count : 0.0;
        if (!std::isfinite(loss)) {
            if (!cfg.checkpoint_dir.empty())
                save_checkpoint(cfg.checkpoint_dir + "/diagnostic", model, v, cfg.seed, iter);
            throw NumericalError("train: non-finite loss at iter " + std::to_string(iter));
        }
        clip_gradients(grads, cfg.grad_clip_norm);
        opt.step(model, grads, lr);

        result.trace.push_back({iter, loss, lr});
        if (on_log && (iter % cfg.log_every == 0 || iter == cfg.total_iters))
            on_log(result.trace.back());
        if (!cfg.checkpoint_dir.empty() && cfg.checkpoint_every > 0 &&
            iter % cfg.checkpoint_every == 0)
            save_checkpoint(cfg.checkpoint_dir + "/ckpt-" + std::to_string(iter), model, v,
                            cfg.seed, iter);
    }

    if (!val_seqs.empty()) result.final_val_nll = mean_nll(model, val_seqs);
    if (!cfg.checkpoint_dir.empty())
        save_checkpoint(cfg.checkpoint_dir + "/final", model, v, cfg.seed, cfg.total_iters);
    return result;
}

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for writing: " + path);
    f << "iter,loss,lr\n";
    for (const TracePoint& p : trace) f << p.iter << "," << p.loss << "," << p.lr << "\n";
}

SplitIndices split_622(int count, std::uint64_t seed) {
    std::vector<int> idx(count);
    for (int i = 0; i < count; ++i) idx[i] = i;
    Rng rng = make_rng(mix_seed(seed, 0x5911));
    shuffle_vec(idx, rng);
    SplitIndices s;
    int n_train = count * 6 / 10;
    int n_val = count * 2 / 10;
    for (int i = 0; i < count; ++i) {
        if (i < n_train)
            s.train.push_back(idx[i]);
        else if (i < n_train + n_val)
            s.val.push_back(idx[i]);
        else
            s.test.push_back(idx[i]);
    }
    return s;
}

}  // namespace ggen
