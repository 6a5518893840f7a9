#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ggen/graph.hpp"
#include "ggen/model.hpp"
#include "ggen/ordering.hpp"
#include "ggen/vocab.hpp"

namespace ggen {

struct TrainConfig {
    double learning_rate = 1e-4;
    double weight_decay = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.95;
    double adam_eps = 1e-8;
    int warmup_iters = 200;
    int total_iters = 5000;
    int batch_size = 32;
    int grad_accum_steps = 1;
    double grad_clip_norm = 1.0;
    int augmentations_per_graph = 10;
    OrderPolicy ordering = OrderPolicy::degree;
    std::uint64_t seed = 0;
    int checkpoint_every = 0;            // 0 = only final
    std::string checkpoint_dir;          // empty = no checkpoints
    int log_every = 50;

    void validate() const;  // throws ConfigError
};

// Linear warmup to the peak rate, cosine decay to 0 at total_iters.
double lr_at(const TrainConfig& cfg, int iter);

// One tokenized sequence per (graph, augmentation) with independent node and
// edge order draws; deterministic in seed. Throws DataError when a graph
// exceeds the vocabulary's n_max.
std::vector<std::vector<int>> build_sequence_dataset(const std::vector<Graph>& graphs,
                                                     const Vocabulary& v, OrderPolicy policy,
                                                     int augmentations_per_graph,
                                                     std::uint64_t seed);

struct TracePoint {
    int iter;
    double loss;
    double lr;
};

// Decoupled-weight-decay Adam; decay applies to matrices only (biases and
// LayerNorm rows are 1 x k and skipped).
struct AdamW {
    double beta1, beta2, eps, weight_decay;
    long long t = 0;
    std::vector<Eigen::MatrixXd> m, v;

    AdamW(const ModelState& model, const TrainConfig& cfg);
    AdamW(const ModelState& model, double beta1, double beta2, double eps, double weight_decay);
    // lr_for returns the step size per tensor; a zero rate freezes the tensor
    // entirely (its moments are not advanced).
    void step(ModelState& model, const GradStore& g,
              const std::function<double(const Tensor&)>& lr_for);
    void step(ModelState& model, const GradStore& g, double lr);
};

// Batched loss/gradient over a list of sequences: token-mean NLL, gradients
// accumulated per fixed chunk and reduced in chunk order (deterministic
// regardless of thread count). Targets equal to skip_id contribute zero.
NllResult batch_loss_and_grad(const ModelState& m, const std::vector<std::vector<int>>& batch,
                              GradStore* gs, int skip_id);

// Scales gradients so the post-clip global norm is at most clip; returns the
// pre-clip norm.
double clip_gradients(GradStore& gs, double clip);

struct TrainResult {
    std::vector<TracePoint> trace;
    double final_val_nll = -1.0;  // mean per-token NLL on val_seqs, -1 if none
};

// Trains in place. val_seqs (may be empty) is evaluated every log_every
// iterations and at the end. Throws NumericalError on a non-finite loss
// after writing a diagnostic checkpoint (when checkpoint_dir is set).
TrainResult train_model(ModelState& model, const Vocabulary& v,
                        const std::vector<std::vector<int>>& train_seqs,
                        const std::vector<std::vector<int>>& val_seqs, const TrainConfig& cfg,
                        const std::function<void(const TracePoint&)>& on_log = nullptr);

// Mean per-token NLL over sequences (forward only, parallel over chunks).
double mean_nll(const ModelState& m, const std::vector<std::vector<int>>& seqs);

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace);

// Deterministic 6:2:2 split by shuffled index.
struct SplitIndices {
    std::vector<int> train, val, test;
};
SplitIndices split_622(int count, std::uint64_t seed);

}  // namespace ggen
