#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ggen/vocab.hpp"

namespace ggen {

struct ModelConfig {
    int n_layers = 4;
    int n_heads = 4;
    int d_model = 128;
    int max_seq_len = 256;
    int vocab_size = 0;   // real token ids 1..vocab_size; PAD row appended to wte only
    int head_dim = 0;     // output width; 0 means vocab_size (LM head), 1 for a value head
    double dropout_rate = 0.0;

    int out_dim() const { return head_dim > 0 ? head_dim : vocab_size; }
    void validate() const;  // throws ConfigError
};

struct Tensor {
    Eigen::MatrixXd v;
    std::string name;
    int idx = -1;
};

struct LayerParams {
    Tensor ln1_g, ln1_b;
    Tensor w_qkv, b_qkv;  // d x 3d fused projection
    Tensor w_o, b_o;
    Tensor ln2_g, ln2_b;
    Tensor w_fc, b_fc;    // d x 4d
    Tensor w_proj, b_proj;
};

// Pre-norm decoder blocks, learned absolute positions, GELU MLP, untied head.
struct ModelState {
    ModelConfig cfg;
    Tensor wte;  // (vocab_size + 1) x d, last row = PAD embedding
    Tensor wpe;  // max_seq_len x d
    std::vector<LayerParams> layers;
    Tensor lnf_g, lnf_b;
    Tensor w_head, b_head;  // d x out_dim, 1 x out_dim
    int n_tensors = 0;

    static ModelState init(const ModelConfig& cfg, std::uint64_t seed);

    template <class F>
    void for_each_tensor(F&& f) {
        f(wte);
        f(wpe);
        for (auto& l : layers) {
            f(l.ln1_g); f(l.ln1_b);
            f(l.w_qkv); f(l.b_qkv);
            f(l.w_o); f(l.b_o);
            f(l.ln2_g); f(l.ln2_b);
            f(l.w_fc); f(l.b_fc);
            f(l.w_proj); f(l.b_proj);
        }
        f(lnf_g); f(lnf_b);
        f(w_head); f(b_head);
    }
    template <class F>
    void for_each_tensor(F&& f) const {
        const_cast<ModelState*>(this)->for_each_tensor(
            [&](Tensor& t) { f(static_cast<const Tensor&>(t)); });
    }

    long long num_params() const;
};

// Per-tensor gradient buffers keyed by Tensor::idx; reducing several stores
// in a fixed order keeps batched training deterministic.
struct GradStore {
    std::vector<Eigen::MatrixXd> g;

    GradStore() = default;
    explicit GradStore(const ModelState& m);
    void zero();
    void add(const GradStore& other);
    Eigen::MatrixXd& operator[](const Tensor& t) { return g[t.idx]; }
    const Eigen::MatrixXd& operator[](const Tensor& t) const { return g[t.idx]; }
    double global_norm() const;
    void scale(double s);
};

struct LnCache {
    Eigen::MatrixXd xhat;
    Eigen::VectorXd inv_std;
};

struct LayerCache {
    Eigen::MatrixXd x_in;     // input to the block
    LnCache ln1;
    Eigen::MatrixXd qkv;      // T x 3d
    std::vector<Eigen::MatrixXd> att_probs;  // per head, T x T (causal rows)
    Eigen::MatrixXd att_out;  // concatenated head outputs, T x d
    Eigen::MatrixXd x_mid;    // after attention residual
    LnCache ln2;
    Eigen::MatrixXd fc_pre;   // T x 4d
    Eigen::MatrixXd fc_act;
    Eigen::MatrixXd drop_att, drop_mlp;  // dropout factors when active
};

struct ForwardCache {
    std::vector<int> ids;
    Eigen::MatrixXd x0;
    Eigen::MatrixXd drop_emb;
    std::vector<LayerCache> layers;
    LnCache lnf;
    Eigen::MatrixXd h;       // T x d, post final LayerNorm
    Eigen::MatrixXd logits;  // T x out_dim
    int T() const { return static_cast<int>(ids.size()); }
    Eigen::VectorXd final_hidden() const { return h.row(h.rows() - 1); }
};

// Causal forward pass; logits row t conditions on ids[0..t]. Dropout is
// applied only when training and cfg.dropout_rate > 0, with masks drawn
// from dropout_seed and cached for backward.
ForwardCache forward(const ModelState& m, const std::vector<int>& ids, bool training = false,
                     std::uint64_t dropout_seed = 0);

// Backward through the cached pass. dlogits feeds the head; dh_extra is an
// optional extra gradient at the post-final-LayerNorm activations (used by
// the classification head). Gradients accumulate into gs.
void backward(const ModelState& m, const ForwardCache& cache, const Eigen::MatrixXd* dlogits,
              const Eigen::MatrixXd* dh_extra, GradStore& gs);

struct NllResult {
    double loss_sum = 0.0;  // sum of -log p over scored positions
    long long count = 0;    // scored positions (targets 2..L, pads excluded)
    double mean() const { return count > 0 ? loss_sum / count : 0.0; }
};

// Scores positions 2..L; targets equal to skip_id (PAD) contribute nothing.
NllResult nll_from_logits(const Eigen::MatrixXd& logits, const std::vector<int>& ids,
                          int skip_id);

// Forward + NLL; if gs != null also backward, with dlogits scaled by
// grad_scale (callers pass 1/total_token_count for a batch-mean gradient).
NllResult nll_loss_and_grad(const ModelState& m, const std::vector<int>& ids, GradStore* gs,
                            double grad_scale = 1.0, int skip_id = -1);

// Row-wise log-softmax (useful for PPO log-prob extraction).
Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& logits);

struct SampleResult {
    std::vector<int> ids;
    bool truncated = false;
};

// Ancestral sampling from SOG until EOG or max_len (KV-cached incremental
// forward). With use_mask, grammar-illegal tokens get probability zero.
SampleResult sample(const ModelState& m, const Vocabulary& v, int max_len, double temperature,
                    bool use_mask, std::uint64_t seed);

// --- checkpointing: manifest.txt + vocab.txt + params.bin (LE float64) ---
void save_checkpoint(const std::string& dir, const ModelState& m, const Vocabulary& v,
                     std::uint64_t rng_seed, long long step_count);
ModelState load_checkpoint(const std::string& dir, Vocabulary* vocab_out = nullptr,
                           std::uint64_t* rng_seed_out = nullptr,
                           long long* step_count_out = nullptr);

}  // namespace ggen
