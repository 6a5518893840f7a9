#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ggen/codec.hpp"
#include "ggen/graph.hpp"
#include "ggen/model.hpp"
#include "ggen/train.hpp"

namespace ggen {

// Synthetic graph-property oracles: edge_count, triangle_count,
// clustering_global (transitivity).
struct PropertyOracle {
    std::string name;
    std::function<double(const Graph&)> evaluate;
};

PropertyOracle make_oracle(const std::string& name);  // throws ConfigError

struct AcceptanceFn {
    double target = 0.0;
    double tolerance = 1.0;  // omega > 0

    bool accept(double z) const;
    bool accept(const Graph& g, const PropertyOracle& oracle) const;
};

// Bounded monotone shaping toward the target: invalid decodes get 0, valid
// ones max(floor, 1 - |target - z| / scale).
struct RewardShaping {
    double target = 0.0;
    double scale = 5.0;
    double floor = 0.2;
};

double reward_fn(const DecodeReport& report, const PropertyOracle& oracle,
                 const RewardShaping& shaping);

// --- rejection-sampling fine-tuning ---

struct RftOptions {
    long long attempt_cap_per_target = 1000;  // cap = this * B raw samples
    double temperature = 1.0;
    int max_len = 0;  // 0 = model max_seq_len
    std::uint64_t seed = 0;
};

struct RftResult {
    std::vector<Graph> accepted;
    long long attempts = 0;
    double acceptance_rate = 0.0;
};

// Samples until B graphs pass decode validity and the acceptance function.
// Throws NumericalError (advising a looser tolerance / the SBS path) when
// the attempt cap is reached first.
RftResult rft_collect(const ModelState& model, const Vocabulary& v,
                      const PropertyOracle& oracle, const AcceptanceFn& accept, int B,
                      const RftOptions& opts);

struct SbsRound {
    double omega = 0.0;
    double acceptance_rate = 0.0;  // of the model entering the round
    double mean_abs_err = 0.0;     // |target - z| over that round's raw valid samples
};

// k rounds of collect -> fine-tune with strictly decreasing tolerances;
// parameters carry forward. Round stats are appended to rounds_out.
void rft_sbs(ModelState& model, const Vocabulary& v, const PropertyOracle& oracle,
             double target, const std::vector<double>& tolerances, int B,
             const TrainConfig& finetune_cfg, const RftOptions& opts,
             std::vector<SbsRound>* rounds_out = nullptr);

// Mean |target - z| and acceptance rate of a model estimated over n samples.
struct SampledFit {
    double mean_abs_err = 0.0;
    double acceptance_rate = 0.0;
    double mean_reward = 0.0;
    int n_valid = 0;
};
SampledFit measure_fit(const ModelState& model, const Vocabulary& v,
                       const PropertyOracle& oracle, const AcceptanceFn& accept,
                       const RewardShaping& shaping, int n, const RftOptions& opts);

// --- PPO ---

// Backward recursion A_l = delta_l + gamma*lambda*A_{l+1} with
// delta_l = r_l + gamma*V_{l+1} - V_l and terminal bootstrap V = 0.
std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values,
                        double gamma, double lambda);

// min(ratio*adv, clip(ratio, 1-eps, 1+eps)*adv)
double clipped_surrogate(double ratio, double advantage, double eps);

struct PpoConfig {
    double gamma = 1.0;
    double lambda = 1.0;
    double rho1 = 0.03;  // KL-in-reward coefficient
    double rho2 = 0.5;   // critic loss weight
    double rho3 = 0.03;  // pretraining loss weight
    double clip_eps = 0.2;
    double actor_lr = 1e-4;
    double critic_lr = 1e-4;
    double grad_clip = 1.0;
    int iterations = 1000;
    int batch_size = 16;
    int ppo_epochs = 1;
    int pt_batch = 4;      // sequences of pretraining data mixed in per iter
    double temperature = 1.0;
    int max_len = 0;
    bool advantage_norm = false;
    bool reward_norm = false;
    std::uint64_t seed = 0;
    int log_every = 50;

    void validate() const;
};

// Per-action view of one sampled episode (actions are tokens after SOG).
struct Trajectory {
    std::vector<int> ids;
    std::vector<double> logp_actor;  // log p(action) under the sampling actor
    std::vector<double> logp_ref;
    std::vector<double> values;      // V(state before action), critic at sampling time
    std::vector<double> kl;          // KL(actor || reference) after each action
    double terminal_reward = 0.0;
    bool truncated = false;

    int n_actions() const { return static_cast<int>(logp_actor.size()); }
    // r^{rho1}_l = r_l - rho1 * KL_l; terminal reward lands on the last action.
    std::vector<double> shaped_rewards(double rho1) const;
};

struct PpoIterStats {
    int iter = 0;
    double mean_reward = 0.0;  // raw terminal reward
    double mean_kl = 0.0;
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    int skipped = 0;  // episodes dropped for non-finite ratio/advantage
};

// One optimization pass over a sampled batch: shaped rewards, GAE, clipped
// surrogate + rho2 * MAE critic loss + rho3 * pretraining loss.
PpoIterStats ppo_step(ModelState& actor, ModelState& critic, const ModelState& reference,
                      const std::vector<Trajectory>& batch,
                      const std::vector<std::vector<int>>& pt_seqs, const Vocabulary& v,
                      const PpoConfig& cfg, AdamW& actor_opt, AdamW& critic_opt);

Trajectory sample_trajectory(const ModelState& actor, const ModelState& critic,
                             const ModelState& reference, const Vocabulary& v,
                             const PropertyOracle& oracle, const RewardShaping& shaping,
                             const PpoConfig& cfg, std::uint64_t seed);

struct PpoResult {
    std::vector<PpoIterStats> trace;
    ModelState critic;
};

// Full loop: sample -> ppo_step, critic initialized from the actor's
// pretrained weights with a fresh value head.
PpoResult run_ppo(ModelState& actor, const Vocabulary& v, const PropertyOracle& oracle,
                  const RewardShaping& shaping, const std::vector<std::vector<int>>& pt_seqs,
                  const PpoConfig& cfg,
                  const std::function<void(const PpoIterStats&)>& on_log = nullptr);

// --- property-prediction head ---

struct ClassifyConfig {
    int epochs = 30;
    int batch_size = 16;
    double head_lr = 1e-4;
    double block_lr = 1e-6;   // last ceil(n_layers/2) blocks; the rest frozen
    double dropout = 0.5;     // on the head logits, as p(y|s)=Softmax(Dropout(Linear(h)))
    std::uint64_t seed = 0;

    void validate() const;
};

struct Classifier {
    ModelState model;
    Eigen::MatrixXd w;       // d x C
    Eigen::RowVectorXd b;    // 1 x C
    std::vector<int> labels; // class index -> original label value
};

struct ClassifyResult {
    Classifier clf;
    std::vector<double> loss_trace;  // per epoch mean CE
    double train_accuracy = 0.0;
};

ClassifyResult classify_finetune(const ModelState& backbone, const Vocabulary& v,
                                 const std::vector<LabeledGraph>& train,
                                 const ClassifyConfig& cfg);

int classify_predict(const Classifier& clf, const Vocabulary& v, const Graph& g,
                     std::uint64_t encode_seed);
double classify_accuracy(const Classifier& clf, const Vocabulary& v,
                         const std::vector<LabeledGraph>& data, std::uint64_t encode_seed);

int first_unlocked_layer(int n_layers);  // n_layers - ceil(n_layers/2)

}  // namespace ggen
