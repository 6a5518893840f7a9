#include "ggen/finetune.hpp"

#include <algorithm>
#include <cmath>

#include "ggen/errors.hpp"
#include "ggen/parallel.hpp"
#include "ggen/rng.hpp"
#include "ggen/stats.hpp"

namespace ggen {

PropertyOracle make_oracle(const std::string& name) {
    if (name == "edge_count")
        return {name, [](const Graph& g) { return static_cast<double>(g.m()); }};
    if (name == "triangle_count")
        return {name, [](const Graph& g) {
                    auto orbits = orbit_counts(g);
                    long long t = 0;
                    for (int i = 1; i <= g.n; ++i) t += orbits[i][3];
                    return static_cast<double>(t / 3);
                }};
    if (name == "clustering_global")
        return {name, [](const Graph& g) {
                    auto orbits = orbit_counts(g);
                    long long tri = 0, wedges = 0;
                    for (int i = 1; i <= g.n; ++i) {
                        tri += orbits[i][3];
                        wedges += orbits[i][2] + orbits[i][3];  // open + closed
                    }
                    return wedges > 0 ? static_cast<double>(tri) / wedges : 0.0;
                }};
    throw ConfigError("unknown oracle: " + name);
}

bool AcceptanceFn::accept(double z) const { return std::abs(target - z) < tolerance; }

bool AcceptanceFn::accept(const Graph& g, const PropertyOracle& oracle) const {
    return accept(oracle.evaluate(g));
}

double reward_fn(const DecodeReport& report, const PropertyOracle& oracle,
                 const RewardShaping& shaping) {
    if (!report.valid_syntax) return 0.0;
    double z = oracle.evaluate(*report.graph);
    return std::max(shaping.floor, 1.0 - std::abs(shaping.target - z) / shaping.scale);
}

namespace {

int effective_max_len(int requested, const ModelState& m) {
    return requested > 0 ? std::min(requested, m.cfg.max_seq_len) : m.cfg.max_seq_len;
}

}  // namespace

RftResult rft_collect(const ModelState& model, const Vocabulary& v,
                      const PropertyOracle& oracle, const AcceptanceFn& accept, int B,
                      const RftOptions& opts) {
    if (B < 1) throw ConfigError("rft_collect: B must be positive");
    if (accept.tolerance <= 0) throw ConfigError("rft_collect: tolerance must be positive");
    const long long cap = opts.attempt_cap_per_target * B;
    const int max_len = effective_max_len(opts.max_len, model);

    RftResult result;
    const int wave = std::max(16, 4 * num_threads());
    while (static_cast<int>(result.accepted.size()) < B) {
        if (result.attempts >= cap)
            throw NumericalError(
                "rft_collect: attempt cap reached at acceptance rate " +
                std::to_string(result.attempts > 0
                                   ? static_cast<double>(result.accepted.size()) /
                                         result.attempts
                                   : 0.0) +
                "; loosen the tolerance or use the staged (SBS) path");
        int n = static_cast<int>(std::min<long long>(wave, cap - result.attempts));
        std::vector<SampleResult> wave_samples(n);
        long long base = result.attempts;
        parallel_chunks(n, 16, [&](int, int begin, int end) {
            for (int i = begin; i < end; ++i)
                wave_samples[i] = sample(model, v, max_len, opts.temperature, false,
                                         mix_seed(opts.seed, 0xacce97, base + i));
        });
        result.attempts += n;
        for (int i = 0; i < n && static_cast<int>(result.accepted.size()) < B; ++i) {
            DecodeReport rep = decode_ids(wave_samples[i].ids, v);
            if (!rep.valid_syntax) continue;
            if (accept.accept(*rep.graph, oracle)) result.accepted.push_back(*rep.graph);
        }
    }
    result.acceptance_rate =
        result.attempts > 0 ? static_cast<double>(B) / result.attempts : 0.0;
    return result;
}

SampledFit measure_fit(const ModelState& model, const Vocabulary& v,
                       const PropertyOracle& oracle, const AcceptanceFn& accept,
                       const RewardShaping& shaping, int n, const RftOptions& opts) {
    const int max_len = effective_max_len(opts.max_len, model);
    std::vector<SampleResult> samples(n);
    parallel_chunks(n, 16, [&](int, int begin, int end) {
        for (int i = begin; i < end; ++i)
            samples[i] = sample(model, v, max_len, opts.temperature, false,
                                mix_seed(opts.seed, 0x3a57f1, i));
    });
    SampledFit fit;
    int accepted = 0;
    double err = 0.0, reward = 0.0;
    for (const auto& s : samples) {
        DecodeReport rep = decode_ids(s.ids, v);
        reward += reward_fn(rep, oracle, shaping);
        if (!rep.valid_syntax) continue;
        double z = oracle.evaluate(*rep.graph);
        err += std::abs(accept.target - z);
        fit.n_valid++;
        if (accept.accept(z)) accepted++;
    }
    fit.acceptance_rate = static_cast<double>(accepted) / n;
    fit.mean_abs_err = fit.n_valid > 0 ? err / fit.n_valid : -1.0;
    fit.mean_reward = reward / n;
    return fit;
}

void rft_sbs(ModelState& model, const Vocabulary& v, const PropertyOracle& oracle,
             double target, const std::vector<double>& tolerances, int B,
             const TrainConfig& finetune_cfg, const RftOptions& opts,
             std::vector<SbsRound>* rounds_out) {
    if (tolerances.empty()) throw ConfigError("rft_sbs: need at least one tolerance");
    for (std::size_t i = 1; i < tolerances.size(); ++i)
        if (tolerances[i] >= tolerances[i - 1])
            throw ConfigError("rft_sbs: tolerances must be strictly decreasing");

    for (std::size_t round = 0; round < tolerances.size(); ++round) {
        AcceptanceFn accept{target, tolerances[round]};
        RftOptions ropts = opts;
        ropts.seed = mix_seed(opts.seed, 0x5b5, round);
        RftResult collected;
        try {
            collected = rft_collect(model, v, oracle, accept, B, ropts);
        } catch (const NumericalError& e) {
            throw NumericalError("rft_sbs round " + std::to_string(round + 1) + ": " +
                                 e.what());
        }
        if (rounds_out) {
            SbsRound r;
            r.omega = tolerances[round];
            r.acceptance_rate = collected.acceptance_rate;
            double err = 0.0;
            for (const Graph& g : collected.accepted)
                err += std::abs(target - oracle.evaluate(g));
            r.mean_abs_err = err / collected.accepted.size();
            rounds_out->push_back(r);
        }
        TrainConfig cfg = finetune_cfg;
        cfg.seed = mix_seed(finetune_cfg.seed, 0xf17e, round);
        auto seqs = build_sequence_dataset(collected.accepted, v, cfg.ordering,
                                           cfg.augmentations_per_graph, cfg.seed);
        train_model(model, v, seqs, {}, cfg);
    }
}

std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values,
                        double gamma, double lambda) {
    if (rewards.size() != values.size()) throw ConfigError("gae: misaligned inputs");
    const int n = static_cast<int>(rewards.size());
    std::vector<double> adv(n, 0.0);
    double running = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        double v_next = i + 1 < n ? values[i + 1] : 0.0;
        double delta = rewards[i] + gamma * v_next - values[i];
        running = delta + gamma * lambda * running;
        adv[i] = running;
    }
    return adv;
}

double clipped_surrogate(double ratio, double advantage, double eps) {
    double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
    return std::min(ratio * advantage, clipped * advantage);
}

void PpoConfig::validate() const {
    if (gamma < 0 || gamma > 1 || lambda < 0 || lambda > 1)
        throw ConfigError("ppo: gamma/lambda must lie in [0,1]");
    if (clip_eps <= 0 || clip_eps >= 1) throw ConfigError("ppo: clip_eps must lie in (0,1)");
    if (rho1 < 0 || rho2 < 0 || rho3 < 0) throw ConfigError("ppo: coefficients must be >= 0");
    if (iterations < 1 || batch_size < 1 || ppo_epochs < 1)
        throw ConfigError("ppo: iterations/batch sizes must be positive");
}

std::vector<double> Trajectory::shaped_rewards(double rho1) const {
    std::vector<double> r(n_actions(), 0.0);
    if (!r.empty()) r.back() = terminal_reward;
    for (int i = 0; i < n_actions(); ++i) r[i] -= rho1 * kl[i];
    return r;
}

Trajectory sample_trajectory(const ModelState& actor, const ModelState& critic,
                             const ModelState& reference, const Vocabulary& v,
                             const PropertyOracle& oracle, const RewardShaping& shaping,
                             const PpoConfig& cfg, std::uint64_t seed) {
    Trajectory traj;
    SampleResult s =
        sample(actor, v, effective_max_len(cfg.max_len, actor), cfg.temperature, false, seed);
    traj.ids = std::move(s.ids);
    traj.truncated = s.truncated;
    traj.terminal_reward = reward_fn(decode_ids(traj.ids, v), oracle, shaping);

    const int t_len = static_cast<int>(traj.ids.size());
    const int n_act = t_len - 1;
    Eigen::MatrixXd la = log_softmax_rows(forward(actor, traj.ids).logits);
    Eigen::MatrixXd lr = log_softmax_rows(forward(reference, traj.ids).logits);
    Eigen::MatrixXd values = forward(critic, traj.ids).logits;  // T x 1

    traj.logp_actor.resize(n_act);
    traj.logp_ref.resize(n_act);
    traj.values.resize(n_act);
    traj.kl.resize(n_act);
    for (int t = 1; t < t_len; ++t) {
        traj.logp_actor[t - 1] = la(t - 1, traj.ids[t] - 1);
        traj.logp_ref[t - 1] = lr(t - 1, traj.ids[t] - 1);
        traj.values[t - 1] = values(t - 1, 0);
        // next-token KL after consuming token t: row t of both log-softmaxes
        double kl = 0.0;
        for (int j = 0; j < la.cols(); ++j) kl += std::exp(la(t, j)) * (la(t, j) - lr(t, j));
        traj.kl[t - 1] = kl;
    }
    return traj;
}

PpoIterStats ppo_step(ModelState& actor, ModelState& critic, const ModelState& reference,
                      const std::vector<Trajectory>& batch,
                      const std::vector<std::vector<int>>& pt_seqs, const Vocabulary& v,
                      const PpoConfig& cfg, AdamW& actor_opt, AdamW& critic_opt) {
    (void)reference;  // KL is folded into rewards at sampling time
    PpoIterStats stats;

    // Advantage/target precompute, with optional batch-level normalization.
    struct Prepared {
        std::vector<double> adv, target;
        bool ok = true;
    };
    std::vector<Prepared> prep(batch.size());
    std::vector<double> all_adv;
    long long total_actions = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Trajectory& tr = batch[i];
        std::vector<double> shaped = tr.shaped_rewards(cfg.rho1);
        if (cfg.reward_norm && !shaped.empty()) {
            double m = 0.0;
            for (double r : shaped) m = std::max(m, std::abs(r));
            if (m > 1.0)
                for (double& r : shaped) r /= m;
        }
        prep[i].adv = gae(shaped, tr.values, cfg.gamma, cfg.lambda);
        prep[i].target.resize(tr.n_actions());
        for (int t = 0; t < tr.n_actions(); ++t) {
            prep[i].target[t] = prep[i].adv[t] + tr.values[t];
            if (!std::isfinite(prep[i].adv[t])) prep[i].ok = false;
        }
        if (!prep[i].ok) {
            stats.skipped++;
            continue;
        }
        total_actions += tr.n_actions();
        for (double a : prep[i].adv) all_adv.push_back(a);
        stats.mean_reward += tr.terminal_reward;
        for (double k : tr.kl) stats.mean_kl += k;
    }
    stats.mean_reward /= static_cast<double>(batch.size());
    if (total_actions > 0) stats.mean_kl /= static_cast<double>(total_actions);

    if (cfg.advantage_norm && all_adv.size() > 1) {
        double mean = 0.0, var = 0.0;
        for (double a : all_adv) mean += a;
        mean /= all_adv.size();
        for (double a : all_adv) var += (a - mean) * (a - mean);
        double sd = std::sqrt(var / all_adv.size()) + 1e-8;
        for (auto& p : prep)
            for (double& a : p.adv) a = (a - mean) / sd;
    }
    if (total_actions == 0) return stats;
    const double inv_n = 1.0 / static_cast<double>(total_actions);

    for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
        GradStore actor_grads(actor), critic_grads(critic);
        const int nb = static_cast<int>(batch.size());
        std::vector<GradStore> a_chunks, c_chunks;
        std::vector<double> aloss(16, 0.0), closs(16, 0.0);
        for (int c = 0; c < 16; ++c) {
            a_chunks.emplace_back();
            c_chunks.emplace_back();
        }
        parallel_chunks(nb, 16, [&](int chunk, int begin, int end) {
            a_chunks[chunk] = GradStore(actor);
            c_chunks[chunk] = GradStore(critic);
            for (int i = begin; i < end; ++i) {
                const Trajectory& tr = batch[i];
                if (!prep[i].ok) continue;
                const int t_len = static_cast<int>(tr.ids.size());

                ForwardCache ca = forward(actor, tr.ids);
                Eigen::MatrixXd la = log_softmax_rows(ca.logits);
                Eigen::MatrixXd dlogits_a =
                    Eigen::MatrixXd::Zero(t_len, actor.cfg.out_dim());
                bool bad = false;
                for (int t = 1; t < t_len && !bad; ++t) {
                    double logp_new = la(t - 1, tr.ids[t] - 1);
                    double ratio = std::exp(logp_new - tr.logp_actor[t - 1]);
                    double adv = prep[i].adv[t - 1];
                    if (!std::isfinite(ratio)) {
                        bad = true;
                        break;
                    }
                    double unclipped = ratio * adv;
                    double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps,
                                                1.0 + cfg.clip_eps) * adv;
                    aloss[chunk] -= std::min(unclipped, clipped) * inv_n;
                    // gradient of min(...) wrt logp: ratio*adv when the
                    // unclipped branch is active or the ratio is inside the
                    // clip band, else 0
                    bool active = unclipped <= clipped ||
                                  (ratio > 1.0 - cfg.clip_eps && ratio < 1.0 + cfg.clip_eps);
                    if (!active) continue;
                    double dlogp = -ratio * adv * inv_n;
                    Eigen::ArrayXd p = la.row(t - 1).array().exp();
                    dlogits_a.row(t - 1) += (dlogp * (-p)).matrix();
                    dlogits_a(t - 1, tr.ids[t] - 1) += dlogp;
                }
                if (bad) continue;
                backward(actor, ca, &dlogits_a, nullptr, a_chunks[chunk]);

                ForwardCache cc = forward(critic, tr.ids);
                Eigen::MatrixXd dvalues = Eigen::MatrixXd::Zero(t_len, 1);
                for (int t = 1; t < t_len; ++t) {
                    double diff = cc.logits(t - 1, 0) - prep[i].target[t - 1];
                    closs[chunk] += cfg.rho2 * std::abs(diff) * inv_n;
                    double sign = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
                    dvalues(t - 1, 0) = cfg.rho2 * sign * inv_n;
                }
                backward(critic, cc, &dvalues, nullptr, c_chunks[chunk]);
            }
        });
        for (int c = 0; c < std::min(16, nb); ++c) {
            actor_grads.add(a_chunks[c]);
            critic_grads.add(c_chunks[c]);
            stats.actor_loss += aloss[c];
            stats.critic_loss += closs[c];
        }

        if (cfg.rho3 > 0 && !pt_seqs.empty()) {
            std::vector<std::vector<int>> pt_batch;
            Rng pick = make_rng(mix_seed(cfg.seed, 0x97ba7c4, actor_opt.t));
            for (int i = 0; i < cfg.pt_batch; ++i)
                pt_batch.push_back(pt_seqs[pick() % pt_seqs.size()]);
            GradStore pt_grads(actor);
            NllResult r = batch_loss_and_grad(actor, pt_batch, &pt_grads, v.pad_id());
            pt_grads.scale(cfg.rho3);
            actor_grads.add(pt_grads);
            stats.actor_loss += cfg.rho3 * r.mean();
        }

        clip_gradients(actor_grads, cfg.grad_clip);
        clip_gradients(critic_grads, cfg.grad_clip);
        actor_opt.step(actor, actor_grads, cfg.actor_lr);
        critic_opt.step(critic, critic_grads, cfg.critic_lr);
    }
    return stats;
}

PpoResult run_ppo(ModelState& actor, const Vocabulary& v, const PropertyOracle& oracle,
                  const RewardShaping& shaping, const std::vector<std::vector<int>>& pt_seqs,
                  const PpoConfig& cfg, const std::function<void(const PpoIterStats&)>& on_log) {
    cfg.validate();
    const ModelState reference = actor;  // frozen copy

    PpoResult result;
    ModelConfig critic_cfg = actor.cfg;
    critic_cfg.head_dim = 1;
    result.critic = ModelState::init(critic_cfg, mix_seed(cfg.seed, 0xc417));
    // critic initialized from the pretrained weights; value head stays fresh
    {
        std::vector<const Tensor*> src;
        actor.for_each_tensor([&](const Tensor& t) { src.push_back(&t); });
        std::size_t i = 0;
        result.critic.for_each_tensor([&](Tensor& t) {
            const Tensor& s = *src[i++];
            if (t.name != "w_head" && t.name != "b_head") t.v = s.v;
        });
    }

    AdamW actor_opt(actor, 0.9, 0.95, 1e-8, 0.0);
    AdamW critic_opt(result.critic, 0.9, 0.95, 1e-8, 0.0);

    for (int iter = 1; iter <= cfg.iterations; ++iter) {
        std::vector<Trajectory> batch(cfg.batch_size);
        parallel_chunks(cfg.batch_size, 16, [&](int, int begin, int end) {
            for (int i = begin; i < end; ++i)
                batch[i] = sample_trajectory(actor, result.critic, reference, v, oracle,
                                             shaping, cfg, mix_seed(cfg.seed, iter, i));
        });
        PpoIterStats stats = ppo_step(actor, result.critic, reference, batch, pt_seqs, v, cfg,
                                      actor_opt, critic_opt);
        stats.iter = iter;
        result.trace.push_back(stats);
        if (on_log && (iter % cfg.log_every == 0 || iter == cfg.iterations)) on_log(stats);
    }
    return result;
}

int first_unlocked_layer(int n_layers) { return n_layers - (n_layers + 1) / 2; }

void ClassifyConfig::validate() const {
    if (epochs < 1 || batch_size < 1) throw ConfigError("classify: epochs/batch must be positive");
    if (dropout < 0 || dropout >= 1) throw ConfigError("classify: dropout must lie in [0,1)");
}

namespace {

struct HeadAdam {
    Eigen::MatrixXd mw, vw;
    Eigen::RowVectorXd mb, vb;
    long long t = 0;
    double beta1 = 0.9, beta2 = 0.95, eps = 1e-8;

    HeadAdam(Eigen::Index d, Eigen::Index c) {
        mw.setZero(d, c);
        vw.setZero(d, c);
        mb.setZero(c);
        vb.setZero(c);
    }
    void step(Eigen::MatrixXd& w, Eigen::RowVectorXd& b, const Eigen::MatrixXd& gw,
              const Eigen::RowVectorXd& gb, double lr) {
        t++;
        double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        mw = beta1 * mw + (1 - beta1) * gw;
        vw = beta2 * vw + (1 - beta2) * gw.cwiseProduct(gw);
        w.array() -= lr * (mw.array() / bc1) / ((vw.array() / bc2).sqrt() + eps);
        mb = beta1 * mb + (1 - beta1) * gb;
        vb = beta2 * vb + (1 - beta2) * gb.cwiseProduct(gb);
        b.array() -= lr * (mb.array() / bc1) / ((vb.array() / bc2).sqrt() + eps);
    }
};

}  // namespace

ClassifyResult classify_finetune(const ModelState& backbone, const Vocabulary& v,
                                 const std::vector<LabeledGraph>& train,
                                 const ClassifyConfig& cfg) {
    cfg.validate();
    if (train.empty()) throw DataError("classify: empty training set");

    ClassifyResult result;
    result.clf.model = backbone;
    ModelState& model = result.clf.model;
    const int d = model.cfg.d_model;

    for (const LabeledGraph& lg : train)
        if (!lg.label) throw DataError("classify: unlabeled graph in training data");
    std::vector<int>& labels = result.clf.labels;
    for (const LabeledGraph& lg : train)
        if (std::find(labels.begin(), labels.end(), *lg.label) == labels.end())
            labels.push_back(*lg.label);
    std::sort(labels.begin(), labels.end());
    const int n_classes = static_cast<int>(labels.size());
    auto class_of = [&](int label) {
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw DataError("classify: label outside declared set");
        return static_cast<int>(it - labels.begin());
    };

    Rng init_rng = make_rng(mix_seed(cfg.seed, 0x4ead));
    result.clf.w.setZero(d, n_classes);
    for (Eigen::Index i = 0; i < d; ++i)
        for (int j = 0; j < n_classes; ++j) {
            double u1 = 1.0 - rand_unit(init_rng), u2 = rand_unit(init_rng);
            result.clf.w(i, j) = 0.02 * std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
        }
    result.clf.b.setZero(n_classes);

    // Fixed encodings per graph; the backbone sees one sequence per sample.
    std::vector<std::vector<int>> seqs(train.size());
    std::vector<int> targets(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        auto toks = encode(train[i].graph, mix_seed(cfg.seed, 0xe2c, i), OrderPolicy::degree,
                           mix_seed(cfg.seed, 0xe3c, i));
        seqs[i] = tokenize_all(toks, v);
        targets[i] = class_of(*train[i].label);
    }

    const int unlock_from = first_unlocked_layer(model.cfg.n_layers);
    auto lr_for = [&](const Tensor& t) {
        for (int l = unlock_from; l < model.cfg.n_layers; ++l)
            if (t.name.rfind("layer" + std::to_string(l) + ".", 0) == 0) return cfg.block_lr;
        return 0.0;  // embeddings, early blocks, final LN, LM head stay frozen
    };

    AdamW block_opt(model, 0.9, 0.95, 1e-8, 0.0);
    HeadAdam head_opt(d, n_classes);
    Rng order_rng = make_rng(mix_seed(cfg.seed, 0x0d7));
    std::vector<int> idx(train.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);

    long long step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_vec(idx, order_rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < idx.size(); start += cfg.batch_size) {
            std::size_t end_i = std::min(idx.size(), start + cfg.batch_size);
            const int nb = static_cast<int>(end_i - start);
            step++;

            std::vector<GradStore> chunks;
            std::vector<Eigen::MatrixXd> gw(16, Eigen::MatrixXd::Zero(d, n_classes));
            std::vector<Eigen::RowVectorXd> gb(16, Eigen::RowVectorXd::Zero(n_classes));
            std::vector<double> loss(16, 0.0);
            for (int c = 0; c < 16; ++c) chunks.emplace_back();
            const double inv_n = 1.0 / nb;
            parallel_chunks(nb, 16, [&](int chunk, int begin, int end) {
                chunks[chunk] = GradStore(model);
                for (int bi = begin; bi < end; ++bi) {
                    int si = idx[start + bi];
                    ForwardCache cache = forward(model, seqs[si]);
                    Eigen::VectorXd h = cache.final_hidden();
                    Eigen::RowVectorXd z = h.transpose() * result.clf.w + result.clf.b;
                    // p(y|s) = Softmax(Dropout(Linear(h)))
                    Eigen::RowVectorXd factors = Eigen::RowVectorXd::Ones(n_classes);
                    if (cfg.dropout > 0) {
                        Rng drng = make_rng(mix_seed(cfg.seed, step, si));
                        for (int j = 0; j < n_classes; ++j)
                            factors[j] = rand_unit(drng) < cfg.dropout
                                             ? 0.0
                                             : 1.0 / (1.0 - cfg.dropout);
                        z = z.cwiseProduct(factors);
                    }
                    double mx = z.maxCoeff();
                    Eigen::ArrayXd p = (z.array() - mx).exp().transpose();
                    p /= p.sum();
                    loss[chunk] -= std::log(std::max(p[targets[si]], 1e-300)) * inv_n;

                    Eigen::RowVectorXd dz = p.transpose().matrix() * inv_n;
                    dz[targets[si]] -= inv_n;
                    dz = dz.cwiseProduct(factors);
                    gw[chunk] += h * dz;
                    gb[chunk] += dz;
                    Eigen::MatrixXd dh_all =
                        Eigen::MatrixXd::Zero(cache.T(), model.cfg.d_model);
                    dh_all.row(cache.T() - 1) = (result.clf.w * dz.transpose()).transpose();
                    backward(model, cache, nullptr, &dh_all, chunks[chunk]);
                }
            });
            GradStore grads(model);
            Eigen::MatrixXd gw_total = Eigen::MatrixXd::Zero(d, n_classes);
            Eigen::RowVectorXd gb_total = Eigen::RowVectorXd::Zero(n_classes);
            for (int c = 0; c < std::min(16, nb); ++c) {
                grads.add(chunks[c]);
                gw_total += gw[c];
                gb_total += gb[c];
                epoch_loss += loss[c];
            }
            block_opt.step(model, grads, lr_for);
            head_opt.step(result.clf.w, result.clf.b, gw_total, gb_total, cfg.head_lr);
        }
        result.loss_trace.push_back(epoch_loss /
                                    std::ceil(static_cast<double>(idx.size()) / cfg.batch_size));
    }

    int correct = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        ForwardCache cache = forward(model, seqs[i]);
        Eigen::RowVectorXd z =
            cache.final_hidden().transpose() * result.clf.w + result.clf.b;
        int arg = 0;
        z.maxCoeff(&arg);
        if (arg == targets[i]) correct++;
    }
    result.train_accuracy = static_cast<double>(correct) / train.size();
    return result;
}

int classify_predict(const Classifier& clf, const Vocabulary& v, const Graph& g,
                     std::uint64_t encode_seed) {
    auto toks = encode(g, mix_seed(encode_seed, 0xe2c), OrderPolicy::degree,
                       mix_seed(encode_seed, 0xe3c));
    ForwardCache cache = forward(clf.model, tokenize_all(toks, v));
    Eigen::RowVectorXd z = cache.final_hidden().transpose() * clf.w + clf.b;
    int arg = 0;
    z.maxCoeff(&arg);
    return clf.labels[arg];
}

double classify_accuracy(const Classifier& clf, const Vocabulary& v,
                         const std::vector<LabeledGraph>& data, std::uint64_t encode_seed) {
    if (data.empty()) return 0.0;
    std::vector<int> correct(16, 0);
    parallel_chunks(static_cast<int>(data.size()), 16, [&](int chunk, int begin, int end) {
        for (int i = begin; i < end; ++i) {
            int pred = classify_predict(clf, v, data[i].graph, mix_seed(encode_seed, i));
            if (data[i].label && pred == *data[i].label) correct[chunk]++;
        }
    });
    int total = 0;
    for (int c : correct) total += c;
    return static_cast<double>(total) / data.size();
}

}  // namespace ggen
