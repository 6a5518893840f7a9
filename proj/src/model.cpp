#include "ggen/model.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ggen/codec.hpp"
#include "ggen/errors.hpp"
#include "ggen/rng.hpp"

namespace ggen {

namespace {

constexpr double kLnEps = 1e-5;

double rand_normal(Rng& rng) {
    double u1 = 1.0 - rand_unit(rng);
    double u2 = rand_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void fill_normal(Eigen::MatrixXd& m, double std_dev, Rng& rng) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = std_dev * rand_normal(rng);
}

double gelu_val(double x) { return 0.5 * x * std::erfc(-x * M_SQRT1_2); }

double gelu_grad(double x) {
    double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    return 0.5 * std::erfc(-x * M_SQRT1_2) + x * phi;
}

void ln_forward(const Eigen::MatrixXd& x, const Tensor& gamma, const Tensor& beta,
                LnCache& cache, Eigen::MatrixXd& out) {
    const Eigen::Index t = x.rows(), d = x.cols();
    cache.xhat.resize(t, d);
    cache.inv_std.resize(t);
    out.resize(t, d);
    for (Eigen::Index i = 0; i < t; ++i) {
        double mu = x.row(i).mean();
        double var = (x.row(i).array() - mu).square().mean();
        double inv = 1.0 / std::sqrt(var + kLnEps);
        cache.inv_std[i] = inv;
        cache.xhat.row(i) = (x.row(i).array() - mu) * inv;
        out.row(i) = cache.xhat.row(i).cwiseProduct(gamma.v.row(0)) + beta.v.row(0);
    }
}

Eigen::MatrixXd ln_recompute_out(const LnCache& cache, const Tensor& gamma, const Tensor& beta) {
    Eigen::MatrixXd out = cache.xhat;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        out.row(i) = out.row(i).cwiseProduct(gamma.v.row(0)) + beta.v.row(0);
    return out;
}

Eigen::MatrixXd ln_backward(const Eigen::MatrixXd& dy, const LnCache& cache,
                            const Tensor& gamma, const Tensor& beta, GradStore& gs) {
    const Eigen::Index t = dy.rows(), d = dy.cols();
    gs[gamma].row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
    gs[beta].row(0) += dy.colwise().sum();
    Eigen::MatrixXd dx(t, d);
    for (Eigen::Index i = 0; i < t; ++i) {
        Eigen::ArrayXd dxhat = dy.row(i).array() * gamma.v.row(0).array();
        double m1 = dxhat.mean();
        double m2 = (dxhat * cache.xhat.row(i).transpose().array()).mean();
        dx.row(i) =
            (cache.inv_std[i] * (dxhat - m1 - cache.xhat.row(i).transpose().array() * m2))
                .matrix();
    }
    return dx;
}

Eigen::MatrixXd dropout_factors(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
    Eigen::MatrixXd f(rows, cols);
    double keep = 1.0 - rate;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            f(i, j) = rand_unit(rng) < rate ? 0.0 : 1.0 / keep;
    return f;
}

}  // namespace

void ModelConfig::validate() const {
    if (n_layers < 1 || n_heads < 1 || d_model < 1 || max_seq_len < 1)
        throw ConfigError("model config: dimensions must be positive");
    if (d_model % n_heads != 0)
        throw ConfigError("model config: d_model must be divisible by n_heads");
    if (vocab_size < 1) throw ConfigError("model config: vocab_size must be positive");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw ConfigError("model config: dropout_rate must lie in [0,1)");
}

ModelState ModelState::init(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    ModelState m;
    m.cfg = cfg;
    Rng rng = make_rng(mix_seed(seed, 0x90de));
    const int d = cfg.d_model;
    const double base_std = 0.02;
    const double resid_std = base_std / std::sqrt(2.0 * cfg.n_layers);

    int next_idx = 0;
    auto make = [&](Tensor& t, const std::string& name, int rows, int cols, double std_dev) {
        t.name = name;
        t.idx = next_idx++;
        t.v.setZero(rows, cols);
        if (std_dev > 0) fill_normal(t.v, std_dev, rng);
    };

    make(m.wte, "wte", cfg.vocab_size + 1, d, base_std);
    make(m.wpe, "wpe", cfg.max_seq_len, d, base_std);
    m.layers.resize(cfg.n_layers);
    for (int l = 0; l < cfg.n_layers; ++l) {
        auto& lp = m.layers[l];
        std::string p = "layer" + std::to_string(l) + ".";
        make(lp.ln1_g, p + "ln1_g", 1, d, 0);
        lp.ln1_g.v.setOnes();
        make(lp.ln1_b, p + "ln1_b", 1, d, 0);
        make(lp.w_qkv, p + "w_qkv", d, 3 * d, base_std);
        make(lp.b_qkv, p + "b_qkv", 1, 3 * d, 0);
        make(lp.w_o, p + "w_o", d, d, resid_std);
        make(lp.b_o, p + "b_o", 1, d, 0);
        make(lp.ln2_g, p + "ln2_g", 1, d, 0);
        lp.ln2_g.v.setOnes();
        make(lp.ln2_b, p + "ln2_b", 1, d, 0);
        make(lp.w_fc, p + "w_fc", d, 4 * d, base_std);
        make(lp.b_fc, p + "b_fc", 1, 4 * d, 0);
        make(lp.w_proj, p + "w_proj", 4 * d, d, resid_std);
        make(lp.b_proj, p + "b_proj", 1, d, 0);
    }
    make(m.lnf_g, "lnf_g", 1, d, 0);
    m.lnf_g.v.setOnes();
    make(m.lnf_b, "lnf_b", 1, d, 0);
    make(m.w_head, "w_head", d, cfg.out_dim(), base_std);
    make(m.b_head, "b_head", 1, cfg.out_dim(), 0);
    m.n_tensors = next_idx;
    return m;
}

long long ModelState::num_params() const {
    long long total = 0;
    for_each_tensor([&](const Tensor& t) { total += t.v.size(); });
    return total;
}

GradStore::GradStore(const ModelState& m) {
    g.resize(m.n_tensors);
    m.for_each_tensor([&](const Tensor& t) { g[t.idx].setZero(t.v.rows(), t.v.cols()); });
}

void GradStore::zero() {
    for (auto& m : g) m.setZero();
}

void GradStore::add(const GradStore& other) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += other.g[i];
}

double GradStore::global_norm() const {
    double s = 0.0;
    for (const auto& m : g) s += m.squaredNorm();
    return std::sqrt(s);
}

void GradStore::scale(double s) {
    for (auto& m : g) m *= s;
}

ForwardCache forward(const ModelState& m, const std::vector<int>& ids, bool training,
                     std::uint64_t dropout_seed) {
    const ModelConfig& cfg = m.cfg;
    const int t_len = static_cast<int>(ids.size());
    if (t_len < 1) throw DataError("forward: empty sequence");
    if (t_len > cfg.max_seq_len) throw DataError("forward: sequence exceeds max_seq_len");
    for (int id : ids)
        if (id < 1 || id > cfg.vocab_size + 1) throw DataError("forward: token id out of range");

    const int d = cfg.d_model;
    const int nh = cfg.n_heads;
    const int dh = d / nh;
    const bool drop = training && cfg.dropout_rate > 0.0;
    Rng drop_rng = make_rng(mix_seed(dropout_seed, 0xd701));

    ForwardCache cache;
    cache.ids = ids;
    cache.x0.resize(t_len, d);
    for (int t = 0; t < t_len; ++t)
        cache.x0.row(t) = m.wte.v.row(ids[t] - 1) + m.wpe.v.row(t);

    Eigen::MatrixXd x = cache.x0;
    if (drop) {
        cache.drop_emb = dropout_factors(t_len, d, cfg.dropout_rate, drop_rng);
        x = x.cwiseProduct(cache.drop_emb);
    }

    cache.layers.resize(cfg.n_layers);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    for (int l = 0; l < cfg.n_layers; ++l) {
        const LayerParams& lp = m.layers[l];
        LayerCache& lc = cache.layers[l];
        lc.x_in = x;

        Eigen::MatrixXd a;
        ln_forward(x, lp.ln1_g, lp.ln1_b, lc.ln1, a);
        lc.qkv.noalias() = a * lp.w_qkv.v;
        lc.qkv.rowwise() += lp.b_qkv.v.row(0);

        lc.att_probs.assign(nh, Eigen::MatrixXd());
        lc.att_out.resize(t_len, d);
        for (int h = 0; h < nh; ++h) {
            auto q = lc.qkv.middleCols(h * dh, dh);
            auto k = lc.qkv.middleCols(d + h * dh, dh);
            auto v = lc.qkv.middleCols(2 * d + h * dh, dh);
            Eigen::MatrixXd s = (q * k.transpose()) * scale;
            Eigen::MatrixXd& p = lc.att_probs[h];
            p.setZero(t_len, t_len);
            for (int i = 0; i < t_len; ++i) {
                double mx = s.row(i).head(i + 1).maxCoeff();
                double denom = 0.0;
                for (int j = 0; j <= i; ++j) {
                    double e = std::exp(s(i, j) - mx);
                    p(i, j) = e;
                    denom += e;
                }
                p.row(i).head(i + 1) /= denom;
            }
            lc.att_out.middleCols(h * dh, dh).noalias() = p * v;
        }

        Eigen::MatrixXd y = lc.att_out * lp.w_o.v;
        y.rowwise() += lp.b_o.v.row(0);
        if (drop) {
            lc.drop_att = dropout_factors(t_len, d, cfg.dropout_rate, drop_rng);
            y = y.cwiseProduct(lc.drop_att);
        }
        x += y;
        lc.x_mid = x;

        Eigen::MatrixXd b;
        ln_forward(x, lp.ln2_g, lp.ln2_b, lc.ln2, b);
        lc.fc_pre.noalias() = b * lp.w_fc.v;
        lc.fc_pre.rowwise() += lp.b_fc.v.row(0);
        lc.fc_act = lc.fc_pre.unaryExpr([](double v) { return gelu_val(v); });
        Eigen::MatrixXd y2 = lc.fc_act * lp.w_proj.v;
        y2.rowwise() += lp.b_proj.v.row(0);
        if (drop) {
            lc.drop_mlp = dropout_factors(t_len, d, cfg.dropout_rate, drop_rng);
            y2 = y2.cwiseProduct(lc.drop_mlp);
        }
        x += y2;
    }

    ln_forward(x, m.lnf_g, m.lnf_b, cache.lnf, cache.h);
    cache.logits.noalias() = cache.h * m.w_head.v;
    cache.logits.rowwise() += m.b_head.v.row(0);
    return cache;
}

void backward(const ModelState& m, const ForwardCache& cache, const Eigen::MatrixXd* dlogits,
              const Eigen::MatrixXd* dh_extra, GradStore& gs) {
    const ModelConfig& cfg = m.cfg;
    const int t_len = cache.T();
    const int d = cfg.d_model;
    const int nh = cfg.n_heads;
    const int dh = d / nh;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    Eigen::MatrixXd dH = Eigen::MatrixXd::Zero(t_len, d);
    if (dlogits) {
        gs[m.w_head].noalias() += cache.h.transpose() * (*dlogits);
        gs[m.b_head].row(0) += dlogits->colwise().sum();
        dH.noalias() += (*dlogits) * m.w_head.v.transpose();
    }
    if (dh_extra) dH += *dh_extra;

    Eigen::MatrixXd dx = ln_backward(dH, cache.lnf, m.lnf_g, m.lnf_b, gs);

    for (int l = cfg.n_layers - 1; l >= 0; --l) {
        const LayerParams& lp = m.layers[l];
        const LayerCache& lc = cache.layers[l];

        Eigen::MatrixXd dy2 = dx;
        if (lc.drop_mlp.size() > 0) dy2 = dy2.cwiseProduct(lc.drop_mlp);
        gs[lp.w_proj].noalias() += lc.fc_act.transpose() * dy2;
        gs[lp.b_proj].row(0) += dy2.colwise().sum();
        Eigen::MatrixXd dact = dy2 * lp.w_proj.v.transpose();
        Eigen::MatrixXd dpre =
            dact.cwiseProduct(lc.fc_pre.unaryExpr([](double v) { return gelu_grad(v); }));
        Eigen::MatrixXd b_out = ln_recompute_out(lc.ln2, lp.ln2_g, lp.ln2_b);
        gs[lp.w_fc].noalias() += b_out.transpose() * dpre;
        gs[lp.b_fc].row(0) += dpre.colwise().sum();
        Eigen::MatrixXd db = dpre * lp.w_fc.v.transpose();
        Eigen::MatrixXd dx_mid = dx + ln_backward(db, lc.ln2, lp.ln2_g, lp.ln2_b, gs);

        Eigen::MatrixXd dy = dx_mid;
        if (lc.drop_att.size() > 0) dy = dy.cwiseProduct(lc.drop_att);
        gs[lp.w_o].noalias() += lc.att_out.transpose() * dy;
        gs[lp.b_o].row(0) += dy.colwise().sum();
        Eigen::MatrixXd datt = dy * lp.w_o.v.transpose();

        Eigen::MatrixXd dqkv = Eigen::MatrixXd::Zero(t_len, 3 * d);
        for (int h = 0; h < nh; ++h) {
            auto q = lc.qkv.middleCols(h * dh, dh);
            auto k = lc.qkv.middleCols(d + h * dh, dh);
            auto v = lc.qkv.middleCols(2 * d + h * dh, dh);
            const Eigen::MatrixXd& p = lc.att_probs[h];
            auto datt_h = datt.middleCols(h * dh, dh);

            Eigen::MatrixXd dp = datt_h * v.transpose();
            Eigen::MatrixXd dv = p.transpose() * datt_h;
            Eigen::MatrixXd ds(t_len, t_len);
            for (int i = 0; i < t_len; ++i) {
                double dot = dp.row(i).head(i + 1).cwiseProduct(p.row(i).head(i + 1)).sum();
                ds.row(i) = p.row(i).cwiseProduct(
                    (dp.row(i).array() - dot).matrix());
            }
            dqkv.middleCols(h * dh, dh).noalias() = (ds * k) * scale;
            dqkv.middleCols(d + h * dh, dh).noalias() = (ds.transpose() * q) * scale;
            dqkv.middleCols(2 * d + h * dh, dh) = dv;
        }

        Eigen::MatrixXd a_out = ln_recompute_out(lc.ln1, lp.ln1_g, lp.ln1_b);
        gs[lp.w_qkv].noalias() += a_out.transpose() * dqkv;
        gs[lp.b_qkv].row(0) += dqkv.colwise().sum();
        Eigen::MatrixXd da = dqkv * lp.w_qkv.v.transpose();
        dx = dx_mid + ln_backward(da, lc.ln1, lp.ln1_g, lp.ln1_b, gs);
    }

    if (cache.drop_emb.size() > 0) dx = dx.cwiseProduct(cache.drop_emb);
    for (int t = 0; t < t_len; ++t) {
        gs[m.wte].row(cache.ids[t] - 1) += dx.row(t);
        gs[m.wpe].row(t) += dx.row(t);
    }
}

Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        double mx = logits.row(i).maxCoeff();
        double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
        out.row(i) = logits.row(i).array() - lse;
    }
    return out;
}

NllResult nll_from_logits(const Eigen::MatrixXd& logits, const std::vector<int>& ids,
                          int skip_id) {
    NllResult r;
    const int t_len = static_cast<int>(ids.size());
    for (int t = 0; t + 1 < t_len; ++t) {
        int target = ids[t + 1];
        if (target == skip_id) continue;
        double mx = logits.row(t).maxCoeff();
        double lse = mx + std::log((logits.row(t).array() - mx).exp().sum());
        r.loss_sum += lse - logits(t, target - 1);
        r.count++;
    }
    return r;
}

NllResult nll_loss_and_grad(const ModelState& m, const std::vector<int>& ids, GradStore* gs,
                            double grad_scale, int skip_id) {
    if (ids.size() < 2) throw DataError("nll: sequence must have length >= 2");
    ForwardCache cache = forward(m, ids);
    NllResult r = nll_from_logits(cache.logits, ids, skip_id);
    if (gs) {
        const int t_len = cache.T();
        Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(t_len, m.cfg.out_dim());
        for (int t = 0; t + 1 < t_len; ++t) {
            int target = ids[t + 1];
            if (target == skip_id) continue;
            double mx = cache.logits.row(t).maxCoeff();
            Eigen::ArrayXd e = (cache.logits.row(t).array() - mx).exp();
            Eigen::ArrayXd p = e / e.sum();
            dlogits.row(t) = (p * grad_scale).matrix();
            dlogits(t, target - 1) -= grad_scale;
        }
        backward(m, cache, &dlogits, nullptr, *gs);
    }
    return r;
}

SampleResult sample(const ModelState& m, const Vocabulary& v, int max_len, double temperature,
                    bool use_mask, std::uint64_t seed) {
    const ModelConfig& cfg = m.cfg;
    if (temperature <= 0.0) throw ConfigError("sample: temperature must be positive");
    if (cfg.out_dim() != v.size())
        throw ConfigError("sample: model head width does not match vocabulary");
    max_len = std::min(max_len, cfg.max_seq_len);
    const int d = cfg.d_model;
    const int nh = cfg.n_heads;
    const int dh = d / nh;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Rng rng = make_rng(mix_seed(seed, 0x5a3e));

    std::vector<Eigen::MatrixXd> kcache(cfg.n_layers), vcache(cfg.n_layers);
    for (int l = 0; l < cfg.n_layers; ++l) {
        kcache[l].resize(max_len, d);
        vcache[l].resize(max_len, d);
    }

    auto ln_row = [&](const Eigen::RowVectorXd& x, const Tensor& g,
                      const Tensor& b) -> Eigen::RowVectorXd {
        double mu = x.mean();
        double var = (x.array() - mu).square().mean();
        double inv = 1.0 / std::sqrt(var + kLnEps);
        return (((x.array() - mu) * inv) * g.v.row(0).array()).matrix() + b.v.row(0);
    };

    GrammarState grammar(v);
    SampleResult out;
    out.ids.push_back(v.sog_id());
    grammar.feed_id(v.sog_id());

    for (int t = 0; t < max_len; ++t) {
        int id = out.ids[t];
        Eigen::RowVectorXd x = m.wte.v.row(id - 1) + m.wpe.v.row(t);
        for (int l = 0; l < cfg.n_layers; ++l) {
            const LayerParams& lp = m.layers[l];
            Eigen::RowVectorXd a = ln_row(x, lp.ln1_g, lp.ln1_b);
            Eigen::RowVectorXd qkv = a * lp.w_qkv.v + lp.b_qkv.v.row(0);
            kcache[l].row(t) = qkv.segment(d, d);
            vcache[l].row(t) = qkv.segment(2 * d, d);
            Eigen::RowVectorXd att(d);
            for (int h = 0; h < nh; ++h) {
                Eigen::RowVectorXd q = qkv.segment(h * dh, dh);
                Eigen::VectorXd s(t + 1);
                for (int j = 0; j <= t; ++j)
                    s[j] = q.dot(kcache[l].row(j).segment(h * dh, dh)) * scale;
                double mx = s.maxCoeff();
                Eigen::ArrayXd p = (s.array() - mx).exp();
                p /= p.sum();
                Eigen::RowVectorXd o = Eigen::RowVectorXd::Zero(dh);
                for (int j = 0; j <= t; ++j)
                    o += p[j] * vcache[l].row(j).segment(h * dh, dh);
                att.segment(h * dh, dh) = o;
            }
            x += att * lp.w_o.v + lp.b_o.v.row(0);
            Eigen::RowVectorXd b = ln_row(x, lp.ln2_g, lp.ln2_b);
            Eigen::RowVectorXd pre = b * lp.w_fc.v + lp.b_fc.v.row(0);
            Eigen::RowVectorXd act = pre.unaryExpr([](double q) { return gelu_val(q); });
            x += act * lp.w_proj.v + lp.b_proj.v.row(0);
        }
        Eigen::RowVectorXd h = ln_row(x, m.lnf_g, m.lnf_b);
        Eigen::RowVectorXd logits = h * m.w_head.v + m.b_head.v.row(0);

        std::vector<bool> legal;
        if (use_mask) legal = grammar.legal_mask();
        double mx = -1e300;
        for (int i = 0; i < v.size(); ++i)
            if (!use_mask || legal[i]) mx = std::max(mx, logits[i]);
        Eigen::ArrayXd p = Eigen::ArrayXd::Zero(v.size());
        double total = 0.0;
        for (int i = 0; i < v.size(); ++i) {
            if (use_mask && !legal[i]) continue;
            p[i] = std::exp((logits[i] - mx) / temperature);
            total += p[i];
        }
        double r = rand_unit(rng) * total;
        int choice = -1;
        double acc = 0.0;
        for (int i = 0; i < v.size(); ++i) {
            if (p[i] <= 0.0) continue;
            acc += p[i];
            choice = i;
            if (acc >= r) break;
        }
        int next = choice + 1;
        out.ids.push_back(next);
        grammar.feed_id(next);
        if (next == v.eog_id()) return out;
    }
    out.truncated = true;
    return out;
}

void save_checkpoint(const std::string& dir, const ModelState& m, const Vocabulary& v,
                     std::uint64_t rng_seed, long long step_count) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream f(fs::path(dir) / "vocab.txt", std::ios::binary);
        f << vocab_manifest(v) << "\n";
        if (!f) throw DataError("checkpoint: cannot write vocab.txt");
    }
    {
        std::ofstream f(fs::path(dir) / "manifest.txt", std::ios::binary);
        f << "format=ggen-ckpt-1\n";
        f << "n_layers=" << m.cfg.n_layers << "\n";
        f << "n_heads=" << m.cfg.n_heads << "\n";
        f << "d_model=" << m.cfg.d_model << "\n";
        f << "max_seq_len=" << m.cfg.max_seq_len << "\n";
        f << "vocab_size=" << m.cfg.vocab_size << "\n";
        f << "head_dim=" << m.cfg.head_dim << "\n";
        f << "dropout_rate=" << m.cfg.dropout_rate << "\n";
        f << "rng_seed=" << rng_seed << "\n";
        f << "step_count=" << step_count << "\n";
        m.for_each_tensor([&](const Tensor& t) {
            f << "tensor=" << t.name << " " << t.v.rows() << " " << t.v.cols() << "\n";
        });
        if (!f) throw DataError("checkpoint: cannot write manifest.txt");
    }
    {
        std::ofstream f(fs::path(dir) / "params.bin", std::ios::binary);
        m.for_each_tensor([&](const Tensor& t) {
            // Eigen default storage is column-major; serialize row-major so the
            // blob layout matches the (rows, cols) manifest order.
            for (Eigen::Index i = 0; i < t.v.rows(); ++i)
                for (Eigen::Index j = 0; j < t.v.cols(); ++j) {
                    double x = t.v(i, j);
                    f.write(reinterpret_cast<const char*>(&x), sizeof(double));
                }
        });
        if (!f) throw DataError("checkpoint: cannot write params.bin");
    }
}

ModelState load_checkpoint(const std::string& dir, Vocabulary* vocab_out,
                           std::uint64_t* rng_seed_out, long long* step_count_out) {
    namespace fs = std::filesystem;
    std::ifstream mf(fs::path(dir) / "manifest.txt", std::ios::binary);
    if (!mf) throw DataError("checkpoint: cannot open manifest in " + dir);
    ModelConfig cfg;
    std::uint64_t rng_seed = 0;
    long long step_count = 0;
    std::vector<std::pair<std::string, std::pair<long, long>>> tensors;
    std::string line;
    std::map<std::string, std::string> kv;
    while (std::getline(mf, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "tensor") {
            std::istringstream ls(val);
            std::string name;
            long r, c;
            ls >> name >> r >> c;
            tensors.push_back({name, {r, c}});
        } else {
            kv[key] = val;
        }
    }
    auto geti = [&](const std::string& k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw DataError("checkpoint: missing key " + k);
        return std::stoll(it->second);
    };
    cfg.n_layers = static_cast<int>(geti("n_layers"));
    cfg.n_heads = static_cast<int>(geti("n_heads"));
    cfg.d_model = static_cast<int>(geti("d_model"));
    cfg.max_seq_len = static_cast<int>(geti("max_seq_len"));
    cfg.vocab_size = static_cast<int>(geti("vocab_size"));
    cfg.head_dim = static_cast<int>(geti("head_dim"));
    cfg.dropout_rate = std::stod(kv["dropout_rate"]);
    rng_seed = static_cast<std::uint64_t>(geti("rng_seed"));
    step_count = geti("step_count");

    ModelState m = ModelState::init(cfg, 0);
    std::ifstream pf(fs::path(dir) / "params.bin", std::ios::binary);
    if (!pf) throw DataError("checkpoint: cannot open params.bin in " + dir);
    std::size_t ti = 0;
    m.for_each_tensor([&](Tensor& t) {
        if (ti >= tensors.size()) throw DataError("checkpoint: tensor list too short");
        auto& [name, shape] = tensors[ti++];
        if (name != t.name || shape.first != t.v.rows() || shape.second != t.v.cols())
            throw DataError("checkpoint: tensor mismatch at " + t.name);
        for (Eigen::Index i = 0; i < t.v.rows(); ++i)
            for (Eigen::Index j = 0; j < t.v.cols(); ++j) {
                double x;
                pf.read(reinterpret_cast<char*>(&x), sizeof(double));
                t.v(i, j) = x;
            }
    });
    if (!pf) throw DataError("checkpoint: params.bin too short");

    if (vocab_out) {
        std::ifstream vf(fs::path(dir) / "vocab.txt", std::ios::binary);
        if (!vf) throw DataError("checkpoint: cannot open vocab.txt in " + dir);
        std::string vline;
        std::getline(vf, vline);
        *vocab_out = parse_vocab_manifest(vline);
    }
    if (rng_seed_out) *rng_seed_out = rng_seed;
    if (step_count_out) *step_count_out = step_count;
    return m;
}

}  // namespace ggen
