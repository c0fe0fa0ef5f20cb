#pragma once

#include <fstream>
#include <optional>
#include <vector>

#include "genf/nn.hpp"

namespace genf {

struct PredConfig {
    std::size_t enc_layers = 2;
    std::size_t dec_layers = 2;
    std::size_t heads = 3;
    std::size_t d_model = 12;
    std::size_t d_ff = 24;
    double dropout = 0.1;
    double lr = 0.001;
    std::size_t batch = 64;
    std::size_t epochs = 200;
    std::size_t patience = 50;         // early stop on validation MSE
    std::size_t batches_per_epoch = 0; // 0 = full pass
    std::size_t out_dim = 1;           // 1 for direct heads, K for one-step models

    void validate() const {
        if (heads == 0 || d_model % heads != 0)
            throw std::invalid_argument("PredConfig: heads must divide d_model");
    }
};

struct PredSample {
    Mat window;                 // M x K
    std::vector<double> target; // out_dim
};

// ---------------------------------------------------------------------------
// Shallow transformer regressor: value embedding + sinusoidal positions,
// enc_layers causal self-attention blocks, then dec_layers in which a single
// learned query token attends over the encoder output (restricted to the
// window's valid rows, so zero-padding beyond them can never leak in), and a
// final linear head on the query representation.
// ---------------------------------------------------------------------------

struct PredictorNet {
    nn::Linear embed;
    struct Block {
        nn::MultiHeadAttention attn;
        nn::Linear ff1, ff2;
    };
    std::vector<Block> enc, dec;
    std::string query; // learned decoder token, 1 x d_model
    nn::Linear head;
    PredConfig cfg;
    std::size_t K = 0;

    PredictorNet() = default;
    PredictorNet(std::size_t features, PredConfig c) : cfg(c), K(features) {
        cfg.validate();
        const std::size_t dm = cfg.d_model;
        nn::AttentionConfig att{.heads = cfg.heads, .d_model = dm, .d_k = dm / cfg.heads,
                                .causal = true};
        embed = nn::Linear("pred.embed", K, dm);
        for (std::size_t l = 0; l < cfg.enc_layers; ++l) {
            const std::string p = "pred.enc" + std::to_string(l);
            enc.push_back({nn::MultiHeadAttention(p + ".attn", att),
                           nn::Linear(p + ".ff1", dm, cfg.d_ff), nn::Linear(p + ".ff2", cfg.d_ff, dm)});
        }
        nn::AttentionConfig cross = att;
        cross.causal = false;
        for (std::size_t l = 0; l < cfg.dec_layers; ++l) {
            const std::string p = "pred.dec" + std::to_string(l);
            dec.push_back({nn::MultiHeadAttention(p + ".attn", cross),
                           nn::Linear(p + ".ff1", dm, cfg.d_ff), nn::Linear(p + ".ff2", cfg.d_ff, dm)});
        }
        query = "pred.query";
        head = nn::Linear("pred.head", dm, cfg.out_dim);
    }

    void init(nn::ParamStore& ps) const {
        embed.init(ps);
        for (const auto& b : enc) {
            b.attn.init(ps);
            b.ff1.init(ps);
            b.ff2.init(ps);
        }
        for (const auto& b : dec) {
            b.attn.init(ps);
            b.ff1.init(ps);
            b.ff2.init(ps);
        }
        ps.create_uniform(query, 1, cfg.d_model, 1.0 / std::sqrt(static_cast<double>(cfg.d_model)));
        head.init(ps);
    }

    std::size_t param_count() const {
        std::size_t n = embed.param_count() + cfg.d_model + head.param_count();
        for (const auto& b : enc)
            n += b.attn.param_count() + b.ff1.param_count() + b.ff2.param_count();
        for (const auto& b : dec)
            n += b.attn.param_count() + b.ff1.param_count() + b.ff2.param_count();
        return n;
    }

    struct BlockCache {
        nn::MultiHeadAttention::Cache attn;
        Mat attn_in, attn_out;
        nn::DropoutMask attn_drop;
        Mat ff_in, a1, t1, ff_out;
        nn::DropoutMask ff_drop;
    };
    struct Cache {
        Mat window;
        Mat embedded; // with positions, encoder input
        std::vector<BlockCache> enc, dec;
        Mat enc_out;
        Mat q_final; // 1 x d_model
        std::size_t valid_len = 0;
    };

    /// rng enables dropout (training); null rng = inference.
    std::vector<double> forward(const nn::ParamStore& ps, const Mat& window, Cache* cache = nullptr,
                                Rng* rng = nullptr, std::size_t valid_len = 0) const {
        if (window.has_nan()) throw std::invalid_argument("PredictorNet: NaN in input window");
        if (window.cols() != K)
            throw std::invalid_argument("PredictorNet: window has " + std::to_string(window.cols()) +
                                        " features, expected " + std::to_string(K));
        Cache local;
        Cache& cc = cache ? *cache : local;
        cc.window = window;
        cc.valid_len = valid_len == 0 ? window.rows() : valid_len;

        Mat x = embed.forward(ps, window);
        const Mat pe = nn::sinusoidal_positions(x.rows(), cfg.d_model);
        x += pe;
        cc.embedded = x;

        cc.enc.assign(enc.size(), {});
        for (std::size_t l = 0; l < enc.size(); ++l) {
            BlockCache& bc = cc.enc[l];
            bc.attn_in = x;
            Mat a = enc[l].attn.forward(ps, x, bc.attn);
            if (rng && cfg.dropout > 0.0) a = nn::dropout_fw(a, cfg.dropout, *rng, bc.attn_drop);
            bc.attn_out = a;
            x += a; // residual

            bc.ff_in = x;
            bc.a1 = enc[l].ff1.forward(ps, x);
            bc.t1 = nn::tanh_fw(bc.a1);
            Mat f = enc[l].ff2.forward(ps, bc.t1);
            if (rng && cfg.dropout > 0.0) f = nn::dropout_fw(f, cfg.dropout, *rng, bc.ff_drop);
            bc.ff_out = f;
            x += f;
        }
        cc.enc_out = x;

        Mat q = ps.value(query);
        cc.dec.assign(dec.size(), {});
        for (std::size_t l = 0; l < dec.size(); ++l) {
            BlockCache& bc = cc.dec[l];
            bc.attn_in = q;
            Mat a = dec[l].attn.forward_cross(ps, q, cc.enc_out, bc.attn, cc.valid_len);
            if (rng && cfg.dropout > 0.0) a = nn::dropout_fw(a, cfg.dropout, *rng, bc.attn_drop);
            bc.attn_out = a;
            q += a;

            bc.ff_in = q;
            bc.a1 = dec[l].ff1.forward(ps, q);
            bc.t1 = nn::tanh_fw(bc.a1);
            Mat f = dec[l].ff2.forward(ps, bc.t1);
            if (rng && cfg.dropout > 0.0) f = nn::dropout_fw(f, cfg.dropout, *rng, bc.ff_drop);
            bc.ff_out = f;
            q += f;
        }
        cc.q_final = q;
        return head.forward(ps, q).vec();
    }

    void backward(nn::ParamStore& ps, const Cache& cc, std::span<const double> d_out) const {
        Mat dy(1, cfg.out_dim);
        for (std::size_t k = 0; k < cfg.out_dim; ++k) dy[k] = d_out[k];
        Mat dq = head.backward(ps, cc.q_final, dy);

        Mat d_enc_out(cc.enc_out.rows(), cc.enc_out.cols());
        for (std::size_t l = dec.size(); l-- > 0;) {
            const BlockCache& bc = cc.dec[l];
            // residual: dq flows both through the FFN and directly
            Mat df = nn::dropout_bw(bc.ff_drop, dq);
            Mat dt1 = dec[l].ff2.backward(ps, bc.t1, df);
            Mat da1 = nn::tanh_bw(bc.t1, dt1);
            dq += dec[l].ff1.backward(ps, bc.ff_in, da1);

            Mat da = nn::dropout_bw(bc.attn_drop, dq);
            Mat dq_attn, dkv;
            dec[l].attn.backward_cross(ps, bc.attn, da, dq_attn, dkv);
            d_enc_out += dkv;
            dq += dq_attn;
        }
        ps.grad(query) += dq;

        Mat dx = d_enc_out;
        for (std::size_t l = enc.size(); l-- > 0;) {
            const BlockCache& bc = cc.enc[l];
            Mat df = nn::dropout_bw(bc.ff_drop, dx);
            Mat dt1 = enc[l].ff2.backward(ps, bc.t1, df);
            Mat da1 = nn::tanh_bw(bc.t1, dt1);
            dx += enc[l].ff1.backward(ps, bc.ff_in, da1);

            Mat da = nn::dropout_bw(bc.attn_drop, dx);
            dx += enc[l].attn.backward(ps, bc.attn, da);
        }
        embed.backward(ps, cc.window, dx);
    }
};

// ---------------------------------------------------------------------------
// Training: minimize MSE with Adam, early stop on validation MSE.
// ---------------------------------------------------------------------------

struct PredictorModel {
    PredictorNet net;
    nn::ParamStore ps{0};

    PredictorModel(std::size_t K, PredConfig cfg, std::uint64_t seed)
        : net(K, cfg), ps(derive_seed(seed, "pred_init")) {
        net.init(ps);
    }

    std::vector<double> predict(const Mat& window) const { return net.forward(ps, window); }
};

struct PredictorLogRow {
    std::size_t epoch;
    double train_mse;
    double val_mse; // NaN when no validation set
};

inline void write_predictor_log(const std::string& path, const std::vector<PredictorLogRow>& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_predictor_log: cannot open " + path);
    out << "epoch,train_mse,val_mse\n";
    out.precision(17);
    for (const auto& r : log) out << r.epoch << ',' << r.train_mse << ',' << r.val_mse << '\n';
}

inline double predictor_mse(const PredictorModel& model, const std::vector<PredSample>& data) {
    if (data.empty()) throw std::invalid_argument("predictor_mse: empty dataset");
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& d : data) {
        const auto y = model.net.forward(model.ps, d.window);
        for (std::size_t k = 0; k < y.size(); ++k) {
            const double r = y[k] - d.target[k];
            s += r * r;
            ++n;
        }
    }
    return s / static_cast<double>(n);
}

inline std::vector<PredictorLogRow> train_predictor(PredictorModel& model,
                                                    const std::vector<PredSample>& train,
                                                    const std::vector<PredSample>& validation,
                                                    std::uint64_t seed) {
    if (train.empty()) throw std::invalid_argument("train_predictor: empty dataset");
    const PredConfig& cfg = model.net.cfg;
    nn::Adam opt(cfg.lr);
    Rng rng(derive_seed(seed, "pred_train"));
    std::vector<PredictorLogRow> log;

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::map<std::string, Mat> best_params;
    const bool early_stop = !validation.empty();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        std::size_t n_batches = (train.size() + cfg.batch - 1) / cfg.batch;
        if (cfg.batches_per_epoch > 0) n_batches = std::min(n_batches, cfg.batches_per_epoch);

        double train_loss = 0.0;
        std::size_t loss_terms = 0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            model.ps.zero_grads();
            std::size_t lo = b * cfg.batch;
            std::size_t hi = std::min(lo + cfg.batch, train.size());
            if (lo >= hi) break;
            const double inv = 1.0 / static_cast<double>(hi - lo);
            for (std::size_t i = lo; i < hi; ++i) {
                const auto& s = train[order[i]];
                PredictorNet::Cache cc;
                const auto y = model.net.forward(model.ps, s.window, &cc,
                                                 cfg.dropout > 0.0 ? &rng : nullptr);
                std::vector<double> d(y.size());
                for (std::size_t k = 0; k < y.size(); ++k) {
                    const double r = y[k] - s.target[k];
                    train_loss += r * r;
                    ++loss_terms;
                    d[k] = 2.0 * r * inv / static_cast<double>(y.size());
                }
                model.net.backward(model.ps, cc, d);
            }
            opt.step(model.ps);
        }

        PredictorLogRow row;
        row.epoch = epoch;
        row.train_mse = loss_terms ? train_loss / static_cast<double>(loss_terms)
                                   : std::numeric_limits<double>::quiet_NaN();
        row.val_mse = std::numeric_limits<double>::quiet_NaN();
        if (early_stop) {
            row.val_mse = predictor_mse(model, validation);
            if (row.val_mse < best_val) {
                best_val = row.val_mse;
                best_epoch = epoch;
                best_params.clear();
                for (const auto& [name, p] : model.ps) best_params[name] = p.value;
            } else if (epoch - best_epoch >= cfg.patience) {
                log.push_back(row);
                break;
            }
        }
        log.push_back(row);
    }

    if (early_stop && !best_params.empty())
        for (auto& [name, p] : model.ps) p.value = best_params[name];
    return log;
}

} // namespace genf
