#pragma once

#include <fstream>
#include <functional>
#include <vector>

#include "genf/nn.hpp"

namespace genf {

struct GenConfig {
    std::size_t noise_dim = 8;
    std::size_t lstm_hidden = 5;
    std::vector<std::size_t> linear_widths; // empty -> {12, K} at build time
    double lambda = 5.0;                    // gradient-penalty weight
    double eta = 1.0;                       // supervised weight
    std::size_t n_critic = 5;
    double lr = 0.001;
    std::size_t batch = 64;
    std::size_t batches_per_epoch = 0;      // 0 = full pass over the data
    enum class SupNorm { l2, l2_squared };
    SupNorm supervised_norm = SupNorm::l2;

    void validate() const {
        if (lambda < 0.0 || eta < 0.0 || n_critic < 1)
            throw std::invalid_argument("GenConfig: requires lambda >= 0, eta >= 0, n_critic >= 1");
    }
};

/// One conditional training pair: Y is the length-M condition window, x_next
/// the observed next step.
struct CondSample {
    Mat window;                    // M x K
    std::vector<double> x_next;    // K
};

// ---------------------------------------------------------------------------
// Generator: condition LSTM -> [h_M, z] -> Linear -> tanh -> Linear(K).
// Deterministic given (params, Y, z).
// ---------------------------------------------------------------------------

struct GeneratorNet {
    nn::LstmCell lstm;
    nn::Linear l1, l2;
    std::size_t K = 0, noise_dim = 0;

    GeneratorNet() = default;
    GeneratorNet(std::size_t features, const GenConfig& cfg) : K(features), noise_dim(cfg.noise_dim) {
        std::size_t hidden = cfg.linear_widths.empty() ? 12 : cfg.linear_widths.front();
        lstm = nn::LstmCell("gen.lstm", K, cfg.lstm_hidden);
        l1 = nn::Linear("gen.l1", cfg.lstm_hidden + cfg.noise_dim, hidden);
        l2 = nn::Linear("gen.l2", hidden, K);
        if (cfg.linear_widths.size() > 1 && cfg.linear_widths.back() != K)
            throw std::invalid_argument("GeneratorNet: last linear width must equal K");
    }

    void init(nn::ParamStore& ps) const {
        lstm.init(ps);
        l1.init(ps);
        l2.init(ps);
    }

    std::size_t param_count() const {
        return lstm.param_count() + l1.param_count() + l2.param_count();
    }

    struct Cache {
        std::vector<nn::LstmCell::Cache> steps;
        Mat concat;  // 1 x (H + noise_dim)
        Mat a1, t1;  // pre/post tanh
    };

    std::vector<double> forward(const nn::ParamStore& ps, const Mat& window,
                                std::span<const double> z, Cache* cache = nullptr) const {
        if (window.cols() != K)
            throw std::invalid_argument("GeneratorNet: window has " + std::to_string(window.cols()) +
                                        " features, expected " + std::to_string(K));
        if (z.size() != noise_dim)
            throw std::invalid_argument("GeneratorNet: noise dim mismatch");
        Cache local;
        Cache& cc = cache ? *cache : local;

        std::vector<double> h(lstm.d_h, 0.0), c(lstm.d_h, 0.0);
        cc.steps = lstm.run(ps, window, h, c);

        cc.concat = Mat(1, lstm.d_h + noise_dim);
        for (std::size_t k = 0; k < lstm.d_h; ++k) cc.concat[k] = h[k];
        for (std::size_t k = 0; k < noise_dim; ++k) cc.concat[lstm.d_h + k] = z[k];

        cc.a1 = l1.forward(ps, cc.concat);
        cc.t1 = nn::tanh_fw(cc.a1);
        Mat out = l2.forward(ps, cc.t1);
        return out.vec();
    }

    /// Accumulates generator grads from d_out (K adjoints of the output row).
    void backward(nn::ParamStore& ps, const Cache& cc, std::span<const double> d_out) const {
        Mat dy(1, K);
        for (std::size_t k = 0; k < K; ++k) dy[k] = d_out[k];
        Mat dt1 = l2.backward(ps, cc.t1, dy);
        Mat da1 = nn::tanh_bw(cc.t1, dt1);
        Mat dconcat = l1.backward(ps, cc.concat, da1);

        std::vector<double> dh(lstm.d_h), dc(lstm.d_h, 0.0);
        for (std::size_t k = 0; k < lstm.d_h; ++k) dh[k] = dconcat[k];
        Mat dx(cc.steps.size(), K); // discarded; condition is data, not a parameter
        for (std::size_t t = cc.steps.size(); t-- > 0;)
            lstm.backward(ps, cc.steps[t], dh, dc, dx.row(t));
    }
};

// ---------------------------------------------------------------------------
// Critic: [Y concat candidate] -> LSTM -> Linear(12) -> tanh -> Linear(4)
// -> tanh -> Linear(1). No final squashing (Wasserstein score).
// ---------------------------------------------------------------------------

struct CriticNet {
    nn::LstmCell lstm;
    nn::Linear l1, l2, l3;
    std::size_t K = 0;

    CriticNet() = default;
    explicit CriticNet(std::size_t features, std::size_t lstm_hidden = 5) : K(features) {
        lstm = nn::LstmCell("crit.lstm", K, lstm_hidden);
        l1 = nn::Linear("crit.l1", lstm_hidden, 12);
        l2 = nn::Linear("crit.l2", 12, 4);
        l3 = nn::Linear("crit.l3", 4, 1);
    }

    void init(nn::ParamStore& ps) const {
        lstm.init(ps);
        l1.init(ps);
        l2.init(ps);
        l3.init(ps);
    }

    std::size_t param_count() const {
        return lstm.param_count() + l1.param_count() + l2.param_count() + l3.param_count();
    }

    struct Cache {
        std::vector<nn::LstmCell::Cache> steps;
        Mat h;          // 1 x H final hidden
        Mat t1, t2;     // post-tanh activations
    };

    /// input = condition rows followed by the candidate next step.
    double forward(const nn::ParamStore& ps, const Mat& input, Cache& cc) const {
        std::vector<double> h(lstm.d_h, 0.0), c(lstm.d_h, 0.0);
        cc.steps = lstm.run(ps, input, h, c);
        cc.h = Mat(1, lstm.d_h);
        for (std::size_t k = 0; k < lstm.d_h; ++k) cc.h[k] = h[k];
        cc.t1 = nn::tanh_fw(l1.forward(ps, cc.h));
        cc.t2 = nn::tanh_fw(l2.forward(ps, cc.t1));
        return l3.forward(ps, cc.t2)[0];
    }

    /// Reverse from the scalar score. Accumulates param grads when
    /// acc_params; writes input adjoints into d_input when provided.
    void backward(nn::ParamStore& ps, const Cache& cc, double d_score, bool acc_params,
                  Mat* d_input) const {
        Mat dy(1, 1);
        dy[0] = d_score;
        Mat dt2 = acc_params ? l3.backward(ps, cc.t2, dy) : l3.backward_input(ps, dy);
        Mat da2 = nn::tanh_bw(cc.t2, dt2);
        Mat dt1 = acc_params ? l2.backward(ps, cc.t1, da2) : l2.backward_input(ps, da2);
        Mat da1 = nn::tanh_bw(cc.t1, dt1);
        Mat dh_m = acc_params ? l1.backward(ps, cc.h, da1) : l1.backward_input(ps, da1);

        std::vector<double> dh(dh_m.vec());
        std::vector<double> dc(lstm.d_h, 0.0);
        Mat scratch(cc.steps.size(), K);
        Mat& dx = d_input ? *d_input : scratch;
        dx.zero();
        for (std::size_t t = cc.steps.size(); t-- > 0;)
            lstm.backward(ps, cc.steps[t], dh, dc, dx.row(t), acc_params);
    }

    /// Gradient of the score w.r.t. the candidate (last input row) only.
    std::vector<double> candidate_grad(nn::ParamStore& ps, const Mat& input) const {
        Cache cc;
        forward(ps, input, cc);
        Mat d_input(input.rows(), input.cols());
        backward(ps, cc, 1.0, /*acc_params=*/false, &d_input);
        std::vector<double> g(K);
        for (std::size_t k = 0; k < K; ++k) g[k] = d_input(input.rows() - 1, k);
        return g;
    }

    /// Accumulate scale * d/dtheta [ grad_candidate(score) . v ] into the
    /// param grads: a forward tangent pass seeded with v on the candidate
    /// row, then reverse over both value and tangent channels.
    void directional_grad_params(nn::ParamStore& ps, const Mat& input, std::span<const double> v,
                                 double scale) const {
        const std::size_t H = lstm.d_h;
        nn::DualLstmCell dual(lstm);

        std::vector<nn::DualLstmCell::Cache> steps;
        steps.reserve(input.rows());
        std::vector<double> h(H, 0.0), ht(H, 0.0), c(H, 0.0), tc(H, 0.0);
        Mat xt(input.rows(), K); // tangent: v on the candidate row only
        for (std::size_t k = 0; k < K; ++k) xt(input.rows() - 1, k) = v[k];
        for (std::size_t t = 0; t < input.rows(); ++t)
            steps.push_back(dual.forward(ps, input.row(t), xt.row(t), h, ht, c, tc));

        nn::DualMat hm;
        hm.v = Mat(1, H);
        hm.t = Mat(1, H);
        for (std::size_t k = 0; k < H; ++k) {
            hm.v[k] = h[k];
            hm.t[k] = ht[k];
        }
        auto z1 = nn::dual_linear_fw(ps, l1, hm);
        auto t1 = nn::dual_tanh_fw(z1);
        auto z2 = nn::dual_linear_fw(ps, l2, t1);
        auto t2 = nn::dual_tanh_fw(z2);
        auto z3 = nn::dual_linear_fw(ps, l3, t2);
        // z3.t[0] == grad_candidate . v; seed its adjoint with `scale`.

        nn::DualMat dz3;
        dz3.v = Mat(1, 1);
        dz3.t = Mat(1, 1);
        dz3.t[0] = scale;
        auto dt2 = nn::dual_linear_bw(ps, l3, t2, dz3);
        auto dz2 = nn::dual_tanh_bw(t2, z2.t, dt2);
        auto dt1 = nn::dual_linear_bw(ps, l2, t1, dz2);
        auto dz1 = nn::dual_tanh_bw(t1, z1.t, dt1);
        auto dhm = nn::dual_linear_bw(ps, l1, hm, dz1);

        std::vector<double> dh(dhm.v.vec()), dht(dhm.t.vec());
        std::vector<double> dc(H, 0.0), dtc(H, 0.0);
        Mat dx(input.rows(), K), dxt(input.rows(), K);
        for (std::size_t t = input.rows(); t-- > 0;)
            dual.backward(ps, steps[t], dh, dht, dc, dtc, dx.row(t), dxt.row(t));
    }
};

// ---------------------------------------------------------------------------
// Gradient penalty on the epsilon-interpolated candidate.
// ---------------------------------------------------------------------------

inline std::vector<double> gp_interpolate(std::span<const double> real,
                                          std::span<const double> fake, double eps) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("gp_interpolate: eps outside [0,1]");
    std::vector<double> x(real.size());
    for (std::size_t k = 0; k < real.size(); ++k) x[k] = eps * fake[k] + (1.0 - eps) * real[k];
    return x;
}

inline Mat stack_condition(const Mat& window, std::span<const double> candidate) {
    Mat input(window.rows() + 1, window.cols());
    for (std::size_t t = 0; t < window.rows(); ++t)
        for (std::size_t k = 0; k < window.cols(); ++k) input(t, k) = window(t, k);
    for (std::size_t k = 0; k < window.cols(); ++k) input(window.rows(), k) = candidate[k];
    return input;
}

/// penalty = (||grad_xhat D(xhat | Y)||_2 - 1)^2, gradient w.r.t. the
/// interpolated candidate only (the condition rows are fixed data).
/// CandidateGradFn: vector<double>(const Mat& input) returning the score
/// gradient w.r.t. the last input row.
template <typename CandidateGradFn>
double gradient_penalty(CandidateGradFn&& candidate_grad, std::span<const double> real,
                        std::span<const double> fake, const Mat& window, double eps) {
    const auto xhat = gp_interpolate(real, fake, eps);
    const Mat input = stack_condition(window, xhat);
    const std::vector<double> g = candidate_grad(input);
    const double norm = l2_norm(g);
    const double d = norm - 1.0;
    return d * d;
}

inline double gradient_penalty(CriticNet& critic, nn::ParamStore& ps,
                               std::span<const double> real, std::span<const double> fake,
                               const Mat& window, double eps) {
    return gradient_penalty([&](const Mat& input) { return critic.candidate_grad(ps, input); },
                            real, fake, window, eps);
}

// ---------------------------------------------------------------------------
// Losses (Wasserstein with gradient penalty; supervised residual term).
// ---------------------------------------------------------------------------

struct CwganBatchSample {
    const Mat* window = nullptr;
    std::vector<double> real;
    std::vector<double> fake;
    double eps = 0.5;
};

inline double supervised_term(std::span<const CwganBatchSample> batch, GenConfig::SupNorm norm) {
    double s = 0.0;
    for (const auto& b : batch) {
        double q = 0.0;
        for (std::size_t k = 0; k < b.real.size(); ++k) {
            const double d = b.real[k] - b.fake[k];
            q += d * d;
        }
        s += norm == GenConfig::SupNorm::l2 ? std::sqrt(q) : q;
    }
    return s / static_cast<double>(batch.size());
}

/// L_U = mean D(fake|Y) - mean D(real|Y) + lambda * mean penalty.
inline double loss_unsupervised(CriticNet& critic, nn::ParamStore& crit_ps,
                                std::span<const CwganBatchSample> batch, double lambda) {
    if (batch.empty()) throw std::invalid_argument("loss_unsupervised: empty batch");
    double fake_sum = 0.0, real_sum = 0.0, pen_sum = 0.0;
    for (const auto& b : batch) {
        CriticNet::Cache cc;
        fake_sum += critic.forward(crit_ps, stack_condition(*b.window, b.fake), cc);
        real_sum += critic.forward(crit_ps, stack_condition(*b.window, b.real), cc);
        if (lambda != 0.0)
            pen_sum += gradient_penalty(critic, crit_ps, b.real, b.fake, *b.window, b.eps);
    }
    const double n = static_cast<double>(batch.size());
    return fake_sum / n - real_sum / n + lambda * (pen_sum / n);
}

/// L_S = L_U + eta * mean ||real - fake|| (norm form per config).
inline double loss_supervised(CriticNet& critic, nn::ParamStore& crit_ps,
                              std::span<const CwganBatchSample> batch, double lambda, double eta,
                              GenConfig::SupNorm norm = GenConfig::SupNorm::l2) {
    return loss_unsupervised(critic, crit_ps, batch, lambda) +
           eta * supervised_term(batch, norm);
}

// ---------------------------------------------------------------------------
// Training loop: n_critic critic steps per generator step, Adam both sides.
// ---------------------------------------------------------------------------

struct CwganModel {
    GeneratorNet gen;
    CriticNet critic;
    nn::ParamStore gen_ps{0};
    nn::ParamStore crit_ps{0};
    GenConfig cfg;

    CwganModel(std::size_t K, GenConfig c, std::uint64_t seed)
        : gen(K, c), critic(K, c.lstm_hidden), gen_ps(derive_seed(seed, "gen_init")),
          crit_ps(derive_seed(seed, "crit_init")), cfg(c) {
        cfg.validate();
        gen.init(gen_ps);
        critic.init(crit_ps);
    }

    std::vector<double> generate(const Mat& window, std::span<const double> z) const {
        return gen.forward(gen_ps, window, z);
    }
};

struct CwganLogRow {
    std::size_t epoch;
    double critic_loss;
    double gen_loss;
    double supervised_term;
    double penalty_mean;
};

inline void write_cwgan_log(const std::string& path, const std::vector<CwganLogRow>& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_cwgan_log: cannot open " + path);
    out << "epoch,critic_loss,gen_loss,supervised_term,penalty_mean\n";
    out.precision(17);
    for (const auto& r : log)
        out << r.epoch << ',' << r.critic_loss << ',' << r.gen_loss << ',' << r.supervised_term
            << ',' << r.penalty_mean << '\n';
}

inline std::vector<CwganLogRow> train_cwgan(CwganModel& model,
                                            const std::vector<CondSample>& data,
                                            std::size_t epochs, std::uint64_t seed) {
    if (data.empty()) throw std::invalid_argument("train_cwgan: empty dataset");
    const GenConfig& cfg = model.cfg;
    const std::size_t K = model.gen.K;
    nn::Adam opt_gen(cfg.lr), opt_crit(cfg.lr);
    Rng rng(derive_seed(seed, "cwgan_train"));
    std::vector<CwganLogRow> log;

    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const std::size_t round_len = cfg.n_critic + 1;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        std::size_t n_batches = (data.size() + cfg.batch - 1) / cfg.batch;
        if (cfg.batches_per_epoch > 0) n_batches = std::min(n_batches, cfg.batches_per_epoch);
        // need at least one full round per epoch
        n_batches = std::max(n_batches, round_len);

        double crit_loss_sum = 0.0, gen_loss_sum = 0.0, sup_sum = 0.0, pen_sum = 0.0;
        std::size_t crit_steps = 0, gen_steps = 0;

        auto batch_indices = [&](std::size_t b) {
            std::vector<std::size_t> idx;
            idx.reserve(cfg.batch);
            for (std::size_t i = 0; i < cfg.batch; ++i)
                idx.push_back(order[(b * cfg.batch + i) % data.size()]);
            return idx;
        };

        for (std::size_t b = 0; b + round_len <= n_batches; b += round_len) {
            // --- critic updates ---
            for (std::size_t s = 0; s < cfg.n_critic; ++s) {
                auto idx = batch_indices(b + s);
                const double inv = 1.0 / static_cast<double>(idx.size());
                model.crit_ps.zero_grads();
                double batch_loss = 0.0, batch_pen = 0.0;
                for (std::size_t i : idx) {
                    const auto& sample = data[i];
                    std::vector<double> z(cfg.noise_dim);
                    for (auto& zz : z) zz = rng.normal();
                    const auto fake = model.gen.forward(model.gen_ps, sample.window, z);

                    CriticNet::Cache cc_fake, cc_real;
                    const Mat in_fake = stack_condition(sample.window, fake);
                    const Mat in_real = stack_condition(sample.window, sample.x_next);
                    const double d_fake = model.critic.forward(model.crit_ps, in_fake, cc_fake);
                    const double d_real = model.critic.forward(model.crit_ps, in_real, cc_real);
                    model.critic.backward(model.crit_ps, cc_fake, inv, true, nullptr);
                    model.critic.backward(model.crit_ps, cc_real, -inv, true, nullptr);

                    const double eps = rng.uniform();
                    const auto xhat = gp_interpolate(sample.x_next, fake, eps);
                    const Mat in_hat = stack_condition(sample.window, xhat);
                    const auto g = model.critic.candidate_grad(model.crit_ps, in_hat);
                    const double norm = l2_norm(g);
                    const double pen = (norm - 1.0) * (norm - 1.0);
                    if (norm > 1e-12)
                        model.critic.directional_grad_params(
                            model.crit_ps, in_hat, g,
                            cfg.lambda * inv * 2.0 * (norm - 1.0) / norm);
                    batch_loss += (d_fake - d_real) * inv + cfg.lambda * pen * inv;
                    batch_pen += pen * inv;
                }
                opt_crit.step(model.crit_ps);
                crit_loss_sum += batch_loss;
                pen_sum += batch_pen;
                ++crit_steps;
            }

            // --- generator update ---
            {
                auto idx = batch_indices(b + cfg.n_critic);
                const double inv = 1.0 / static_cast<double>(idx.size());
                model.gen_ps.zero_grads();
                double batch_loss = 0.0, batch_sup = 0.0;
                for (std::size_t i : idx) {
                    const auto& sample = data[i];
                    std::vector<double> z(cfg.noise_dim);
                    for (auto& zz : z) zz = rng.normal();
                    GeneratorNet::Cache gc;
                    const auto fake = model.gen.forward(model.gen_ps, sample.window, z, &gc);

                    CriticNet::Cache cc;
                    const Mat in_fake = stack_condition(sample.window, fake);
                    const double d_fake = model.critic.forward(model.crit_ps, in_fake, cc);
                    Mat d_input(in_fake.rows(), in_fake.cols());
                    model.critic.backward(model.crit_ps, cc, -inv, false, &d_input);

                    std::vector<double> d_fake_row(K);
                    for (std::size_t k = 0; k < K; ++k)
                        d_fake_row[k] = d_input(in_fake.rows() - 1, k);

                    double q = 0.0;
                    for (std::size_t k = 0; k < K; ++k) {
                        const double d = sample.x_next[k] - fake[k];
                        q += d * d;
                    }
                    double sup = 0.0;
                    if (cfg.supervised_norm == GenConfig::SupNorm::l2) {
                        sup = std::sqrt(q);
                        if (sup > 1e-12)
                            for (std::size_t k = 0; k < K; ++k)
                                d_fake_row[k] +=
                                    cfg.eta * inv * (fake[k] - sample.x_next[k]) / sup;
                    } else {
                        sup = q;
                        for (std::size_t k = 0; k < K; ++k)
                            d_fake_row[k] += cfg.eta * inv * 2.0 * (fake[k] - sample.x_next[k]);
                    }
                    model.gen.backward(model.gen_ps, gc, d_fake_row);
                    batch_loss += -d_fake * inv + cfg.eta * sup * inv;
                    batch_sup += sup * inv;
                }
                opt_gen.step(model.gen_ps);
                gen_loss_sum += batch_loss;
                sup_sum += batch_sup;
                ++gen_steps;
            }
        }

        CwganLogRow row;
        row.epoch = epoch;
        row.critic_loss = crit_steps ? crit_loss_sum / static_cast<double>(crit_steps) : 0.0;
        row.gen_loss = gen_steps ? gen_loss_sum / static_cast<double>(gen_steps) : 0.0;
        row.supervised_term = gen_steps ? sup_sum / static_cast<double>(gen_steps) : 0.0;
        row.penalty_mean = crit_steps ? pen_sum / static_cast<double>(crit_steps) : 0.0;
        log.push_back(row);
    }
    return log;
}

// ---------------------------------------------------------------------------
// Recursive multi-step generation: prune the oldest row, append the newest
// synthetic step, keep the window length at M throughout.
// ---------------------------------------------------------------------------

struct RecursiveGeneration {
    Mat block;        // L x K synthetic rows
    Mat final_window; // M x K shifted window
};

inline RecursiveGeneration generate_recursive(const GeneratorNet& gen,
                                              const nn::ParamStore& gen_ps, const Mat& window,
                                              int L, std::uint64_t noise_seed) {
    if (L < 0) throw std::invalid_argument("generate_recursive: L must be >= 0");
    const std::size_t K = window.cols();
    RecursiveGeneration out;
    out.block = Mat(static_cast<std::size_t>(L), K);
    out.final_window = window;

    Rng rng(derive_seed(noise_seed, "gen_noise"));
    for (int j = 0; j < L; ++j) {
        std::vector<double> z(gen.noise_dim);
        for (auto& zz : z) zz = rng.normal();
        const auto x = gen.forward(gen_ps, out.final_window, z);
        for (std::size_t k = 0; k < K; ++k) out.block(static_cast<std::size_t>(j), k) = x[k];
        // shift: drop the oldest row, append the synthetic step
        Mat next(window.rows(), K);
        for (std::size_t t = 0; t + 1 < window.rows(); ++t)
            for (std::size_t k = 0; k < K; ++k) next(t, k) = out.final_window(t + 1, k);
        for (std::size_t k = 0; k < K; ++k) next(window.rows() - 1, k) = x[k];
        out.final_window = std::move(next);
    }
    return out;
}

/// Held-out one-step generation MSE with per-window fixed noise.
inline double generator_one_step_mse(const CwganModel& model, const std::vector<CondSample>& data,
                                     std::uint64_t noise_seed) {
    if (data.empty()) throw std::invalid_argument("generator_one_step_mse: empty dataset");
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        Rng rng(derive_seed(noise_seed, "eval_noise", i));
        std::vector<double> z(model.cfg.noise_dim);
        for (auto& zz : z) zz = rng.normal();
        const auto fake = model.gen.forward(model.gen_ps, data[i].window, z);
        for (std::size_t k = 0; k < fake.size(); ++k) {
            const double d = fake[k] - data[i].x_next[k];
            s += d * d;
            ++count;
        }
    }
    return s / static_cast<double>(count);
}

} // namespace genf
