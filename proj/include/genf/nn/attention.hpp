#pragma once

#include <vector>

#include "genf/nn/ops.hpp"

namespace genf::nn {

struct AttentionConfig {
    std::size_t heads = 3;
    std::size_t d_model = 12;
    std::size_t d_k = 4;
    bool causal = true;

    void validate() const {
        if (d_k < 1 || heads < 1 || heads * d_k != d_model)
            throw std::invalid_argument("AttentionConfig: requires heads * d_k == d_model");
    }
};

/// Scaled dot-product multi-head attention. Per head h: Q = Y Wq_h,
/// K = Y Wk_h, V = Y Wv_h; scores Q K^T / sqrt(d_k) with masked entries set
/// to -inf before softmax; head outputs are concatenated and passed through
/// an output linear layer. Wq/Wk/Wv are stored stacked (d_model x d_model,
/// head h owns the h-th d_k column block), with no bias, matching the plain
/// projection form.
struct MultiHeadAttention {
    std::string wq, wk, wv;
    Linear out;
    AttentionConfig cfg;

    MultiHeadAttention() = default;
    MultiHeadAttention(const std::string& prefix, AttentionConfig c)
        : wq(prefix + ".wq"), wk(prefix + ".wk"), wv(prefix + ".wv"),
          out(prefix + ".out", c.d_model, c.d_model), cfg(c) {
        cfg.validate();
    }

    void init(ParamStore& ps) const {
        const double limit = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
        ps.create_uniform(wq, cfg.d_model, cfg.d_model, limit);
        ps.create_uniform(wk, cfg.d_model, cfg.d_model, limit);
        ps.create_uniform(wv, cfg.d_model, cfg.d_model, limit);
        out.init(ps);
    }

    std::size_t param_count() const { return 3 * cfg.d_model * cfg.d_model + out.param_count(); }

    struct Cache {
        Mat q_src, kv_src;          // inputs
        Mat Q, K, V;                // n x d_model projections
        std::vector<Mat> P;         // per-head softmax rows (n_q x n_kv)
        Mat concat;                 // n_q x d_model
    };

    /// Self-attention over Y. With cfg.causal, position i attends j <= i.
    Mat forward(const ParamStore& ps, const Mat& Y, Cache& cc) const {
        return forward_impl(ps, Y, Y, cc, /*self_causal=*/cfg.causal, Y.rows());
    }

    /// Cross-attention: queries from q_src attend kv positions < valid_len.
    Mat forward_cross(const ParamStore& ps, const Mat& q_src, const Mat& kv_src, Cache& cc,
                      std::size_t valid_len) const {
        return forward_impl(ps, q_src, kv_src, cc, /*self_causal=*/false, valid_len);
    }

    /// Returns dY (self-attention: q and kv adjoints combined).
    Mat backward(ParamStore& ps, const Cache& cc, const Mat& dOut) const {
        Mat dq_src, dkv_src;
        backward_impl(ps, cc, dOut, dq_src, dkv_src);
        dq_src += dkv_src;
        return dq_src;
    }

    void backward_cross(ParamStore& ps, const Cache& cc, const Mat& dOut, Mat& dq_src,
                        Mat& dkv_src) const {
        backward_impl(ps, cc, dOut, dq_src, dkv_src);
    }

private:
    Mat forward_impl(const ParamStore& ps, const Mat& q_src, const Mat& kv_src, Cache& cc,
                     bool self_causal, std::size_t valid_len) const {
        if (q_src.has_nan() || kv_src.has_nan())
            throw std::invalid_argument("attention(" + wq + "): NaN in input");
        if (q_src.cols() != cfg.d_model || kv_src.cols() != cfg.d_model)
            throw std::invalid_argument("attention(" + wq + "): input width != d_model");
        const std::size_t nq = q_src.rows(), nk = kv_src.rows();
        const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.d_k));
        const double inf = std::numeric_limits<double>::infinity();

        cc.q_src = q_src;
        cc.kv_src = kv_src;
        cc.Q = matmul(q_src, ps.value(wq));
        cc.K = matmul(kv_src, ps.value(wk));
        cc.V = matmul(kv_src, ps.value(wv));
        cc.P.assign(cfg.heads, Mat());
        cc.concat = Mat(nq, cfg.d_model);

        for (std::size_t h = 0; h < cfg.heads; ++h) {
            const std::size_t off = h * cfg.d_k;
            Mat s(nq, nk);
            for (std::size_t i = 0; i < nq; ++i)
                for (std::size_t j = 0; j < nk; ++j) {
                    const bool masked = self_causal ? (j > i) : (j >= valid_len);
                    if (masked) {
                        s(i, j) = -inf;
                        continue;
                    }
                    double acc = 0.0;
                    for (std::size_t d = 0; d < cfg.d_k; ++d)
                        acc += cc.Q(i, off + d) * cc.K(j, off + d);
                    s(i, j) = acc * scale;
                }
            softmax_rows(s);
            for (std::size_t i = 0; i < nq; ++i)
                for (std::size_t d = 0; d < cfg.d_k; ++d) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < nk; ++j) acc += s(i, j) * cc.V(j, off + d);
                    cc.concat(i, off + d) = acc;
                }
            cc.P[h] = std::move(s);
        }
        return out.forward(ps, cc.concat);
    }

    void backward_impl(ParamStore& ps, const Cache& cc, const Mat& dOut, Mat& dq_src,
                       Mat& dkv_src) const {
        const std::size_t nq = cc.q_src.rows(), nk = cc.kv_src.rows();
        const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.d_k));

        const Mat dConcat = out.backward(ps, cc.concat, dOut);

        Mat dQ(nq, cfg.d_model), dK(nk, cfg.d_model), dV(nk, cfg.d_model);
        for (std::size_t h = 0; h < cfg.heads; ++h) {
            const std::size_t off = h * cfg.d_k;
            const Mat& P = cc.P[h];
            // dP = dO_h V_h^T ; dV_h = P^T dO_h
            Mat dP(nq, nk);
            for (std::size_t i = 0; i < nq; ++i)
                for (std::size_t j = 0; j < nk; ++j) {
                    double acc = 0.0;
                    for (std::size_t d = 0; d < cfg.d_k; ++d)
                        acc += dConcat(i, off + d) * cc.V(j, off + d);
                    dP(i, j) = acc;
                }
            for (std::size_t j = 0; j < nk; ++j)
                for (std::size_t d = 0; d < cfg.d_k; ++d) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < nq; ++i) acc += P(i, j) * dConcat(i, off + d);
                    dV(j, off + d) += acc;
                }
            const Mat dS = softmax_rows_bw(P, dP); // masked entries have P == 0 -> dS == 0
            for (std::size_t i = 0; i < nq; ++i)
                for (std::size_t j = 0; j < nk; ++j) {
                    const double g = dS(i, j) * scale;
                    if (g == 0.0) continue;
                    for (std::size_t d = 0; d < cfg.d_k; ++d) {
                        dQ(i, off + d) += g * cc.K(j, off + d);
                        dK(j, off + d) += g * cc.Q(i, off + d);
                    }
                }
        }

        matmul_tn_acc(ps.grad(wq), cc.q_src, dQ);
        matmul_tn_acc(ps.grad(wk), cc.kv_src, dK);
        matmul_tn_acc(ps.grad(wv), cc.kv_src, dV);

        dq_src = Mat(nq, cfg.d_model);
        dkv_src = Mat(nk, cfg.d_model);
        matmul_nt_acc(dq_src, dQ, ps.value(wq));
        matmul_nt_acc(dkv_src, dK, ps.value(wk));
        matmul_nt_acc(dkv_src, dV, ps.value(wv));
    }
};

} // namespace genf::nn
