#pragma once

#include <vector>

#include "genf/nn/ops.hpp"

namespace genf::nn {

/// Standard LSTM cell. Combined weight layout: W is (d_in + d_h) x 4*d_h,
/// gate order [i f g o], b is 1 x 4*d_h. Param count 4*((d_in+d_h)*d_h + d_h).
struct LstmCell {
    std::string w, b;
    std::size_t d_in = 0, d_h = 0;

    LstmCell() = default;
    LstmCell(std::string prefix, std::size_t in, std::size_t hidden)
        : w(prefix + ".w"), b(prefix + ".b"), d_in(in), d_h(hidden) {}

    void init(ParamStore& ps) const {
        const double limit = 1.0 / std::sqrt(static_cast<double>(d_in + d_h));
        ps.create_uniform(w, d_in + d_h, 4 * d_h, limit);
        ps.create(b, 1, 4 * d_h);
    }

    std::size_t param_count() const { return (d_in + d_h) * 4 * d_h + 4 * d_h; }

    struct Cache {
        std::vector<double> a;       // [x_t, h_prev]
        std::vector<double> i, f, g, o;
        std::vector<double> c_prev, c, tanh_c;
    };

    /// One step; h and c are updated in place.
    Cache forward(const ParamStore& ps, std::span<const double> x_t, std::vector<double>& h,
                  std::vector<double>& c) const {
        if (x_t.size() != d_in || h.size() != d_h || c.size() != d_h)
            throw std::invalid_argument("LstmCell(" + w + "): dimension mismatch");
        const Mat& W = ps.value(w);
        const Mat& B = ps.value(b);

        Cache cc;
        cc.a.resize(d_in + d_h);
        for (std::size_t k = 0; k < d_in; ++k) cc.a[k] = x_t[k];
        for (std::size_t k = 0; k < d_h; ++k) cc.a[d_in + k] = h[k];
        cc.c_prev = c;

        std::vector<double> z(4 * d_h);
        for (std::size_t j = 0; j < 4 * d_h; ++j) z[j] = B[j];
        for (std::size_t k = 0; k < cc.a.size(); ++k) {
            const double ak = cc.a[k];
            if (ak == 0.0) continue;
            const double* wk = W.data() + k * 4 * d_h;
            for (std::size_t j = 0; j < 4 * d_h; ++j) z[j] += ak * wk[j];
        }

        cc.i.resize(d_h);
        cc.f.resize(d_h);
        cc.g.resize(d_h);
        cc.o.resize(d_h);
        cc.c.resize(d_h);
        cc.tanh_c.resize(d_h);
        for (std::size_t k = 0; k < d_h; ++k) {
            cc.i[k] = sigmoid(z[k]);
            cc.f[k] = sigmoid(z[d_h + k]);
            cc.g[k] = std::tanh(z[2 * d_h + k]);
            cc.o[k] = sigmoid(z[3 * d_h + k]);
            cc.c[k] = cc.f[k] * cc.c_prev[k] + cc.i[k] * cc.g[k];
            cc.tanh_c[k] = std::tanh(cc.c[k]);
            c[k] = cc.c[k];
            h[k] = cc.o[k] * cc.tanh_c[k];
        }
        return cc;
    }

    /// Reverse one step. dh/dc are the incoming adjoints of (h', c') and are
    /// replaced by the adjoints of (h_prev, c_prev); dx_t receives the input
    /// adjoint. Param grads accumulate unless acc_params is false.
    void backward(ParamStore& ps, const Cache& cc, std::vector<double>& dh,
                  std::vector<double>& dc, std::span<double> dx_t, bool acc_params = true) const {
        Mat& dW = ps.grad(w);
        Mat& dB = ps.grad(b);
        const Mat& W = ps.value(w);

        std::vector<double> dz(4 * d_h);
        for (std::size_t k = 0; k < d_h; ++k) {
            const double d_o = dh[k] * cc.tanh_c[k];
            const double dck = dc[k] + dh[k] * cc.o[k] * (1.0 - cc.tanh_c[k] * cc.tanh_c[k]);
            const double d_f = dck * cc.c_prev[k];
            const double d_i = dck * cc.g[k];
            const double d_g = dck * cc.i[k];
            dc[k] = dck * cc.f[k]; // adjoint of c_prev
            dz[k] = d_i * cc.i[k] * (1.0 - cc.i[k]);
            dz[d_h + k] = d_f * cc.f[k] * (1.0 - cc.f[k]);
            dz[2 * d_h + k] = d_g * (1.0 - cc.g[k] * cc.g[k]);
            dz[3 * d_h + k] = d_o * cc.o[k] * (1.0 - cc.o[k]);
        }

        if (acc_params)
            for (std::size_t j = 0; j < 4 * d_h; ++j) dB[j] += dz[j];
        for (std::size_t k = 0; k < cc.a.size(); ++k) {
            const double ak = cc.a[k];
            double* dwk = dW.data() + k * 4 * d_h;
            const double* wk = W.data() + k * 4 * d_h;
            double da = 0.0;
            for (std::size_t j = 0; j < 4 * d_h; ++j) {
                if (acc_params) dwk[j] += ak * dz[j];
                da += wk[j] * dz[j];
            }
            if (k < d_in)
                dx_t[k] += da;
            else
                dh[k - d_in] = da; // adjoint of h_prev (assign: consumed once per step)
        }
    }

    /// Run a whole sequence (rows of x), returning the final hidden state.
    std::vector<Cache> run(const ParamStore& ps, const Mat& x, std::vector<double>& h,
                           std::vector<double>& c) const {
        std::vector<Cache> caches;
        caches.reserve(x.rows());
        for (std::size_t t = 0; t < x.rows(); ++t) caches.push_back(forward(ps, x.row(t), h, c));
        return caches;
    }
};

} // namespace genf::nn
