#pragma once

#include "genf/nn/lstm.hpp"

namespace genf::nn {

// Forward-tangent (JVP) companions to the primal ops, plus reverse passes
// over (value, tangent) pairs. Used for the WGAN gradient penalty: the
// penalty needs d/dtheta of (grad_x D . v), i.e. reverse mode over a
// directional-derivative computation. Tangents flow from the inputs only;
// parameters carry no tangent.

struct DualMat {
    Mat v, t;
};

// ------------------------------- linear ------------------------------------

inline DualMat dual_linear_fw(const ParamStore& ps, const Linear& lin, const DualMat& x) {
    DualMat y;
    y.v = lin.forward(ps, x.v);
    y.t = matmul(x.t, ps.value(lin.w));
    return y;
}

/// Accumulates param grads from both channels; returns input adjoints.
inline DualMat dual_linear_bw(ParamStore& ps, const Linear& lin, const DualMat& x,
                              const DualMat& dy) {
    matmul_tn_acc(ps.grad(lin.w), x.v, dy.v);
    matmul_tn_acc(ps.grad(lin.w), x.t, dy.t);
    if (lin.bias) {
        Mat& db = ps.grad(lin.b);
        for (std::size_t i = 0; i < dy.v.rows(); ++i)
            for (std::size_t j = 0; j < dy.v.cols(); ++j) db[j] += dy.v(i, j);
    }
    DualMat dx;
    dx.v = Mat(x.v.rows(), x.v.cols());
    dx.t = Mat(x.v.rows(), x.v.cols());
    matmul_nt_acc(dx.v, dy.v, ps.value(lin.w));
    matmul_nt_acc(dx.t, dy.t, ps.value(lin.w));
    return dx;
}

// ------------------------------- tanh --------------------------------------

inline DualMat dual_tanh_fw(const DualMat& x) {
    DualMat y;
    y.v = tanh_fw(x.v);
    y.t = x.t;
    for (std::size_t k = 0; k < y.t.size(); ++k) y.t[k] *= 1.0 - y.v[k] * y.v[k];
    return y;
}

/// y must be the dual output of dual_tanh_fw; xt the input tangent.
inline DualMat dual_tanh_bw(const DualMat& y, const Mat& xt, const DualMat& dy) {
    DualMat dx;
    dx.v = Mat(y.v.rows(), y.v.cols());
    dx.t = Mat(y.v.rows(), y.v.cols());
    for (std::size_t k = 0; k < y.v.size(); ++k) {
        const double s = 1.0 - y.v[k] * y.v[k]; // tanh'
        dx.v[k] = dy.v[k] * s + dy.t[k] * (-2.0 * y.v[k] * s) * xt[k];
        dx.t[k] = dy.t[k] * s;
    }
    return dx;
}

// ------------------------------- LSTM ---------------------------------------

/// Tangent-carrying LSTM step over the same parameters as LstmCell.
struct DualLstmCell {
    LstmCell cell;

    explicit DualLstmCell(LstmCell c) : cell(std::move(c)) {}

    struct Cache {
        std::vector<double> a, at;    // concat input and tangent
        std::vector<double> zt;       // pre-activation tangents (4*d_h)
        std::vector<double> i, f, g, o;
        std::vector<double> ti, tf, tg, to;
        std::vector<double> c_prev, tc_prev;
        std::vector<double> c, tc;
        std::vector<double> tau, ttau; // tanh(c) and its tangent
    };

    Cache forward(const ParamStore& ps, std::span<const double> x, std::span<const double> xt,
                  std::vector<double>& h, std::vector<double>& ht, std::vector<double>& c,
                  std::vector<double>& tc) const {
        const std::size_t d_in = cell.d_in, d_h = cell.d_h;
        const Mat& W = ps.value(cell.w);
        const Mat& B = ps.value(cell.b);

        Cache cc;
        cc.a.resize(d_in + d_h);
        cc.at.resize(d_in + d_h);
        for (std::size_t k = 0; k < d_in; ++k) {
            cc.a[k] = x[k];
            cc.at[k] = xt[k];
        }
        for (std::size_t k = 0; k < d_h; ++k) {
            cc.a[d_in + k] = h[k];
            cc.at[d_in + k] = ht[k];
        }
        cc.c_prev = c;
        cc.tc_prev = tc;

        std::vector<double> z(4 * d_h);
        cc.zt.assign(4 * d_h, 0.0);
        for (std::size_t j = 0; j < 4 * d_h; ++j) z[j] = B[j];
        for (std::size_t k = 0; k < cc.a.size(); ++k) {
            const double* wk = W.data() + k * 4 * d_h;
            const double ak = cc.a[k], atk = cc.at[k];
            for (std::size_t j = 0; j < 4 * d_h; ++j) {
                z[j] += ak * wk[j];
                cc.zt[j] += atk * wk[j];
            }
        }

        auto resize_all = [&](auto&... vs) { (vs.resize(d_h), ...); };
        resize_all(cc.i, cc.f, cc.g, cc.o, cc.ti, cc.tf, cc.tg, cc.to, cc.c, cc.tc, cc.tau,
                   cc.ttau);
        for (std::size_t k = 0; k < d_h; ++k) {
            cc.i[k] = sigmoid(z[k]);
            cc.f[k] = sigmoid(z[d_h + k]);
            cc.g[k] = std::tanh(z[2 * d_h + k]);
            cc.o[k] = sigmoid(z[3 * d_h + k]);
            cc.ti[k] = cc.i[k] * (1.0 - cc.i[k]) * cc.zt[k];
            cc.tf[k] = cc.f[k] * (1.0 - cc.f[k]) * cc.zt[d_h + k];
            cc.tg[k] = (1.0 - cc.g[k] * cc.g[k]) * cc.zt[2 * d_h + k];
            cc.to[k] = cc.o[k] * (1.0 - cc.o[k]) * cc.zt[3 * d_h + k];

            cc.c[k] = cc.f[k] * cc.c_prev[k] + cc.i[k] * cc.g[k];
            cc.tc[k] = cc.tf[k] * cc.c_prev[k] + cc.f[k] * cc.tc_prev[k] + cc.ti[k] * cc.g[k] +
                       cc.i[k] * cc.tg[k];
            cc.tau[k] = std::tanh(cc.c[k]);
            cc.ttau[k] = (1.0 - cc.tau[k] * cc.tau[k]) * cc.tc[k];

            c[k] = cc.c[k];
            tc[k] = cc.tc[k];
            h[k] = cc.o[k] * cc.tau[k];
            ht[k] = cc.to[k] * cc.tau[k] + cc.o[k] * cc.ttau[k];
        }
        return cc;
    }

    /// Reverse over both channels. On entry dh/dht/dc/dtc hold adjoints of
    /// this step's outputs; on return they hold the previous step's. dx/dxt
    /// accumulate the input-row adjoints.
    void backward(ParamStore& ps, const Cache& cc, std::vector<double>& dh,
                  std::vector<double>& dht, std::vector<double>& dc, std::vector<double>& dtc,
                  std::span<double> dx, std::span<double> dxt) const {
        const std::size_t d_in = cell.d_in, d_h = cell.d_h;
        const Mat& W = ps.value(cell.w);
        Mat& dW = ps.grad(cell.w);
        Mat& dB = ps.grad(cell.b);

        std::vector<double> dz(4 * d_h), dzt(4 * d_h);
        for (std::size_t k = 0; k < d_h; ++k) {
            const double tau = cc.tau[k], s_tau = 1.0 - tau * tau;
            // h = o*tau ; ht = to*tau + o*ttau
            double d_o = dh[k] * tau + dht[k] * cc.ttau[k];
            double d_tau = dh[k] * cc.o[k] + dht[k] * cc.to[k];
            double d_to = dht[k] * tau;
            double d_ttau = dht[k] * cc.o[k];
            // ttau = s_tau * tc
            double d_tc = dtc[k] + d_ttau * s_tau;
            d_tau += d_ttau * (-2.0 * tau) * cc.tc[k];
            // tau = tanh(c)
            double d_c = dc[k] + d_tau * s_tau;
            // c = f*c_prev + i*g
            double d_f = d_c * cc.c_prev[k];
            double d_i = d_c * cc.g[k];
            double d_g = d_c * cc.i[k];
            double d_cprev = d_c * cc.f[k];
            // tc = tf*c_prev + f*tc_prev + ti*g + i*tg
            double d_tf = d_tc * cc.c_prev[k];
            d_cprev += d_tc * cc.tf[k];
            d_f += d_tc * cc.tc_prev[k];
            const double d_tcprev = d_tc * cc.f[k];
            double d_ti = d_tc * cc.g[k];
            d_g += d_tc * cc.ti[k];
            d_i += d_tc * cc.tg[k];
            double d_tg = d_tc * cc.i[k];

            // gate tangents: ti = i(1-i) zt_i etc.
            const double si = cc.i[k] * (1.0 - cc.i[k]);
            const double sf = cc.f[k] * (1.0 - cc.f[k]);
            const double sg = 1.0 - cc.g[k] * cc.g[k];
            const double so = cc.o[k] * (1.0 - cc.o[k]);
            dzt[k] = d_ti * si;
            d_i += d_ti * cc.zt[k] * (1.0 - 2.0 * cc.i[k]);
            dzt[d_h + k] = d_tf * sf;
            d_f += d_tf * cc.zt[d_h + k] * (1.0 - 2.0 * cc.f[k]);
            dzt[2 * d_h + k] = d_tg * sg;
            d_g += d_tg * cc.zt[2 * d_h + k] * (-2.0 * cc.g[k]);
            dzt[3 * d_h + k] = d_to * so;
            d_o += d_to * cc.zt[3 * d_h + k] * (1.0 - 2.0 * cc.o[k]);

            // gate primals
            dz[k] = d_i * si;
            dz[d_h + k] = d_f * sf;
            dz[2 * d_h + k] = d_g * sg;
            dz[3 * d_h + k] = d_o * so;

            dc[k] = d_cprev;
            dtc[k] = d_tcprev;
        }

        for (std::size_t j = 0; j < 4 * d_h; ++j) dB[j] += dz[j];
        for (std::size_t k = 0; k < cc.a.size(); ++k) {
            const double ak = cc.a[k], atk = cc.at[k];
            double* dwk = dW.data() + k * 4 * d_h;
            const double* wk = W.data() + k * 4 * d_h;
            double da = 0.0, dat = 0.0;
            for (std::size_t j = 0; j < 4 * d_h; ++j) {
                dwk[j] += ak * dz[j] + atk * dzt[j];
                da += wk[j] * dz[j];
                dat += wk[j] * dzt[j];
            }
            if (k < d_in) {
                dx[k] += da;
                dxt[k] += dat;
            } else {
                dh[k - d_in] = da;
                dht[k - d_in] = dat;
            }
        }
    }
};

} // namespace genf::nn
