#pragma once

#include <cmath>
#include <span>

#include "genf/nn/param_store.hpp"

namespace genf::nn {

// -------------------------------- activations ------------------------------

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Mat tanh_fw(const Mat& x) {
    Mat y = x;
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = std::tanh(y[k]);
    return y;
}

/// dx from dy and y = tanh(x).
inline Mat tanh_bw(const Mat& y, const Mat& dy) {
    Mat dx = dy;
    for (std::size_t k = 0; k < dx.size(); ++k) dx[k] *= 1.0 - y[k] * y[k];
    return dx;
}

// -------------------------------- linear -----------------------------------

/// y = x W + b. The caller keeps x for the backward pass.
struct Linear {
    std::string w, b;
    std::size_t d_in = 0, d_out = 0;
    bool bias = true;

    Linear() = default;
    Linear(std::string prefix, std::size_t in, std::size_t out, bool with_bias = true)
        : w(prefix + ".w"), b(prefix + ".b"), d_in(in), d_out(out), bias(with_bias) {}

    void init(ParamStore& ps) const {
        const double limit = 1.0 / std::sqrt(static_cast<double>(d_in));
        ps.create_uniform(w, d_in, d_out, limit);
        if (bias) ps.create(b, 1, d_out);
    }

    Mat forward(const ParamStore& ps, const Mat& x) const {
        if (x.cols() != d_in)
            throw std::invalid_argument("Linear(" + w + "): input has " + std::to_string(x.cols()) +
                                        " cols, expected " + std::to_string(d_in));
        Mat y = matmul(x, ps.value(w));
        if (bias) {
            const Mat& bv = ps.value(b);
            for (std::size_t i = 0; i < y.rows(); ++i)
                for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) += bv[j];
        }
        return y;
    }

    /// Accumulates dW/db, returns dx.
    Mat backward(ParamStore& ps, const Mat& x, const Mat& dy) const {
        matmul_tn_acc(ps.grad(w), x, dy);
        if (bias) {
            Mat& db = ps.grad(b);
            for (std::size_t i = 0; i < dy.rows(); ++i)
                for (std::size_t j = 0; j < dy.cols(); ++j) db[j] += dy(i, j);
        }
        Mat dx(x.rows(), x.cols());
        matmul_nt_acc(dx, dy, ps.value(w));
        return dx;
    }

    /// dx only; param grads untouched.
    Mat backward_input(const ParamStore& ps, const Mat& dy) const {
        Mat dx(dy.rows(), d_in);
        matmul_nt_acc(dx, dy, ps.value(w));
        return dx;
    }

    std::size_t param_count() const { return d_in * d_out + (bias ? d_out : 0); }
};

// -------------------------------- softmax ----------------------------------

/// Numerically stable in-place row softmax. -inf entries become exact 0.
inline void softmax_rows(Mat& s) {
    for (std::size_t i = 0; i < s.rows(); ++i) {
        auto row = s.row(i);
        double m = -std::numeric_limits<double>::infinity();
        for (double v : row) m = std::max(m, v);
        double z = 0.0;
        for (double& v : row) {
            v = std::exp(v - m);
            z += v;
        }
        for (double& v : row) v /= z;
    }
}

inline std::vector<double> softmax(std::span<const double> v) {
    Mat s(1, v.size());
    for (std::size_t k = 0; k < v.size(); ++k) s[k] = v[k];
    softmax_rows(s);
    return s.vec();
}

/// ds from dp and p = softmax(s), row-wise: ds = p * (dp - sum(dp * p)).
inline Mat softmax_rows_bw(const Mat& p, const Mat& dp) {
    Mat ds(p.rows(), p.cols());
    for (std::size_t i = 0; i < p.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < p.cols(); ++j) acc += dp(i, j) * p(i, j);
        for (std::size_t j = 0; j < p.cols(); ++j) ds(i, j) = p(i, j) * (dp(i, j) - acc);
    }
    return ds;
}

// -------------------------------- dropout ----------------------------------

/// Inverted Bernoulli dropout; identity when rate == 0.
struct DropoutMask {
    Mat keep; // 0 or 1/(1-rate)
};

inline Mat dropout_fw(const Mat& x, double rate, Rng& rng, DropoutMask& mask) {
    if (rate <= 0.0) {
        mask.keep = Mat();
        return x;
    }
    const double scale = 1.0 / (1.0 - rate);
    mask.keep = Mat(x.rows(), x.cols());
    Mat y = x;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double m = rng.uniform() < rate ? 0.0 : scale;
        mask.keep[k] = m;
        y[k] *= m;
    }
    return y;
}

inline Mat dropout_bw(const DropoutMask& mask, const Mat& dy) {
    if (mask.keep.empty()) return dy;
    Mat dx = dy;
    for (std::size_t k = 0; k < dx.size(); ++k) dx[k] *= mask.keep[k];
    return dx;
}

// ----------------------------- positional code -----------------------------

/// Sinusoidal position vectors added to the value embedding.
inline Mat sinusoidal_positions(std::size_t n, std::size_t d_model) {
    Mat pe(n, d_model);
    for (std::size_t pos = 0; pos < n; ++pos)
        for (std::size_t i = 0; i < d_model; ++i) {
            const double exponent = static_cast<double>(2 * (i / 2)) / static_cast<double>(d_model);
            const double angle = static_cast<double>(pos) / std::pow(10000.0, exponent);
            pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    return pe;
}

} // namespace genf::nn
