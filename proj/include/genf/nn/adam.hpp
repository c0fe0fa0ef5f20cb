#pragma once

#include <map>

#include "genf/nn/param_store.hpp"

namespace genf::nn {

/// Adam with bias correction. Moment state is keyed by param name and
/// created lazily on the first step.
class Adam {
public:
    explicit Adam(double lr = 0.001, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(ParamStore& ps) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (auto& [name, p] : ps) {
            auto& [m, v] = moments_[name];
            if (m.empty()) {
                m = Mat(p.value.rows(), p.value.cols());
                v = Mat(p.value.rows(), p.value.cols());
            }
            for (std::size_t k = 0; k < p.value.size(); ++k) {
                const double g = p.grad[k];
                m[k] = beta1_ * m[k] + (1.0 - beta1_) * g;
                v[k] = beta2_ * v[k] + (1.0 - beta2_) * g * g;
                const double mhat = m[k] / bc1;
                const double vhat = v[k] / bc2;
                p.value[k] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    double lr() const { return lr_; }
    long steps() const { return t_; }

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::map<std::string, std::pair<Mat, Mat>> moments_;
};

} // namespace genf::nn
