#pragma once

#include <functional>

#include "genf/nn/param_store.hpp"

namespace genf::nn {

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double analytic = 0.0, numeric = 0.0;
};

/// Central finite differences against analytic gradients of a scalar-valued
/// fragment. value_fn evaluates the scalar from the current params; grad_fn
/// zeroes the grad slots and repopulates them analytically. Relative error
/// denominator is floored at 1e-8.
inline GradCheckReport grad_check(ParamStore& ps, const std::function<double()>& value_fn,
                                  const std::function<void()>& grad_fn, double eps = 1e-5) {
    grad_fn();
    std::map<std::string, Mat> analytic;
    for (auto& [name, p] : ps) analytic[name] = p.grad;

    GradCheckReport rep;
    for (auto& [name, p] : ps) {
        for (std::size_t k = 0; k < p.value.size(); ++k) {
            const double orig = p.value[k];
            p.value[k] = orig + eps;
            const double f_plus = value_fn();
            p.value[k] = orig - eps;
            const double f_minus = value_fn();
            p.value[k] = orig;
            const double numeric = (f_plus - f_minus) / (2.0 * eps);
            const double a = analytic[name][k];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
            const double rel = std::abs(a - numeric) / denom;
            if (rel > rep.max_rel_err) {
                rep.max_rel_err = rel;
                rep.worst_param = name;
                rep.worst_index = k;
                rep.analytic = a;
                rep.numeric = numeric;
            }
        }
    }
    return rep;
}

} // namespace genf::nn
