#include "roaree/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "roaree/errors.hpp"

namespace roaree {

std::string_view to_token(Method method) {
    switch (method) {
    case Method::SGD: return "sgd";
    case Method::Momentum: return "momentum";
    case Method::Nesterov: return "nesterov";
    case Method::RMSProp: return "rmsprop";
    case Method::Adagrad: return "adagrad";
    case Method::Adam: return "adam";
    case Method::AdamW: return "adamw";
    case Method::Lion: return "lion";
    case Method::Roaree: return "roaree";
    }
    return "?";
}

Method parse_method(std::string_view token) {
    for (auto m : kAllMethods) {
        if (to_token(m) == token) {
            return m;
        }
    }
    throw ConfigError("unknown optimizer: " + std::string(token));
}

void ParamVector::zero_grad() {
    std::fill(grads.begin(), grads.end(), 0.0);
}

Hyper Hyper::defaults(Method method, double lr, double wd) {
    Hyper h;
    h.lr = lr;
    h.wd = wd;
    switch (method) {
    case Method::RMSProp:
        h.beta2 = 0.99;
        break;
    case Method::Lion:
    case Method::Roaree:
        h.beta1 = 0.9;
        h.beta2 = 0.99;
        break;
    default:
        break;
    }
    return h;
}

void Hyper::validate() const {
    auto in_unit = [](double b) { return b >= 0.0 && b < 1.0; };
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be > 0");
    if (!(wd >= 0.0) || !std::isfinite(wd)) throw ConfigError("wd must be >= 0");
    if (!in_unit(beta1) || !in_unit(beta2)) throw ConfigError("betas must lie in [0, 1)");
    if (!in_unit(momentum)) throw ConfigError("momentum must lie in [0, 1)");
    if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
    surrogate.validate();
}

OptimizerState init_state(Method method, std::size_t param_len) {
    if (param_len == 0) {
        throw ConfigError("optimizer state needs at least one parameter");
    }
    OptimizerState s;
    s.method = method;
    switch (method) {
    case Method::SGD:
        break;
    case Method::Momentum:
    case Method::Nesterov:
    case Method::RMSProp:
    case Method::Adagrad:
    case Method::Lion:
    case Method::Roaree:
        s.slot1.assign(param_len, 0.0);
        break;
    case Method::Adam:
    case Method::AdamW:
        s.slot1.assign(param_len, 0.0);
        s.slot2.assign(param_len, 0.0);
        break;
    }
    return s;
}

namespace {

void sgd(ParamVector& p, const Hyper& h) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        double& th = p.values[i];
        th -= h.lr * (p.grads[i] + h.wd * th);
    }
}

void heavy_ball(OptimizerState& s, ParamVector& p, const Hyper& h, bool nesterov) {
    auto& v = s.slot1;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double& th = p.values[i];
        const double g = p.grads[i] + h.wd * th;
        v[i] = h.momentum * v[i] + g;
        th -= h.lr * (nesterov ? g + h.momentum * v[i] : v[i]);
    }
}

// Adagrad (decay = 1) and RMSProp share the accumulator form.
void scaled(OptimizerState& s, ParamVector& p, const Hyper& h, bool adagrad) {
    auto& a = s.slot1;
    const double alpha = h.beta2;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double& th = p.values[i];
        const double g = p.grads[i];
        a[i] = adagrad ? a[i] + g * g : alpha * a[i] + (1.0 - alpha) * g * g;
        th -= h.lr * g / (std::sqrt(a[i]) + h.eps) + h.lr * h.wd * th;
    }
}

void adam(OptimizerState& s, ParamVector& p, const Hyper& h, bool decoupled) {
    auto& m = s.slot1;
    auto& v = s.slot2;
    const double t = static_cast<double>(s.step_count + 1);
    const double bc1 = 1.0 - std::pow(h.beta1, t);
    const double bc2 = 1.0 - std::pow(h.beta2, t);
    for (std::size_t i = 0; i < p.size(); ++i) {
        double& th = p.values[i];
        const double g = decoupled ? p.grads[i] : p.grads[i] + h.wd * th;
        m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g;
        v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g * g;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        double delta = mhat / (std::sqrt(vhat) + h.eps);
        if (decoupled) {
            delta += h.wd * th;
        }
        th -= h.lr * delta;
    }
}

template <typename Direction>
void lion_like(OptimizerState& s, ParamVector& p, const Hyper& h, Direction dir) {
    auto& m = s.slot1;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double& th = p.values[i];
        const double g = p.grads[i];
        const double c = h.beta1 * m[i] + (1.0 - h.beta1) * g;
        th -= h.lr * (dir(c) + h.wd * th);
        m[i] = h.beta2 * m[i] + (1.0 - h.beta2) * g;
    }
}

}  // namespace

void step(OptimizerState& state, ParamVector& params, const Hyper& hyper) {
    if (params.values.size() != params.grads.size()) {
        throw ShapeError("params and grads differ in length");
    }
    const bool uses_slot1 = state.method != Method::SGD;
    if ((uses_slot1 && state.slot1.size() != params.size()) ||
        (!state.slot2.empty() && state.slot2.size() != params.size())) {
        throw ShapeError("optimizer state does not match parameter length");
    }

    switch (state.method) {
    case Method::SGD: sgd(params, hyper); break;
    case Method::Momentum: heavy_ball(state, params, hyper, false); break;
    case Method::Nesterov: heavy_ball(state, params, hyper, true); break;
    case Method::RMSProp: scaled(state, params, hyper, false); break;
    case Method::Adagrad: scaled(state, params, hyper, true); break;
    case Method::Adam: adam(state, params, hyper, false); break;
    case Method::AdamW: adam(state, params, hyper, true); break;
    // NaN passes through both directions so a poisoned gradient is reported
    // as divergence instead of a silent zero step.
    case Method::Lion:
        lion_like(state, params, hyper, [](double c) { return std::isnan(c) ? c : sign0(c); });
        break;
    case Method::Roaree: {
        const SurrogateSpec spec = hyper.surrogate;
        lion_like(state, params, hyper, [&spec](double c) {
            if (!std::isfinite(c)) {
                return std::isnan(c) ? c : sign0(c);
            }
            return surrogate_eval(spec, c);
        });
        break;
    }
    }

    const auto index = state.step_count;
    ++state.step_count;
    for (double v : params.values) {
        if (!std::isfinite(v)) {
            throw DivergenceError(index, "parameters became non-finite at step " +
                                             std::to_string(index));
        }
    }
}

}  // namespace roaree
