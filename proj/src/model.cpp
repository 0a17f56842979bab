#include "roaree/model.hpp"

#include <cmath>
#include <string>

#include "roaree/errors.hpp"
#include "roaree/rng.hpp"

namespace roaree {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// y += W x, W row-major (rows x cols)
void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            acc += wr[c] * x[c];
        }
        y[r] += acc;
    }
}

// y += W^T x
void gemv_t(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w + r * cols;
        const double xr = x[r];
        for (std::size_t c = 0; c < cols; ++c) {
            y[c] += wr[c] * xr;
        }
    }
}

// G += a b^T
void outer(double* g, std::size_t rows, std::size_t cols, const double* a, const double* b) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* gr = g + r * cols;
        const double ar = a[r];
        for (std::size_t c = 0; c < cols; ++c) {
            gr[c] += ar * b[c];
        }
    }
}

}  // namespace

SSMLayout SSMLayout::make(const SSMConfig& cfg) {
    if (cfg.input_dim == 0 || cfg.hidden == 0 || cfg.layers == 0) {
        throw ConfigError("model dimensions must be positive");
    }
    const std::size_t d = cfg.input_dim;
    const std::size_t h = cfg.hidden;
    SSMLayout l;
    std::size_t off = 0;
    l.in_w = off;
    off += h * d;
    l.in_b = off;
    off += h;
    for (std::size_t i = 0; i < cfg.layers; ++i) {
        Layer layer{};
        layer.raw_a = off;
        off += h;
        layer.b = off;
        off += h * h;
        layer.c = off;
        off += h * h;
        layer.g = off;
        off += h * h;
        layer.gate_bias = off;
        off += h;
        l.layers.push_back(layer);
    }
    l.head_w = off;
    off += h;
    l.head_b = off;
    off += 1;
    l.total = off;
    return l;
}

struct SSMRegressor::Trace {
    std::vector<FeatureMatrix> u;     // layers + 1 entries: layer inputs, then final output
    std::vector<FeatureMatrix> h;     // per layer
    std::vector<FeatureMatrix> z;     // C h
    std::vector<FeatureMatrix> gate;  // sigmoid(G u + bias)
    std::vector<double> pred;
};

SSMRegressor::SSMRegressor(SSMConfig cfg)
    : cfg_(cfg), layout_(SSMLayout::make(cfg)), params_(layout_.total) {}

void SSMRegressor::init_params(std::uint64_t seed) {
    Xoshiro256 rng(seed);
    const std::size_t d = cfg_.input_dim;
    const std::size_t h = cfg_.hidden;
    auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i) {
            params_.values[offset + i] = rng.uniform(-bound, bound);
        }
    };
    fill(layout_.in_w, h * d, d);
    fill(layout_.in_b, h, d);
    for (const auto& layer : layout_.layers) {
        fill(layer.raw_a, h, 1);
        fill(layer.b, h * h, h);
        fill(layer.c, h * h, h);
        fill(layer.g, h * h, h);
        fill(layer.gate_bias, h, h);
    }
    fill(layout_.head_w, h, h);
    fill(layout_.head_b, 1, h);
    params_.zero_grad();
}

void SSMRegressor::run(const FeatureMatrix& inputs, Trace& tr) const {
    if (inputs.cols != cfg_.input_dim) {
        throw ShapeError("expected " + std::to_string(cfg_.input_dim) + " features per step, got " +
                         std::to_string(inputs.cols));
    }
    for (double v : inputs.data) {
        if (!std::isfinite(v)) {
            throw DomainError("model input contains a non-finite value");
        }
    }
    const std::size_t steps = inputs.rows;
    const std::size_t d = cfg_.input_dim;
    const std::size_t hd = cfg_.hidden;
    const double* p = params_.values.data();

    tr.u.assign(cfg_.layers + 1, FeatureMatrix(steps, hd));
    tr.h.assign(cfg_.layers, FeatureMatrix(steps, hd));
    tr.z.assign(cfg_.layers, FeatureMatrix(steps, hd));
    tr.gate.assign(cfg_.layers, FeatureMatrix(steps, hd));
    tr.pred.assign(steps, 0.0);

    for (std::size_t t = 0; t < steps; ++t) {
        double* u0 = tr.u[0].row(t).data();
        std::copy(p + layout_.in_b, p + layout_.in_b + hd, u0);
        gemv(p + layout_.in_w, hd, d, inputs.row(t).data(), u0);
    }

    std::vector<double> a(hd);
    for (std::size_t l = 0; l < cfg_.layers; ++l) {
        const auto& L = layout_.layers[l];
        for (std::size_t k = 0; k < hd; ++k) {
            a[k] = sigmoid(p[L.raw_a + k]);
        }
        for (std::size_t t = 0; t < steps; ++t) {
            const double* u = tr.u[l].row(t).data();
            double* h = tr.h[l].row(t).data();
            if (t > 0) {
                const double* prev = tr.h[l].row(t - 1).data();
                for (std::size_t k = 0; k < hd; ++k) {
                    h[k] = a[k] * prev[k];
                }
            }
            gemv(p + L.b, hd, hd, u, h);

            double* z = tr.z[l].row(t).data();
            gemv(p + L.c, hd, hd, h, z);

            double* gate = tr.gate[l].row(t).data();
            std::copy(p + L.gate_bias, p + L.gate_bias + hd, gate);
            gemv(p + L.g, hd, hd, u, gate);
            double* y = tr.u[l + 1].row(t).data();
            for (std::size_t k = 0; k < hd; ++k) {
                gate[k] = sigmoid(gate[k]);
                y[k] = z[k] * gate[k] + u[k];
            }
        }
    }

    const FeatureMatrix& out = tr.u[cfg_.layers];
    for (std::size_t t = 0; t < steps; ++t) {
        double acc = p[layout_.head_b];
        const double* y = out.row(t).data();
        for (std::size_t k = 0; k < hd; ++k) {
            acc += p[layout_.head_w + k] * y[k];
        }
        tr.pred[t] = acc;
    }
}

std::vector<double> SSMRegressor::forward(const FeatureMatrix& inputs) const {
    Trace tr;
    run(inputs, tr);
    return std::move(tr.pred);
}

double SSMRegressor::backward(const FeatureMatrix& inputs, std::span<const double> targets) {
    if (targets.size() != inputs.rows) {
        throw ShapeError("targets must align with input steps");
    }
    if (inputs.rows == 0) {
        throw ShapeError("empty sequence");
    }
    Trace tr;
    run(inputs, tr);

    const std::size_t steps = inputs.rows;
    const std::size_t d = cfg_.input_dim;
    const std::size_t hd = cfg_.hidden;
    const double* p = params_.values.data();
    params_.zero_grad();
    double* gp = params_.grads.data();

    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(steps);
    std::vector<double> dpred(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const double r = tr.pred[t] - targets[t];
        loss += r * r;
        dpred[t] = 2.0 * r * inv_n;
    }
    loss *= inv_n;

    // dy holds the gradient w.r.t. the current layer's output, then is reused
    // for its input.
    FeatureMatrix dy(steps, hd);
    const FeatureMatrix& out = tr.u[cfg_.layers];
    for (std::size_t t = 0; t < steps; ++t) {
        gp[layout_.head_b] += dpred[t];
        const double* y = out.row(t).data();
        double* dyt = dy.row(t).data();
        for (std::size_t k = 0; k < hd; ++k) {
            gp[layout_.head_w + k] += dpred[t] * y[k];
            dyt[k] = dpred[t] * p[layout_.head_w + k];
        }
    }

    std::vector<double> a(hd), da(hd), dh_next(hd), dh(hd), dz(hd), ds(hd);
    for (std::size_t l = cfg_.layers; l-- > 0;) {
        const auto& L = layout_.layers[l];
        for (std::size_t k = 0; k < hd; ++k) {
            a[k] = sigmoid(p[L.raw_a + k]);
        }
        std::fill(da.begin(), da.end(), 0.0);
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        FeatureMatrix du(steps, hd);

        for (std::size_t t = steps; t-- > 0;) {
            const double* u = tr.u[l].row(t).data();
            const double* h = tr.h[l].row(t).data();
            const double* z = tr.z[l].row(t).data();
            const double* gate = tr.gate[l].row(t).data();
            const double* dyt = dy.row(t).data();
            double* dut = du.row(t).data();

            for (std::size_t k = 0; k < hd; ++k) {
                dut[k] += dyt[k];  // residual
                dz[k] = dyt[k] * gate[k];
                ds[k] = dyt[k] * z[k] * gate[k] * (1.0 - gate[k]);
                gp[L.gate_bias + k] += ds[k];
            }
            outer(gp + L.g, hd, hd, ds.data(), u);
            gemv_t(p + L.g, hd, hd, ds.data(), dut);

            outer(gp + L.c, hd, hd, dz.data(), h);
            for (std::size_t k = 0; k < hd; ++k) {
                dh[k] = a[k] * dh_next[k];
            }
            gemv_t(p + L.c, hd, hd, dz.data(), dh.data());

            if (t > 0) {
                const double* prev = tr.h[l].row(t - 1).data();
                for (std::size_t k = 0; k < hd; ++k) {
                    da[k] += dh[k] * prev[k];
                }
            }
            outer(gp + L.b, hd, hd, dh.data(), u);
            gemv_t(p + L.b, hd, hd, dh.data(), dut);
            dh_next.swap(dh);
        }
        for (std::size_t k = 0; k < hd; ++k) {
            gp[L.raw_a + k] += da[k] * a[k] * (1.0 - a[k]);
        }
        dy = std::move(du);
    }

    for (std::size_t t = 0; t < steps; ++t) {
        const double* dut = dy.row(t).data();
        outer(gp + layout_.in_w, hd, d, dut, inputs.row(t).data());
        for (std::size_t k = 0; k < hd; ++k) {
            gp[layout_.in_b + k] += dut[k];
        }
    }
    return loss;
}

ValueGrad testfn_eval_grad(const TestFunction& fn, std::span<const double> point) {
    if (point.size() != fn.dim) {
        throw ShapeError("test function expects " + std::to_string(fn.dim) + " coordinates");
    }
    ValueGrad out;
    out.grad.assign(point.begin(), point.end());
    switch (fn.kind) {
    case TestFunctionKind::Quadratic: {
        double s = 0.0;
        for (double x : point) {
            s += x * x;
        }
        out.value = 0.5 * s;
        break;
    }
    case TestFunctionKind::Rosenbrock: {
        if (fn.dim != 2) {
            throw ShapeError("rosenbrock is defined for dim 2");
        }
        const double x = point[0];
        const double y = point[1];
        const double r = y - x * x;
        out.value = (1.0 - x) * (1.0 - x) + 100.0 * r * r;
        out.grad[0] = -2.0 * (1.0 - x) - 400.0 * x * r;
        out.grad[1] = 200.0 * r;
        break;
    }
    }
    return out;
}

}  // namespace roaree
