#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "roaree/matrix.hpp"
#include "roaree/optim.hpp"

namespace roaree {

struct SSMConfig {
    std::size_t input_dim = 17;
    std::size_t hidden = 64;
    std::size_t layers = 2;
};

/// Offsets into the flat parameter array. Matrices are row-major (out x in).
///
///   in_w   hidden x input_dim   input projection
///   in_b   hidden
///   per layer:
///     raw_a      hidden         a = sigmoid(raw_a), diagonal transition
///     b          hidden x hidden
///     c          hidden x hidden
///     g          hidden x hidden  gate weights
///     gate_bias  hidden
///   head_w hidden
///   head_b 1
struct SSMLayout {
    struct Layer {
        std::size_t raw_a, b, c, g, gate_bias;
    };
    std::size_t in_w = 0;
    std::size_t in_b = 0;
    std::vector<Layer> layers;
    std::size_t head_w = 0;
    std::size_t head_b = 0;
    std::size_t total = 0;

    static SSMLayout make(const SSMConfig& cfg);
};

/// Causal gated diagonal state-space regressor with one scalar prediction per step.
///
/// Per layer, with u_t the layer input:
///   h_t = a * h_{t-1} + B u_t
///   y_t = (C h_t) * sigmoid(G u_t + gate_bias) + u_t
/// The first layer input is in_w x_t + in_b; the prediction is head_w . u_t + head_b
/// on the last layer output.
class SSMRegressor {
public:
    explicit SSMRegressor(SSMConfig cfg);

    const SSMConfig& config() const noexcept { return cfg_; }
    const SSMLayout& layout() const noexcept { return layout_; }
    ParamVector& params() noexcept { return params_; }
    const ParamVector& params() const noexcept { return params_; }

    /// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every block, drawn in layout order.
    void init_params(std::uint64_t seed);

    /// Throws ShapeError if inputs.cols != input_dim, DomainError on non-finite input.
    std::vector<double> forward(const FeatureMatrix& inputs) const;

    /// Mean squared error over the sequence; overwrites params().grads with its gradient.
    double backward(const FeatureMatrix& inputs, std::span<const double> targets);

private:
    struct Trace;
    void run(const FeatureMatrix& inputs, Trace& trace) const;

    SSMConfig cfg_;
    SSMLayout layout_;
    ParamVector params_;
};

/// Analytic objectives for exercising optimizers without the model.
enum class TestFunctionKind { Quadratic, Rosenbrock };

struct TestFunction {
    TestFunctionKind kind = TestFunctionKind::Quadratic;
    std::size_t dim = 2;
};

struct ValueGrad {
    double value = 0.0;
    std::vector<double> grad;
};

/// Quadratic: 0.5 |x|^2. Rosenbrock (dim 2): (1-x)^2 + 100 (y - x^2)^2.
ValueGrad testfn_eval_grad(const TestFunction& fn, std::span<const double> point);

}  // namespace roaree
