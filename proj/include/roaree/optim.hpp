#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "roaree/surrogates.hpp"

namespace roaree {

enum class Method { SGD, Momentum, Nesterov, RMSProp, Adagrad, Adam, AdamW, Lion, Roaree };

inline constexpr std::array<Method, 9> kAllMethods = {
    Method::SGD, Method::Momentum, Method::Nesterov, Method::RMSProp, Method::Adagrad,
    Method::Adam, Method::AdamW, Method::Lion, Method::Roaree};

inline constexpr std::array<Method, 8> kBaselineMethods = {
    Method::SGD, Method::Momentum, Method::Nesterov, Method::RMSProp,
    Method::Adagrad, Method::Adam, Method::AdamW, Method::Lion};

std::string_view to_token(Method method);
Method parse_method(std::string_view token);

/// Flat parameters and their gradient, index-aligned.
struct ParamVector {
    std::vector<double> values;
    std::vector<double> grads;

    ParamVector() = default;
    explicit ParamVector(std::size_t n) : values(n, 0.0), grads(n, 0.0) {}

    std::size_t size() const noexcept { return values.size(); }
    void zero_grad();
};

/// Hyper-parameters for every method. Fields a method does not use are ignored.
///
/// beta1/beta2 are Adam's moment decays, RMSProp's alpha (beta2), and Lion's
/// update-interpolation (beta1) and momentum-retention (beta2) constants.
struct Hyper {
    double lr = 1e-3;
    double wd = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double momentum = 0.9;
    SurrogateSpec surrogate{};

    /// Standard per-method constants with the given learning rate and decay.
    static Hyper defaults(Method method, double lr, double wd = 0.0);

    void validate() const;
};

struct OptimizerState {
    Method method = Method::SGD;
    std::vector<double> slot1;
    std::vector<double> slot2;
    std::uint64_t step_count = 0;
};

/// Zeroed slots sized for `method`. Throws ConfigError when param_len is 0.
OptimizerState init_state(Method method, std::size_t param_len);

/// One in-place update of `params.values` from `params.grads`.
///
/// Throws ShapeError if lengths disagree, DivergenceError (indexed by the
/// pre-increment step count) if any parameter becomes non-finite.
void step(OptimizerState& state, ParamVector& params, const Hyper& hyper);

/// sign with sign(0) = 0.
inline double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace roaree
