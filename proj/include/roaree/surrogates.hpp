#pragma once

#include <array>
#include <string>
#include <string_view>

namespace roaree {

/// Smooth odd approximations of sign(x). Norm has no curvature parameter.
enum class SurrogateKind { Tanh, Atan, Softsign, Sigmoid, Erf, Norm };

inline constexpr std::array<SurrogateKind, 6> kAllSurrogates = {
    SurrogateKind::Tanh, SurrogateKind::Atan, SurrogateKind::Softsign,
    SurrogateKind::Sigmoid, SurrogateKind::Erf, SurrogateKind::Norm};

struct SurrogateSpec {
    SurrogateKind kind = SurrogateKind::Tanh;
    double kappa = 10.0;

    /// Throws ConfigError unless kappa is finite and positive.
    void validate() const;
};

std::string_view to_token(SurrogateKind kind);
/// Parses the lowercase token; throws ConfigError on anything else.
SurrogateKind parse_surrogate(std::string_view token);

/// s_kappa(x). Throws DomainError for non-finite x.
double surrogate_eval(const SurrogateSpec& spec, double x);

/// ds/dx, analytic. Floored at the smallest positive double so it stays
/// strictly positive where the true value underflows.
double surrogate_derivative(const SurrogateSpec& spec, double x);

}  // namespace roaree
