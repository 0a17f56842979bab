#include "roaree/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "roaree/errors.hpp"

namespace roaree {

namespace {

// exp(-80) is far below double resolution relative to 1, so clamping here
// leaves tanh/sigmoid outputs unchanged.
constexpr double kSaturation = 40.0;

void check_finite(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("surrogate argument must be finite");
    }
}

double positive_floor(double d) {
    return std::max(d, std::numeric_limits<double>::denorm_min());
}

}  // namespace

void SurrogateSpec::validate() const {
    if (!(std::isfinite(kappa) && kappa > 0.0)) {
        throw ConfigError("surrogate kappa must be finite and > 0");
    }
}

std::string_view to_token(SurrogateKind kind) {
    switch (kind) {
    case SurrogateKind::Tanh: return "tanh";
    case SurrogateKind::Atan: return "atan";
    case SurrogateKind::Softsign: return "softsign";
    case SurrogateKind::Sigmoid: return "sigmoid";
    case SurrogateKind::Erf: return "erf";
    case SurrogateKind::Norm: return "norm";
    }
    return "?";
}

SurrogateKind parse_surrogate(std::string_view token) {
    for (auto kind : kAllSurrogates) {
        if (to_token(kind) == token) {
            return kind;
        }
    }
    throw ConfigError("unknown surrogate: " + std::string(token));
}

// Each branch evaluates on |x| and restores the sign so oddness is exact.
double surrogate_eval(const SurrogateSpec& spec, double x) {
    check_finite(x);
    const double ax = std::fabs(x);
    const double z = spec.kappa * ax;
    double s = 0.0;
    switch (spec.kind) {
    case SurrogateKind::Tanh:
        s = std::tanh(std::min(z, kSaturation));
        break;
    case SurrogateKind::Atan:
        s = 2.0 / std::numbers::pi * std::atan(z);
        break;
    case SurrogateKind::Softsign:
        s = std::isinf(z) ? 1.0 : z / (1.0 + z);
        break;
    case SurrogateKind::Sigmoid: {
        // 2*sigma(z) - 1 = (1 - e^-z) / (1 + e^-z)
        const double e = std::exp(-std::min(z, kSaturation));
        s = -std::expm1(-std::min(z, kSaturation)) / (1.0 + e);
        break;
    }
    case SurrogateKind::Erf:
        s = std::erf(z);
        break;
    case SurrogateKind::Norm:
        s = ax / std::hypot(ax, 1.0);
        break;
    }
    return std::copysign(s, x);
}

double surrogate_derivative(const SurrogateSpec& spec, double x) {
    check_finite(x);
    const double k = spec.kappa;
    const double z = std::fabs(k * x);
    double d = 0.0;
    switch (spec.kind) {
    case SurrogateKind::Tanh: {
        // k * sech^2(z) = 4k e^{-2z} / (1 + e^{-2z})^2
        const double e = std::exp(-2.0 * std::min(z, kSaturation));
        d = 4.0 * k * e / ((1.0 + e) * (1.0 + e));
        break;
    }
    case SurrogateKind::Atan:
        d = 2.0 / std::numbers::pi * k / (1.0 + z * z);
        break;
    case SurrogateKind::Softsign:
        d = k / ((1.0 + z) * (1.0 + z));
        break;
    case SurrogateKind::Sigmoid: {
        const double e = std::exp(-std::min(z, kSaturation));
        d = 2.0 * k * e / ((1.0 + e) * (1.0 + e));
        break;
    }
    case SurrogateKind::Erf:
        d = 2.0 / std::sqrt(std::numbers::pi) * k * std::exp(-z * z);
        break;
    case SurrogateKind::Norm: {
        const double r = std::hypot(x, 1.0);
        d = 1.0 / (r * r * r);
        break;
    }
    }
    return positive_floor(d);
}

}  // namespace roaree
