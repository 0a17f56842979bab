#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "roaree/errors.hpp"
#include "roaree/surrogates.hpp"

using namespace roaree;

TEST_CASE("surrogate_eval hand values") {
    CHECK(surrogate_eval({SurrogateKind::Tanh, 10.0}, 0.0) == 0.0);
    CHECK(surrogate_eval({SurrogateKind::Softsign, 10.0}, 0.1) == doctest::Approx(0.5).epsilon(1e-15));
    // 2*sigma(100) - 1 = 1 - 7.44e-44 (mpmath, 50 digits)
    CHECK(std::fabs(surrogate_eval({SurrogateKind::Sigmoid, 100.0}, 1.0) - 1.0) < 1e-12);
    CHECK(surrogate_eval({SurrogateKind::Norm, 10.0}, 1.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(surrogate_eval({SurrogateKind::Norm, 1e6}, 1.0) ==
          surrogate_eval({SurrogateKind::Norm, 0.5}, 1.0));
    // erf(0.5) = 0.52049987781304653768... (mpmath)
    CHECK(surrogate_eval({SurrogateKind::Erf, 10.0}, 0.05) ==
          doctest::Approx(0.5204998778130465).epsilon(1e-15));
    CHECK(surrogate_eval({SurrogateKind::Atan, 1.0}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("surrogate_derivative hand values") {
    CHECK(surrogate_derivative({SurrogateKind::Tanh, 10.0}, 0.0) == doctest::Approx(10.0));
    CHECK(surrogate_derivative({SurrogateKind::Norm, 3.0}, 0.0) == doctest::Approx(1.0));
    for (auto kind : kAllSurrogates) {
        const SurrogateSpec s{kind, 7.0};
        CHECK(surrogate_eval(s, 0.0) == 0.0);
        CHECK(surrogate_derivative(s, 0.0) > 0.0);
    }
}

TEST_CASE("non-finite input is a domain error") {
    const double bad[] = {std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::infinity()};
    for (auto kind : kAllSurrogates) {
        for (double x : bad) {
            CHECK_THROWS_AS(surrogate_eval({kind, 10.0}, x), DomainError);
            CHECK_THROWS_AS(surrogate_derivative({kind, 10.0}, x), DomainError);
        }
    }
}

TEST_CASE("extreme finite arguments stay finite and bounded") {
    const double xs[] = {1e300, -1e300, std::numeric_limits<double>::max(), 1e-300, -5e-324};
    for (auto kind : kAllSurrogates) {
        for (double k : {1e-3, 10.0, 1e6, 1e300}) {
            for (double x : xs) {
                const SurrogateSpec s{kind, k};
                const double v = surrogate_eval(s, x);
                CHECK(std::isfinite(v));
                CHECK(std::fabs(v) <= 1.0);
                CHECK(surrogate_derivative(s, x) > 0.0);
            }
        }
    }
}

TEST_CASE("tokens round-trip and reject unknowns") {
    for (auto kind : kAllSurrogates) {
        CHECK(parse_surrogate(to_token(kind)) == kind);
    }
    CHECK_THROWS_AS(parse_surrogate("relu"), ConfigError);
    CHECK_THROWS_AS(parse_surrogate("Tanh"), ConfigError);
    CHECK_THROWS_AS((SurrogateSpec{SurrogateKind::Erf, 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((SurrogateSpec{SurrogateKind::Erf, -1.0}.validate()), ConfigError);
}

TEST_CASE("hard-sign limit at kappa 1e6") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> mag(0.01, 100.0);
    for (auto kind : kAllSurrogates) {
        if (kind == SurrogateKind::Norm) continue;
        const SurrogateSpec s{kind, 1e6};
        for (int i = 0; i < 1000; ++i) {
            const double x = (i % 2 ? 1.0 : -1.0) * mag(gen);
            CHECK(std::fabs(surrogate_eval(s, x) - (x > 0 ? 1.0 : -1.0)) < 1e-3);
        }
    }
}

TEST_CASE("property: odd, bounded, monotone") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (auto kind : kAllSurrogates) {
        for (double k : {0.5, 10.0, 100.0, 1000.0}) {
            const SurrogateSpec s{kind, k};
            std::vector<double> xs(1000);
            for (double& x : xs) x = dist(gen);
            for (double x : xs) {
                const double a = surrogate_eval(s, x);
                const double b = surrogate_eval(s, -x);
                CHECK(std::fabs(a + b) <= 1e-15 * std::max(1.0, std::fabs(a)));
                CHECK(std::fabs(a) <= 1.0);
                // strict bound wherever the true value is representably below 1
                if (std::fabs(k * x) < 5.0) CHECK(std::fabs(a) < 1.0);
            }
            std::sort(xs.begin(), xs.end());
            for (std::size_t i = 1; i < xs.size(); ++i) {
                CHECK(surrogate_eval(s, xs[i - 1]) <= surrogate_eval(s, xs[i]));
            }
        }
    }
}

TEST_CASE("derivative matches central differences away from saturation") {
    std::mt19937_64 gen(5);
    for (auto kind : kAllSurrogates) {
        for (double k : {0.5, 10.0, 100.0, 1000.0}) {
            const SurrogateSpec s{kind, k};
            std::uniform_real_distribution<double> dist(-5.0 / k, 5.0 / k);
            for (int i = 0; i < 200; ++i) {
                const double x = dist(gen);
                const double h = 1e-6 * std::max(1.0, std::fabs(x));
                const double fd = (surrogate_eval(s, x + h) - surrogate_eval(s, x - h)) / (2.0 * h);
                const double an = surrogate_derivative(s, x);
                // rounding floor of the difference quotient: |s| <= 1, so eps / h
                const double noise = 4.0 * std::numeric_limits<double>::epsilon() / h;
                CHECK(std::fabs(fd - an) <= 1e-5 * std::fabs(an) + noise);
            }
        }
    }
}
