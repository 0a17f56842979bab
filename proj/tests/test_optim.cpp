#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "roaree/errors.hpp"
#include "roaree/model.hpp"
#include "roaree/optim.hpp"

using namespace roaree;

namespace {

// one step from theta = 1, g = 0.5 with lr = 0.1, wd = 0.1 and default constants
double one_step(Method m) {
    ParamVector p(1);
    p.values[0] = 1.0;
    p.grads[0] = 0.5;
    auto s = init_state(m, 1);
    step(s, p, Hyper::defaults(m, 0.1, 0.1));
    return p.values[0];
}

}  // namespace

TEST_CASE("init_state allocates zeroed slots per method") {
    auto adam = init_state(Method::Adam, 10);
    CHECK(adam.slot1 == std::vector<double>(10, 0.0));
    CHECK(adam.slot2 == std::vector<double>(10, 0.0));
    CHECK(adam.step_count == 0);
    auto sgd = init_state(Method::SGD, 5);
    CHECK(sgd.slot1.empty());
    CHECK(sgd.slot2.empty());
    auto roaree = init_state(Method::Roaree, 3);
    CHECK(roaree.slot1 == std::vector<double>(3, 0.0));
    CHECK(roaree.slot2.empty());
    CHECK_THROWS_AS(init_state(Method::Adam, 0), ConfigError);
}

TEST_CASE("hand-evaluated single steps") {
    CHECK(one_step(Method::SGD) == doctest::Approx(0.94).epsilon(1e-14));
    // v = 0.6, theta -= 0.1 * 0.6
    CHECK(one_step(Method::Momentum) == doctest::Approx(0.94).epsilon(1e-14));
    // theta -= 0.1 * (0.6 + 0.9 * 0.6)
    CHECK(one_step(Method::Nesterov) == doctest::Approx(0.886).epsilon(1e-14));
    // a = 0.25: theta -= 0.1 * 0.5 / (0.5 + 1e-8) + 0.01
    CHECK(one_step(Method::Adagrad) == doctest::Approx(1.0 - 0.05 / (0.5 + 1e-8) - 0.01).epsilon(1e-14));
    // a = 0.01 * 0.25, sqrt(a) = 0.05
    CHECK(one_step(Method::RMSProp) == doctest::Approx(1.0 - 0.05 / (0.05 + 1e-8) - 0.01).epsilon(1e-12));
    // coupled: g = 0.6, first Adam step moves lr * sign(g)
    CHECK(one_step(Method::Adam) == doctest::Approx(1.0 - 0.1 * 0.6 / (0.6 + 1e-8)).epsilon(1e-14));
    // decoupled: 1 - 0.1 * (1 + 0.1)
    CHECK(one_step(Method::AdamW) == doctest::Approx(1.0 - 0.1 * (0.5 / (0.5 + 1e-8) + 0.1)).epsilon(1e-14));
    // c = 0.05 > 0: 1 - 0.1 * (1 + 0.1)
    CHECK(one_step(Method::Lion) == doctest::Approx(0.89).epsilon(1e-14));
}

TEST_CASE("momentum and lion state updates over two steps") {
    ParamVector p(1);
    p.values[0] = 1.0;
    auto s = init_state(Method::Momentum, 1);
    const Hyper h = Hyper::defaults(Method::Momentum, 0.1);
    p.grads[0] = 1.0;
    step(s, p, h);  // v = 1, theta = 0.9
    p.grads[0] = 1.0;
    step(s, p, h);  // v = 1.9, theta = 0.71
    CHECK(s.slot1[0] == doctest::Approx(1.9));
    CHECK(p.values[0] == doctest::Approx(0.71));
    CHECK(s.step_count == 2);

    ParamVector q(1);
    auto ls = init_state(Method::Lion, 1);
    const Hyper lh = Hyper::defaults(Method::Lion, 0.01);
    q.grads[0] = 2.0;
    step(ls, q, lh);
    CHECK(ls.slot1[0] == doctest::Approx(0.02));  // (1 - 0.99) * 2
    q.grads[0] = -0.1;
    step(ls, q, lh);  // c = 0.9 * 0.02 + 0.1 * -0.1 = 0.008 > 0
    CHECK(q.values[0] == doctest::Approx(-0.02));
}

TEST_CASE("lion is a no-op on zero gradient and zero momentum") {
    ParamVector p(4);
    p.values = {1.0, -2.0, 0.5, 0.0};
    const auto before = p.values;
    auto s = init_state(Method::Lion, 4);
    step(s, p, Hyper::defaults(Method::Lion, 0.1, 0.0));
    CHECK(p.values == before);
    CHECK(s.step_count == 1);
}

TEST_CASE("adam first step moves every coordinate by lr") {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> dist(0.0, 3.0);
    ParamVector p(50);
    for (std::size_t i = 0; i < p.size(); ++i) {
        p.values[i] = dist(gen);
        p.grads[i] = dist(gen);
        if (p.grads[i] == 0.0) p.grads[i] = 1.0;
    }
    const auto before = p.values;
    auto s = init_state(Method::Adam, p.size());
    Hyper h = Hyper::defaults(Method::Adam, 1e-3);
    h.eps = 1e-300;
    step(s, p, h);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(std::fabs(p.values[i] - before[i]) == doctest::Approx(1e-3).epsilon(1e-12));
    }
}

TEST_CASE("roaree erf one-step hand evaluation") {
    ParamVector p(1);
    p.values[0] = 1.0;
    p.grads[0] = 0.5;
    auto s = init_state(Method::Roaree, 1);
    Hyper h = Hyper::defaults(Method::Roaree, 1e-3, 0.0);
    h.surrogate = {SurrogateKind::Erf, 10.0};
    step(s, p, h);
    // c = 0.05, kappa * c = 0.5, erf(0.5) = 0.5204998778130465 (mpmath)
    CHECK(p.values[0] - 1.0 == doctest::Approx(-1e-3 * 0.5204998778130465).epsilon(1e-13));
    CHECK(s.slot1[0] == doctest::Approx(0.005));
}

TEST_CASE("roaree with huge kappa follows lion when |c| stays large") {
    const std::size_t n = 10;
    ParamVector lion(n), roaree(n);
    for (std::size_t i = 0; i < n; ++i) {
        lion.values[i] = roaree.values[i] = 0.1 * static_cast<double>(i);
    }
    auto ls = init_state(Method::Lion, n);
    auto rs = init_state(Method::Roaree, n);
    const Hyper lh = Hyper::defaults(Method::Lion, 1e-3);
    Hyper rh = lh;
    rh.surrogate = {SurrogateKind::Tanh, 1e6};
    // minimum at 10 in every coordinate, far beyond 100 steps of size 1e-3
    for (int t = 0; t < 100; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            lion.grads[i] = lion.values[i] - 10.0;
            roaree.grads[i] = roaree.values[i] - 10.0;
        }
        step(ls, lion, lh);
        step(rs, roaree, rh);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::fabs(lion.values[i] - roaree.values[i]) <= 1e-6);
        }
    }
}

TEST_CASE("adamw decays geometrically on zero gradient, adam without decay holds") {
    const double lr = 0.01, wd = 0.1;
    ParamVector w(3), a(3);
    w.values = a.values = {1.0, -2.0, 3.0};
    auto ws = init_state(Method::AdamW, 3);
    auto as = init_state(Method::Adam, 3);
    for (int t = 1; t <= 20; ++t) {
        step(ws, w, Hyper::defaults(Method::AdamW, lr, wd));
        step(as, a, Hyper::defaults(Method::Adam, lr, 0.0));
        const double factor = std::pow(1.0 - lr * wd, t);
        CHECK(w.values[0] == doctest::Approx(factor).epsilon(1e-12));
        CHECK(w.values[1] == doctest::Approx(-2.0 * factor).epsilon(1e-12));
    }
    CHECK(a.values == std::vector<double>{1.0, -2.0, 3.0});
}

TEST_CASE("property: lion and roaree steps are bounded by lr without decay") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> wide(-100.0, 100.0);
    std::uniform_real_distribution<double> unit(0.0, 0.999);
    std::uniform_int_distribution<int> pick(0, 5);
    std::uniform_real_distribution<double> logk(-1.0, 6.0);
    for (int trial = 0; trial < 20000; ++trial) {
        const Method m = trial % 2 ? Method::Lion : Method::Roaree;
        ParamVector p(1);
        p.values[0] = wide(gen);
        p.grads[0] = wide(gen);
        auto s = init_state(m, 1);
        s.slot1[0] = wide(gen);
        Hyper h = Hyper::defaults(m, std::pow(10.0, -logk(gen) / 2.0), 0.0);
        h.beta1 = unit(gen);
        h.beta2 = unit(gen);
        h.surrogate = {kAllSurrogates[static_cast<std::size_t>(pick(gen))], std::pow(10.0, logk(gen))};
        const double before = p.values[0];
        step(s, p, h);
        // the subtraction itself may round by half an ulp of the larger endpoint
        const double mag = std::max(std::fabs(before), std::fabs(p.values[0]));
        const double ulp = std::nextafter(mag, INFINITY) - mag;
        CHECK(std::fabs(p.values[0] - before) <= h.lr + ulp);
    }
}

TEST_CASE("steps are deterministic") {
    for (Method m : kAllMethods) {
        auto run = [m] {
            ParamVector p(8);
            for (std::size_t i = 0; i < 8; ++i) p.values[i] = std::sin(static_cast<double>(i));
            auto s = init_state(m, 8);
            Hyper h = Hyper::defaults(m, 0.01, 0.01);
            for (int t = 0; t < 25; ++t) {
                for (std::size_t i = 0; i < 8; ++i) p.grads[i] = std::cos(p.values[i] * 3.0 + t);
                step(s, p, h);
            }
            return p.values;
        };
        CHECK(run() == run());
    }
}

TEST_CASE("every method descends on rosenbrock from the origin") {
    const TestFunction fn{TestFunctionKind::Rosenbrock, 2};
    for (Method m : kAllMethods) {
        ParamVector p(2);
        auto s = init_state(m, 2);
        const Hyper h = Hyper::defaults(m, 1e-3);
        const double f0 = testfn_eval_grad(fn, p.values).value;
        for (int t = 0; t < 200; ++t) {
            p.grads = testfn_eval_grad(fn, p.values).grad;
            step(s, p, h);
        }
        CAPTURE(to_token(m));
        CHECK(testfn_eval_grad(fn, p.values).value < f0);
    }
}

TEST_CASE("divergence is reported with the step index") {
    ParamVector p(2);
    p.values = {1.0, 1.0};
    auto s = init_state(Method::SGD, 2);
    const Hyper h = Hyper::defaults(Method::SGD, 1.0);
    p.grads = {1.0, 1.0};
    step(s, p, h);
    p.grads = {std::numeric_limits<double>::max(), 0.0};
    p.values[0] = -std::numeric_limits<double>::max();
    try {
        step(s, p, h);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.index() == 1);
    }

    ParamVector q(1);
    q.grads[0] = std::numeric_limits<double>::quiet_NaN();
    for (Method m : {Method::Lion, Method::Roaree, Method::Adam}) {
        auto st = init_state(m, 1);
        CHECK_THROWS_AS(step(st, q, Hyper::defaults(m, 0.1)), DivergenceError);
        q.values[0] = 0.0;
    }
}

TEST_CASE("shape and hyper-parameter validation") {
    ParamVector p(3);
    p.grads.resize(2);
    auto s = init_state(Method::Adam, 3);
    CHECK_THROWS_AS(step(s, p, Hyper::defaults(Method::Adam, 0.1)), ShapeError);

    ParamVector q(4);
    CHECK_THROWS_AS(step(s, q, Hyper::defaults(Method::Adam, 0.1)), ShapeError);

    CHECK_THROWS_AS(Hyper::defaults(Method::Adam, 0.0).validate(), ConfigError);
    CHECK_THROWS_AS(Hyper::defaults(Method::Adam, 0.1, -1.0).validate(), ConfigError);
    Hyper h = Hyper::defaults(Method::Lion, 0.1);
    h.beta2 = 1.0;
    CHECK_THROWS_AS(h.validate(), ConfigError);
    CHECK_NOTHROW(Hyper::defaults(Method::Roaree, 0.1, 0.1).validate());

    for (Method m : kAllMethods) CHECK(parse_method(to_token(m)) == m);
    CHECK_THROWS_AS(parse_method("sophia"), ConfigError);
    CHECK(sign0(0.0) == 0.0);
    CHECK(sign0(-0.0) == 0.0);
    CHECK(sign0(-3.0) == -1.0);
}
