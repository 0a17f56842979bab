#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "roaree/data.hpp"
#include "roaree/errors.hpp"
#include "roaree/harness.hpp"
#include "roaree/metrics.hpp"
#include "roaree/model.hpp"
#include "roaree/optim.hpp"
#include "roaree/surrogates.hpp"

namespace py = pybind11;

namespace {

py::object opt(const std::optional<double>& v) {
    return v ? py::cast(*v) : py::none();
}

py::dict record_to_dict(const roaree::RunRecord& r) {
    py::dict d;
    d["method"] = std::string(roaree::to_token(r.config.method));
    d["label"] = r.config.label();
    d["lr"] = r.config.lr;
    d["wd"] = r.config.wd;
    d["surrogate"] = std::string(roaree::to_token(r.config.surrogate.kind));
    d["kappa"] = r.config.surrogate.kappa;
    d["seed"] = r.config.seed;
    d["epochs"] = r.config.epochs;
    d["train_loss"] = r.train_loss;
    d["val_loss"] = r.val_loss;
    d["epoch_seconds"] = r.epoch_seconds;
    d["oscillation_score"] = r.oscillation_score();
    d["diverged_epoch"] = r.diverged_epoch ? py::cast(*r.diverged_epoch) : py::none();
    if (r.test) {
        py::dict t;
        t["mse"] = r.test->regression.mse;
        t["rmse"] = r.test->regression.rmse;
        t["mae"] = r.test->regression.mae;
        t["r2"] = opt(r.test->regression.r2);
        t["directional_accuracy"] = r.test->directional_accuracy;
        t["avg_epoch_seconds"] = opt(r.test->avg_epoch_seconds);
        d["test"] = t;
    } else {
        d["test"] = py::none();
    }
    return d;
}

roaree::PreparedData load_data(const std::optional<std::filesystem::path>& path,
                               std::uint64_t data_seed, std::size_t synthetic_weeks) {
    return roaree::prepare(path ? roaree::load_csv(*path)
                                : roaree::generate_synthetic(data_seed, synthetic_weeks));
}

// Single-configuration optimizer over a flat parameter list.
class Optimizer {
public:
    Optimizer(const std::string& method, std::size_t n, double lr, double wd,
              const std::string& surrogate, double kappa)
        : state_(roaree::init_state(roaree::parse_method(method), n)),
          hyper_(roaree::Hyper::defaults(state_.method, lr, wd)) {
        hyper_.surrogate = {roaree::parse_surrogate(surrogate), kappa};
        hyper_.validate();
    }

    std::vector<double> step(std::vector<double> values, std::vector<double> grads) {
        roaree::ParamVector p;
        p.values = std::move(values);
        p.grads = std::move(grads);
        roaree::step(state_, p, hyper_);
        return std::move(p.values);
    }

    std::uint64_t step_count() const { return state_.step_count; }

private:
    roaree::OptimizerState state_;
    roaree::Hyper hyper_;
};

}  // namespace

PYBIND11_MODULE(_roaree, m) {
    m.doc() = "Optimizer kernels, smooth sign surrogates and the benchmarking harness";

    py::register_exception<roaree::Error>(m, "RoareeError", PyExc_RuntimeError);
    py::register_exception<roaree::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<roaree::InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);
    py::register_exception<roaree::DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<roaree::ShapeError>(m, "ShapeError", PyExc_ValueError);

    m.def(
        "surrogate_eval",
        [](const std::string& kind, double kappa, double x) {
            return roaree::surrogate_eval({roaree::parse_surrogate(kind), kappa}, x);
        },
        py::arg("kind"), py::arg("kappa"), py::arg("x"));
    m.def(
        "surrogate_derivative",
        [](const std::string& kind, double kappa, double x) {
            return roaree::surrogate_derivative({roaree::parse_surrogate(kind), kappa}, x);
        },
        py::arg("kind"), py::arg("kappa"), py::arg("x"));

    py::class_<Optimizer>(m, "Optimizer")
        .def(py::init<const std::string&, std::size_t, double, double, const std::string&, double>(),
             py::arg("method"), py::arg("n"), py::arg("lr"), py::arg("wd") = 0.0,
             py::arg("surrogate") = "erf", py::arg("kappa") = 10.0)
        .def("step", &Optimizer::step, py::arg("values"), py::arg("grads"))
        .def_property_readonly("step_count", &Optimizer::step_count);

    m.def(
        "regression_metrics",
        [](const std::vector<double>& p, const std::vector<double>& t) {
            const auto r = roaree::regression_metrics(p, t);
            py::dict d;
            d["mse"] = r.mse;
            d["rmse"] = r.rmse;
            d["mae"] = r.mae;
            d["r2"] = opt(r.r2);
            return d;
        },
        py::arg("predictions"), py::arg("targets"));
    m.def(
        "directional_accuracy",
        [](const std::vector<double>& p, const std::vector<double>& t) {
            return roaree::directional_accuracy(p, t);
        },
        py::arg("predictions"), py::arg("targets"));

    m.def(
        "rosenbrock",
        [](std::vector<double> point) {
            auto r = roaree::testfn_eval_grad({roaree::TestFunctionKind::Rosenbrock, 2}, point);
            return py::make_tuple(r.value, r.grad);
        },
        py::arg("point"));

    m.def(
        "generate_synthetic_csv",
        [](const std::filesystem::path& path, std::uint64_t seed, std::size_t weeks) {
            roaree::write_csv(path, roaree::generate_synthetic(seed, weeks));
        },
        py::arg("path"), py::arg("seed"), py::arg("weeks"));
    m.def(
        "split_sizes",
        [](const std::filesystem::path& path) {
            const auto data = roaree::prepare(roaree::load_csv(path));
            return py::make_tuple(data.split.train.size(), data.split.val.size(),
                                  data.split.test.size());
        },
        py::arg("path"));

    m.def(
        "run_training",
        [](const std::string& method, double lr, double wd, const std::string& surrogate,
           double kappa, std::uint64_t seed, std::size_t epochs, std::size_t hidden,
           std::size_t layers, std::optional<std::filesystem::path> data,
           std::size_t synthetic_weeks) {
            roaree::RunConfig c;
            c.method = roaree::parse_method(method);
            c.lr = lr;
            c.wd = wd;
            c.surrogate = {roaree::parse_surrogate(surrogate), kappa};
            c.seed = seed;
            c.epochs = epochs;
            c.model.hidden = hidden;
            c.model.layers = layers;
            const auto prepared = load_data(data, seed, synthetic_weeks);
            roaree::RunRecord rec;
            {
                py::gil_scoped_release release;
                rec = roaree::run_training(c, prepared);
            }
            return record_to_dict(rec);
        },
        py::arg("method"), py::arg("lr"), py::arg("wd") = 0.0, py::arg("surrogate") = "erf",
        py::arg("kappa") = 10.0, py::arg("seed") = 0, py::arg("epochs") = roaree::kDefaultEpochs,
        py::arg("hidden") = 64, py::arg("layers") = 2, py::arg("data") = py::none(),
        py::arg("synthetic_weeks") = 1040);

    m.def(
        "grid_sweep",
        [](const std::string& preset, std::uint64_t seed, std::size_t epochs, std::size_t hidden,
           std::size_t layers, std::optional<std::filesystem::path> data,
           std::size_t synthetic_weeks, std::optional<std::filesystem::path> out_dir,
           std::size_t workers) {
            auto grid = roaree::GridConfig::preset(preset);
            grid.seed = seed;
            grid.epochs = epochs;
            grid.model.hidden = hidden;
            grid.model.layers = layers;
            const auto prepared = load_data(data, seed, synthetic_weeks);
            std::vector<roaree::RunRecord> records;
            {
                py::gil_scoped_release release;
                records = roaree::grid_sweep(grid, prepared, workers);
                if (out_dir) roaree::emit_results(records, *out_dir);
            }
            py::list out;
            for (const auto& r : records) out.append(record_to_dict(r));
            return out;
        },
        py::arg("preset"), py::arg("seed") = 0, py::arg("epochs") = roaree::kDefaultEpochs,
        py::arg("hidden") = 64, py::arg("layers") = 2, py::arg("data") = py::none(),
        py::arg("synthetic_weeks") = 1040, py::arg("out_dir") = py::none(),
        py::arg("workers") = 0);
}
