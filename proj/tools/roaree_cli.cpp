// roaree: optimizer benchmarking CLI.
//
//   roaree gen-data --synthetic-weeks 1040 --seed 7 --out weekly.csv
//   roaree run --optimizer roaree --surrogate erf --kappa 10 --lr 1e-3 --out out/
//   roaree sweep --grid roaree-small --out out/ --workers 4
//   roaree report --out out/ --metric test_mse

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "roaree/errors.hpp"
#include "roaree/harness.hpp"

namespace {

struct DataOptions {
    std::string path;
    std::size_t synthetic_weeks = 1040;
    std::optional<std::uint64_t> data_seed;
};

roaree::PreparedData load_data(const DataOptions& opt, std::uint64_t seed) {
    const auto rows = opt.path.empty()
                          ? roaree::generate_synthetic(opt.data_seed.value_or(seed), opt.synthetic_weeks)
                          : roaree::load_csv(opt.path);
    return roaree::prepare(rows);
}

void add_data_flags(CLI::App* cmd, DataOptions& opt) {
    cmd->add_option("--data", opt.path, "Weekly feature CSV (synthetic data when omitted)");
    cmd->add_option("--synthetic-weeks", opt.synthetic_weeks, "Length of the synthetic series")
        ->check(CLI::Range(std::size_t{120}, std::size_t{1} << 24));
    cmd->add_option("--data-seed", opt.data_seed, "Synthetic data seed (defaults to --seed)");
}

std::size_t resolve_workers(std::optional<std::size_t> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("ROAREE_WORKERS")) {
        try {
            return static_cast<std::size_t>(std::stoul(env));
        } catch (const std::exception&) {
            throw roaree::ConfigError(std::string("ROAREE_WORKERS is not a number: ") + env);
        }
    }
    return 0;
}

roaree::Objective parse_objective(const std::string& s) {
    if (s == "min") return roaree::Objective::Min;
    if (s == "max") return roaree::Objective::Max;
    throw roaree::ConfigError("objective must be min or max");
}

void print_record(const roaree::RunRecord& r) {
    std::cout << r.config.label() << " lr=" << r.config.lr << " wd=" << r.config.wd
              << " epochs=" << r.epochs_completed();
    if (r.diverged()) {
        std::cout << " DIVERGED at epoch " << *r.diverged_epoch << '\n';
        return;
    }
    if (r.test) {
        const auto& m = r.test->regression;
        std::cout << " test_mse=" << m.mse << " rmse=" << m.rmse << " mae=" << m.mae
                  << " r2=" << (m.r2 ? std::to_string(*m.r2) : "undefined")
                  << " dir_acc=" << r.test->directional_accuracy;
        if (r.test->avg_epoch_seconds) std::cout << " avg_epoch_s=" << *r.test->avg_epoch_seconds;
    }
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimizer benchmark harness for sign-momentum and smooth-sign optimizers"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::size_t epochs = roaree::kDefaultEpochs;
    std::size_t hidden = 64;
    std::size_t layers = 2;
    std::string out_dir = "results";
    DataOptions data_opt;
    std::optional<std::size_t> workers;

    auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Initialization (and synthetic data) seed");
        cmd->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
        cmd->add_option("--hidden", hidden, "Hidden width")->capture_default_str();
        cmd->add_option("--layers", layers, "State-space layers")->capture_default_str();
        add_data_flags(cmd, data_opt);
    };

    // run
    auto* run = app.add_subcommand("run", "Train a single configuration");
    std::string optimizer = "adam";
    double lr = 1e-3, wd = 0.0, kappa = 10.0;
    std::string surrogate = "erf";
    run->add_option("--optimizer", optimizer, "sgd|momentum|nesterov|rmsprop|adagrad|adam|adamw|lion|roaree");
    run->add_option("--lr", lr);
    run->add_option("--wd", wd);
    run->add_option("--surrogate", surrogate, "tanh|atan|softsign|sigmoid|erf|norm (roaree)");
    run->add_option("--kappa", kappa, "Surrogate curvature (roaree)");
    run->add_option("--out", out_dir, "Output directory");
    add_model_flags(run);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a hyper-parameter grid");
    std::string grid_name;
    std::vector<std::string> optimizers, surrogates;
    std::vector<double> lrs, wds, kappas;
    sweep->add_option("--grid", grid_name, "Preset: baseline-large, baseline-small, roaree-small");
    sweep->add_option("--optimizer", optimizers, "Comma-separated methods (overrides preset)")->delimiter(',');
    sweep->add_option("--lr", lrs, "Comma-separated learning rates")->delimiter(',');
    sweep->add_option("--wd", wds, "Comma-separated weight decays")->delimiter(',');
    sweep->add_option("--surrogate", surrogates, "Comma-separated surrogates")->delimiter(',');
    sweep->add_option("--kappa", kappas, "Comma-separated curvatures")->delimiter(',');
    sweep->add_option("--workers", workers, "Worker threads (0 = all cores; env ROAREE_WORKERS)");
    sweep->add_option("--out", out_dir, "Output directory");
    add_model_flags(sweep);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "Write a synthetic weekly feature CSV");
    std::string csv_out = "synthetic.csv";
    gen->add_option("--seed", seed);
    gen->add_option("--synthetic-weeks", data_opt.synthetic_weeks)->capture_default_str();
    gen->add_option("--out", csv_out, "CSV path")->capture_default_str();

    // report
    auto* report = app.add_subcommand("report", "Summarize results.csv: best run per label");
    std::string metric = "test_mse", objective = "min";
    report->add_option("--out", out_dir, "Directory containing results.csv");
    report->add_option("--metric", metric)->capture_default_str();
    report->add_option("--objective", objective, "min|max")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        roaree::SSMConfig model;
        model.hidden = hidden;
        model.layers = layers;

        if (*gen) {
            roaree::write_csv(csv_out, roaree::generate_synthetic(seed, data_opt.synthetic_weeks));
            std::cout << "wrote " << data_opt.synthetic_weeks << " weeks to " << csv_out << '\n';
        } else if (*run) {
            roaree::RunConfig cfg;
            cfg.method = roaree::parse_method(optimizer);
            cfg.lr = lr;
            cfg.wd = wd;
            cfg.surrogate = {roaree::parse_surrogate(surrogate), kappa};
            cfg.seed = seed;
            cfg.epochs = epochs;
            cfg.model = model;
            const auto data = load_data(data_opt, seed);
            const auto record = roaree::run_training(cfg, data);
            print_record(record);
            roaree::emit_results({record}, out_dir);
        } else if (*sweep) {
            roaree::GridConfig grid;
            if (!grid_name.empty()) {
                grid = roaree::GridConfig::preset(grid_name);
            } else if (optimizers.empty()) {
                throw roaree::ConfigError("sweep needs --grid or --optimizer");
            }
            if (!optimizers.empty()) {
                grid.optimizers.clear();
                for (const auto& o : optimizers) grid.optimizers.push_back(roaree::parse_method(o));
            }
            if (!lrs.empty()) grid.lr_grid = lrs;
            if (!wds.empty()) grid.wd_grid = wds;
            if (!surrogates.empty()) {
                grid.surrogates.clear();
                for (const auto& s : surrogates) grid.surrogates.push_back(roaree::parse_surrogate(s));
            }
            if (!kappas.empty()) grid.kappa_grid = kappas;
            grid.epochs = epochs;
            grid.seed = seed;
            grid.model = model;

            const auto points = roaree::expand_grid(grid).size();
            const auto data = load_data(data_opt, seed);
            std::cerr << "sweeping " << points << " configurations\n";
            const auto records = roaree::grid_sweep(grid, data, resolve_workers(workers));
            std::size_t diverged = 0;
            for (const auto& r : records) diverged += r.diverged() ? 1 : 0;
            roaree::emit_results(records, out_dir);
            std::cout << records.size() << " runs, " << diverged << " diverged, results in "
                      << out_dir << '\n';
        } else if (*report) {
            std::cout << roaree::report_results(std::filesystem::path(out_dir) / "results.csv",
                                                metric, parse_objective(objective));
        }
    } catch (const roaree::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
