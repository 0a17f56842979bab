#include "roaree/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "roaree/errors.hpp"
#include "roaree/format.hpp"

namespace roaree {

Hyper RunConfig::hyper() const {
    Hyper h = Hyper::defaults(method, lr, wd);
    h.surrogate = surrogate;
    return h;
}

std::string RunConfig::label() const {
    std::string s(to_token(method));
    if (method == Method::Roaree) {
        s += '_';
        s += to_token(surrogate.kind);
        s += "_k";
        s += format_double(surrogate.kappa);
    }
    return s;
}

double RunRecord::oscillation_score() const {
    const std::size_t n = val_loss.size();
    if (n < 2) return 0.0;
    const std::size_t first = n > kOscillationWindow ? n - kOscillationWindow : 1;
    double s = 0.0;
    for (std::size_t e = first; e < n; ++e) {
        s += std::fabs(val_loss[e] - val_loss[e - 1]);
    }
    return s;
}

namespace {

double mse_over(std::span<const double> pred, std::span<const double> target) {
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred[i] - target[i];
        s += r * r;
    }
    return s / static_cast<double>(pred.size());
}

}  // namespace

RunRecord run_training(const RunConfig& config, const PreparedData& data) {
    const Hyper hyper = config.hyper();
    hyper.validate();

    RunRecord rec;
    rec.config = config;

    const auto& split = data.split;
    SSMConfig mcfg = config.model;
    mcfg.input_dim = data.features.cols;
    SSMRegressor model(mcfg);
    model.init_params(config.seed);
    OptimizerState state = init_state(config.method, model.params().size());

    const FeatureMatrix train_x = data.features.slice(0, split.train.end);
    const std::span<const double> train_y(split.target.data(), split.train.end);
    // Validation runs the causal model over the prefix ending at the val block
    // and scores only the val rows.
    const FeatureMatrix val_x = data.features.slice(0, split.val.end);
    const std::span<const double> val_y(split.target.data() + split.val.begin, split.val.size());

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double loss = 0.0;
        bool failed = false;
        const double seconds = time_epoch([&] {
            loss = model.backward(train_x, train_y);
            if (!std::isfinite(loss)) {
                failed = true;
                return;
            }
            try {
                step(state, model.params(), hyper);
            } catch (const DivergenceError&) {
                failed = true;
            }
        });
        if (failed) {
            rec.diverged_epoch = epoch;
            return rec;
        }

        double val = 0.0;
        const double val_seconds = time_epoch([&] {
            const auto pred = model.forward(val_x);
            val = mse_over(std::span(pred).subspan(split.val.begin), val_y);
        });
        if (!std::isfinite(val)) {
            rec.diverged_epoch = epoch;
            return rec;
        }
        rec.train_loss.push_back(loss);
        rec.val_loss.push_back(val);
        rec.epoch_seconds.push_back(seconds);
        rec.val_seconds.push_back(val_seconds);
    }

    const auto pred = model.forward(data.features);
    const std::span<const double> test_pred =
        std::span(pred).subspan(split.test.begin, split.test.size());
    const std::span<const double> test_y(split.target.data() + split.test.begin, split.test.size());
    if (!std::all_of(test_pred.begin(), test_pred.end(), [](double v) { return std::isfinite(v); })) {
        rec.diverged_epoch = config.epochs;
        return rec;
    }
    MetricReport report;
    report.regression = regression_metrics(test_pred, test_y);
    report.directional_accuracy = directional_accuracy(test_pred, test_y);
    report.avg_epoch_seconds = mean_seconds(rec.epoch_seconds);
    rec.test = report;
    return rec;
}

GridConfig GridConfig::preset(std::string_view name) {
    GridConfig g;
    const std::vector<double> small_lr{1e-4, 1e-3, 1e-2};
    const std::vector<double> small_wd{0.0, 1e-3, 1e-2, 1e-1};
    if (name == "baseline-large") {
        g.optimizers.assign(kBaselineMethods.begin(), kBaselineMethods.end());
        g.lr_grid = {1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2};
        g.wd_grid = {0.0, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1};
    } else if (name == "baseline-small") {
        g.optimizers.assign(kBaselineMethods.begin(), kBaselineMethods.end());
        g.lr_grid = small_lr;
        g.wd_grid = small_wd;
    } else if (name == "roaree-small") {
        g.optimizers = {Method::Roaree};
        g.lr_grid = small_lr;
        g.wd_grid = small_wd;
        g.surrogates.assign(kAllSurrogates.begin(), kAllSurrogates.end());
        g.kappa_grid = {10.0, 100.0, 1000.0};
    } else {
        throw ConfigError("unknown grid preset: " + std::string(name));
    }
    return g;
}

std::vector<std::string_view> grid_preset_names() {
    return {"baseline-large", "baseline-small", "roaree-small"};
}

std::vector<RunConfig> expand_grid(const GridConfig& grid) {
    if (grid.optimizers.empty() || grid.lr_grid.empty() || grid.wd_grid.empty()) {
        throw ConfigError("grid needs at least one optimizer, lr and wd");
    }
    std::vector<RunConfig> out;
    for (Method m : grid.optimizers) {
        for (double lr : grid.lr_grid) {
            for (double wd : grid.wd_grid) {
                RunConfig c;
                c.method = m;
                c.lr = lr;
                c.wd = wd;
                c.seed = grid.seed;
                c.epochs = grid.epochs;
                c.model = grid.model;
                if (m != Method::Roaree) {
                    out.push_back(c);
                    continue;
                }
                if (grid.surrogates.empty() || grid.kappa_grid.empty()) {
                    throw ConfigError("roaree needs at least one surrogate and kappa");
                }
                for (SurrogateKind s : grid.surrogates) {
                    for (double k : grid.kappa_grid) {
                        c.surrogate = {s, k};
                        out.push_back(c);
                    }
                }
            }
        }
    }
    for (const auto& c : out) {
        c.hyper().validate();
    }
    return out;
}

std::vector<RunRecord> grid_sweep(const GridConfig& grid, const PreparedData& data,
                                  std::size_t workers) {
    const auto configs = expand_grid(grid);
    std::vector<RunRecord> records(configs.size());
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, configs.size());

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            records[i] = run_training(configs[i], data);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return records;
}

std::optional<double> metric_value(const RunRecord& r, std::string_view metric) {
    if (metric == "final_val_mse") {
        if (r.val_loss.empty()) return std::nullopt;
        return r.val_loss.back();
    }
    if (metric == "oscillation") return r.oscillation_score();
    if (!r.test) return std::nullopt;
    const auto& t = *r.test;
    if (metric == "test_mse") return t.regression.mse;
    if (metric == "test_rmse") return t.regression.rmse;
    if (metric == "test_mae") return t.regression.mae;
    if (metric == "test_r2") return t.regression.r2;
    if (metric == "directional_accuracy") return t.directional_accuracy;
    if (metric == "avg_epoch_seconds") return t.avg_epoch_seconds;
    throw ConfigError("unknown metric: " + std::string(metric));
}

namespace {

auto tie_key(const RunConfig& c) {
    return std::make_tuple(c.lr, c.wd, static_cast<int>(c.surrogate.kind), c.surrogate.kappa);
}

template <typename KeyFn>
std::vector<BestEntry> best_grouped(const std::vector<RunRecord>& records, std::string_view metric,
                                    Objective objective, KeyFn key_of) {
    // validates the metric token even when every record lacks it
    if (!records.empty()) {
        (void)metric_value(records.front(), metric);
    }
    std::vector<BestEntry> out;
    std::map<std::string, std::size_t> index;
    std::vector<std::optional<double>> best_value;
    for (const auto& r : records) {
        const std::string key = key_of(r);
        auto [it, inserted] = index.try_emplace(key, out.size());
        if (inserted) {
            out.push_back({key, std::nullopt, "all runs diverged"});
            best_value.emplace_back();
        }
        if (r.diverged()) continue;
        const auto v = metric_value(r, metric);
        if (!v) continue;
        auto& entry = out[it->second];
        auto& bv = best_value[it->second];
        const bool better = !bv || (objective == Objective::Min ? *v < *bv : *v > *bv) ||
                            (*v == *bv && tie_key(r.config) < tie_key(entry.record->config));
        if (better) {
            bv = v;
            entry.record = r;
            entry.note.clear();
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!out[i].record && !best_value[i]) {
            bool any_live = false;
            for (const auto& r : records) {
                if (key_of(r) == out[i].key && !r.diverged()) any_live = true;
            }
            if (any_live) out[i].note = "metric undefined for every run";
        }
    }
    return out;
}

}  // namespace

std::vector<BestEntry> select_best(const std::vector<RunRecord>& records, std::string_view metric,
                                   Objective objective) {
    return best_grouped(records, metric, objective,
                        [](const RunRecord& r) { return std::string(to_token(r.config.method)); });
}

std::vector<BestEntry> select_best_by_label(const std::vector<RunRecord>& records,
                                            std::string_view metric, Objective objective) {
    return best_grouped(records, metric, objective,
                        [](const RunRecord& r) { return r.config.label(); });
}

std::vector<std::string_view> results_columns() {
    return {"method",        "lr",
            "wd",            "surrogate",
            "kappa",         "seed",
            "epochs",        "epochs_completed",
            "final_train_mse", "final_val_mse",
            "test_mse",      "test_rmse",
            "test_mae",      "test_r2",
            "test_directional_accuracy", "oscillation_score",
            "diverged",      "diverged_epoch",
            "avg_epoch_seconds", "avg_val_seconds"};
}

namespace {

std::string opt_str(std::optional<double> v) { return v ? format_double(*v) : std::string(); }

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw Error("write failed: " + path.string());
}

nlohmann::json to_json_array(const std::vector<double>& v) {
    auto arr = nlohmann::json::array();
    for (double x : v) {
        if (std::isfinite(x)) arr.push_back(x);
        else arr.push_back(nullptr);
    }
    return arr;
}

}  // namespace

std::vector<std::filesystem::path> emit_results(const std::vector<RunRecord>& records,
                                                const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;

    {
        const auto path = out_dir / "results.csv";
        auto out = open_out(path);
        const auto cols = results_columns();
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
        out << '\n';
        for (const auto& r : records) {
            const auto& c = r.config;
            const bool roaree = c.method == Method::Roaree;
            std::string r2_cell;
            if (r.test) {
                r2_cell = r.test->regression.r2 ? format_double(*r.test->regression.r2) : "undefined";
            }
            out << to_token(c.method) << ',' << format_double(c.lr) << ',' << format_double(c.wd)
                << ',' << (roaree ? std::string(to_token(c.surrogate.kind)) : "") << ','
                << (roaree ? format_double(c.surrogate.kappa) : "") << ',' << c.seed << ','
                << c.epochs << ',' << r.epochs_completed() << ','
                << (r.train_loss.empty() ? "" : format_double(r.train_loss.back())) << ','
                << opt_str(metric_value(r, "final_val_mse")) << ','
                << (r.test ? format_double(r.test->regression.mse) : "") << ','
                << (r.test ? format_double(r.test->regression.rmse) : "") << ','
                << (r.test ? format_double(r.test->regression.mae) : "") << ',' << r2_cell << ','
                << (r.test ? format_double(r.test->directional_accuracy) : "") << ','
                << format_double(r.oscillation_score()) << ',' << (r.diverged() ? 1 : 0) << ','
                << (r.diverged_epoch ? std::to_string(*r.diverged_epoch) : "") << ','
                << opt_str(r.test ? r.test->avg_epoch_seconds : mean_seconds(r.epoch_seconds))
                << ',' << opt_str(mean_seconds(r.val_seconds)) << '\n';
        }
        close_out(out, path);
        written.push_back(path);
    }

    {
        const auto path = out_dir / "histories.jsonl";
        auto out = open_out(path);
        for (const auto& r : records) {
            const auto& c = r.config;
            nlohmann::ordered_json j;
            j["method"] = to_token(c.method);
            j["label"] = c.label();
            j["lr"] = c.lr;
            j["wd"] = c.wd;
            if (c.method == Method::Roaree) {
                j["surrogate"] = to_token(c.surrogate.kind);
                j["kappa"] = c.surrogate.kappa;
            }
            j["seed"] = c.seed;
            j["diverged_epoch"] =
                r.diverged_epoch ? nlohmann::ordered_json(*r.diverged_epoch) : nlohmann::ordered_json();
            j["train_loss"] = to_json_array(r.train_loss);
            j["val_loss"] = to_json_array(r.val_loss);
            j["epoch_seconds"] = to_json_array(r.epoch_seconds);
            j["val_seconds"] = to_json_array(r.val_seconds);
            out << j.dump() << '\n';
        }
        close_out(out, path);
        written.push_back(path);
    }

    // heatmaps: final validation MSE over lr x wd, one file per label
    std::vector<std::string> labels;
    for (const auto& r : records) {
        const auto l = r.config.label();
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    }
    for (const auto& label : labels) {
        std::vector<double> lrs, wds;
        std::map<std::pair<double, double>, const RunRecord*> cell;
        for (const auto& r : records) {
            if (r.config.label() != label) continue;
            if (std::find(lrs.begin(), lrs.end(), r.config.lr) == lrs.end()) lrs.push_back(r.config.lr);
            if (std::find(wds.begin(), wds.end(), r.config.wd) == wds.end()) wds.push_back(r.config.wd);
            cell.try_emplace({r.config.lr, r.config.wd}, &r);
        }
        std::sort(lrs.begin(), lrs.end());
        std::sort(wds.begin(), wds.end());
        const auto path = out_dir / ("heatmap_" + label + ".csv");
        auto out = open_out(path);
        out << "lr\\wd";
        for (double wd : wds) out << ',' << format_double(wd);
        out << '\n';
        for (double lr : lrs) {
            out << format_double(lr);
            for (double wd : wds) {
                out << ',';
                auto it = cell.find({lr, wd});
                if (it == cell.end()) continue;
                const RunRecord& r = *it->second;
                if (r.diverged()) out << "diverged";
                else out << opt_str(metric_value(r, "final_val_mse"));
            }
            out << '\n';
        }
        close_out(out, path);
        written.push_back(path);
    }

    {
        const auto path = out_dir / "pareto.csv";
        auto out = open_out(path);
        out << "label,best_speed_avg_epoch_seconds,best_speed_lr,best_speed_wd,best_speed_test_mse,"
               "best_mse_test_mse,best_mse_lr,best_mse_wd,best_mse_avg_epoch_seconds\n";
        const auto fast = select_best_by_label(records, "avg_epoch_seconds", Objective::Min);
        const auto accurate = select_best_by_label(records, "test_mse", Objective::Min);
        for (std::size_t i = 0; i < fast.size(); ++i) {
            out << fast[i].key;
            if (const auto& r = fast[i].record) {
                out << ',' << opt_str(metric_value(*r, "avg_epoch_seconds")) << ','
                    << format_double(r->config.lr) << ',' << format_double(r->config.wd) << ','
                    << opt_str(metric_value(*r, "test_mse"));
            } else {
                out << ",,,,";
            }
            if (const auto& r = accurate[i].record) {
                out << ',' << opt_str(metric_value(*r, "test_mse")) << ','
                    << format_double(r->config.lr) << ',' << format_double(r->config.wd) << ','
                    << opt_str(metric_value(*r, "avg_epoch_seconds"));
            } else {
                out << ",,,,";
            }
            out << '\n';
        }
        close_out(out, path);
        written.push_back(path);
    }
    return written;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string_view metric_column(std::string_view metric) {
    if (metric == "directional_accuracy") return "test_directional_accuracy";
    if (metric == "oscillation") return "oscillation_score";
    for (auto c : {"test_mse", "test_rmse", "test_mae", "test_r2", "avg_epoch_seconds",
                   "final_val_mse"}) {
        if (metric == c) return c;
    }
    throw ConfigError("unknown metric: " + std::string(metric));
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace

std::string report_results(const std::filesystem::path& results_csv, std::string_view metric,
                           Objective objective) {
    std::ifstream in(results_csv);
    if (!in) throw Error("cannot open " + results_csv.string());
    std::string line;
    if (!std::getline(in, line)) throw Error("empty results file: " + results_csv.string());
    const auto header = split_line(line);
    auto col = [&](std::string_view name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw SchemaError(std::string(name));
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_method = col("method"), c_lr = col("lr"), c_wd = col("wd"),
                      c_sur = col("surrogate"), c_kappa = col("kappa"),
                      c_metric = col(metric_column(metric)), c_mse = col("test_mse"),
                      c_speed = col("avg_epoch_seconds"), c_div = col("diverged");

    struct Row {
        std::vector<std::string> cells;
        double value;
        std::tuple<double, double, int, double> tie;
    };
    std::vector<std::string> order;
    std::map<std::string, std::optional<Row>> best;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size()) throw RowError(line_no, "wrong number of cells");
        std::string label = cells[c_method];
        const bool roaree = !cells[c_sur].empty();
        if (roaree) label += "_" + cells[c_sur] + "_k" + cells[c_kappa];
        if (!best.count(label)) {
            order.push_back(label);
            best[label] = std::nullopt;
        }
        if (cells[c_div] == "1" || cells[c_metric].empty() || cells[c_metric] == "undefined") continue;
        Row row{cells, std::stod(cells[c_metric]),
                {std::stod(cells[c_lr]), std::stod(cells[c_wd]),
                 roaree ? static_cast<int>(parse_surrogate(cells[c_sur])) : -1,
                 roaree ? std::stod(cells[c_kappa]) : 0.0}};
        auto& cur = best[label];
        const bool better = !cur ||
                            (objective == Objective::Min ? row.value < cur->value
                                                         : row.value > cur->value) ||
                            (row.value == cur->value && row.tie < cur->tie);
        if (better) cur = std::move(row);
    }

    std::ostringstream os;
    os << pad("label", 24) << pad("lr", 10) << pad("wd", 10) << pad(std::string(metric), 24)
       << pad("test_mse", 24) << "avg_epoch_seconds\n";
    for (const auto& label : order) {
        const auto& r = best[label];
        os << pad(label, 24);
        if (!r) {
            os << "(all runs diverged)\n";
            continue;
        }
        os << pad(r->cells[c_lr], 10) << pad(r->cells[c_wd], 10) << pad(r->cells[c_metric], 24)
           << pad(r->cells[c_mse], 24) << r->cells[c_speed] << '\n';
    }
    return os.str();
}

}  // namespace roaree
