#include "roaree/data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "roaree/errors.hpp"
#include "roaree/format.hpp"
#include "roaree/rng.hpp"

namespace roaree {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<std::chrono::sys_days> parse_date(std::string_view s) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len, auto& out) {
        auto r = std::from_chars(s.data() + pos, s.data() + pos + len, out);
        return r.ec == std::errc{} && r.ptr == s.data() + pos + len;
    };
    if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

std::string format_date(std::chrono::sys_days day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace

std::vector<FeatureRow> load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("date");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    const auto header = split_commas(line);
    auto find_col = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        return std::nullopt;
    };

    const auto date_col = find_col("date");
    if (!date_col) throw SchemaError("date");
    std::array<std::size_t, kNumFeatures> cols{};
    bool has_close = true;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
        auto c = find_col(kFeatureColumns[f]);
        if (!c) {
            if (f == kAdjCloseIndex) {
                has_close = false;
                continue;
            }
            throw SchemaError(std::string(kFeatureColumns[f]));
        }
        cols[f] = *c;
    }

    std::vector<FeatureRow> rows;
    std::optional<std::chrono::sys_days> prev;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != header.size()) {
            throw RowError(line_no, "expected " + std::to_string(header.size()) + " cells, got " +
                                        std::to_string(cells.size()));
        }
        FeatureRow row;
        row.date = std::string(cells[*date_col]);
        const auto day = parse_date(row.date);
        if (!day) {
            throw RowError(line_no, "bad date '" + row.date + "'");
        }
        if (prev && *day <= *prev) {
            throw OrderingError("dates not strictly increasing at line " + std::to_string(line_no));
        }
        prev = day;
        for (std::size_t f = 0; f < kNumFeatures; ++f) {
            if (f == kAdjCloseIndex && !has_close) continue;
            const auto cell = cells[cols[f]];
            double v = 0.0;
            const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || r.ec != std::errc{} || r.ptr != cell.data() + cell.size() ||
                !std::isfinite(v)) {
                throw RowError(line_no, std::string(kFeatureColumns[f]) + ": cannot parse '" +
                                            std::string(cell) + "'");
            }
            row.features[f] = v;
        }
        if (has_close && !(row.adj_close() > 0.0)) {
            throw RowError(line_no, "adj_close must be positive");
        }
        rows.push_back(std::move(row));
    }

    if (!has_close) {
        double price = 100.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0) price *= 1.0 + rows[i].features[0];
            if (!(price > 0.0)) {
                throw RowError(i + 2, "reconstructed price index is not positive");
            }
            rows[i].features[kAdjCloseIndex] = price;
        }
    }
    return rows;
}

void write_csv(const std::filesystem::path& path, const std::vector<FeatureRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << "date";
    for (auto name : kFeatureColumns) out << ',' << name;
    out << '\n';
    for (const auto& r : rows) {
        out << r.date;
        for (double v : r.features) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

std::vector<double> build_target(const std::vector<FeatureRow>& rows) {
    if (rows.size() < 2) {
        throw InsufficientDataError("need at least 2 rows to build a forward return");
    }
    std::vector<double> target(rows.size() - 1);
    for (std::size_t t = 0; t + 1 < rows.size(); ++t) {
        target[t] = rows[t + 1].adj_close() / rows[t].adj_close() - 1.0;
    }
    return target;
}

DatasetSplit split_causal(const std::vector<FeatureRow>& rows, std::vector<double> target) {
    const std::size_t n_target = target.size();
    if (n_target < kMinTargetRows) {
        throw InsufficientDataError("need at least " + std::to_string(kMinTargetRows) +
                                    " target-bearing rows, got " + std::to_string(n_target));
    }
    if (rows.size() < n_target) {
        throw ShapeError("fewer rows than targets");
    }
    DatasetSplit s;
    const std::size_t remaining = n_target - kTestWeeks;
    const std::size_t n_val = remaining / 10;
    s.train = {0, remaining - n_val};
    s.val = {s.train.end, remaining};
    s.test = {remaining, n_target};
    s.target = std::move(target);

    // two-pass mean/variance over train rows only
    const double n = static_cast<double>(s.train.size());
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
        double sum = 0.0;
        for (std::size_t i = s.train.begin; i < s.train.end; ++i) sum += rows[i].features[f];
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t i = s.train.begin; i < s.train.end; ++i) {
            const double d = rows[i].features[f] - mean;
            ss += d * d;
        }
        s.norm_stats.mean[f] = mean;
        s.norm_stats.stddev[f] = std::sqrt(ss / n);
    }
    return s;
}

FeatureMatrix normalize(const std::vector<FeatureRow>& rows, const DatasetSplit& split) {
    const std::size_t n = split.target.size();
    FeatureMatrix m(n, kNumFeatures);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < kNumFeatures; ++f) {
            const double centered = rows[i].features[f] - split.norm_stats.mean[f];
            const double sd = split.norm_stats.stddev[f];
            m(i, f) = sd < 1e-12 ? centered : centered / sd;
        }
    }
    return m;
}

PreparedData prepare(const std::vector<FeatureRow>& rows) {
    PreparedData d;
    d.split = split_causal(rows, build_target(rows));
    d.features = normalize(rows, d.split);
    return d;
}

namespace {

class Ema {
public:
    explicit Ema(double span) : alpha_(2.0 / (span + 1.0)) {}
    double update(double x) {
        value_ = started_ ? alpha_ * x + (1.0 - alpha_) * value_ : x;
        started_ = true;
        return value_;
    }

private:
    double alpha_;
    double value_ = 0.0;
    bool started_ = false;
};

// Wilder smoothing: simple mean over the first `period` samples, then
// avg = (avg * (period - 1) + x) / period.
class Wilder {
public:
    explicit Wilder(std::size_t period) : period_(period) {}
    std::optional<double> update(double x) {
        if (count_ < period_) {
            sum_ += x;
            if (++count_ == period_) {
                avg_ = sum_ / static_cast<double>(period_);
                return avg_;
            }
            return std::nullopt;
        }
        avg_ = (avg_ * static_cast<double>(period_ - 1) + x) / static_cast<double>(period_);
        return avg_;
    }

private:
    std::size_t period_;
    std::size_t count_ = 0;
    double sum_ = 0.0;
    double avg_ = 0.0;
};

}  // namespace

std::vector<FeatureRow> generate_synthetic(std::uint64_t seed, std::size_t n_weeks) {
    if (n_weeks < kMinSyntheticWeeks) {
        throw InsufficientDataError("synthetic data needs at least " +
                                    std::to_string(kMinSyntheticWeeks) + " weeks");
    }
    Xoshiro256 rng(seed);
    std::vector<FeatureRow> rows(n_weeks);

    auto day = std::chrono::sys_days{std::chrono::year{2000} / 1 / 7};
    double close = 1000.0;
    double prev_close = close;
    double ret = 0.0;
    double mood = 0.0;      // latent sentiment driving next-week returns
    double adx = 20.0;
    double earnings = 50.0, book = 400.0, sales = 800.0;

    Ema ema12(12), ema26(26), signal9(9);
    Ema trix1(15), trix2(15), trix3(15);
    double prev_triple = 0.0;
    Wilder gain14(14), loss14(14), atr14(14);
    double rsi = 50.0, atr = 0.0;
    double kline = 50.0;
    std::deque<double> highs, lows, typical;
    std::vector<double> adx_hist;

    for (std::size_t t = 0; t < n_weeks; ++t) {
        if (t > 0) {
            // AR(1) log-returns plus a lagged sentiment effect
            const double log_ret = 0.0012 + 0.12 * ret + 0.006 * mood + 0.018 * rng.normal();
            prev_close = close;
            close *= std::exp(log_ret);
            ret = std::expm1(log_ret);
            mood = 0.75 * mood + 0.66 * rng.normal();
        }
        const double high = close * (1.0 + 0.012 * std::fabs(rng.normal()));
        const double low = close * (1.0 - 0.012 * std::fabs(rng.normal()));

        const double macd = ema12.update(close) - ema26.update(close);
        const double macdh = macd - signal9.update(macd);

        const double triple = trix3.update(trix2.update(trix1.update(close)));
        const double trix = t == 0 ? 0.0 : 100.0 * (triple / prev_triple - 1.0);
        prev_triple = triple;

        if (t > 0) {
            const double change = close - prev_close;
            const auto g = gain14.update(std::max(change, 0.0));
            const auto l = loss14.update(std::max(-change, 0.0));
            if (g && l) {
                rsi = *l == 0.0 ? 100.0 : 100.0 - 100.0 / (1.0 + *g / *l);
            }
        }
        const double tr = t == 0 ? high - low
                                 : std::max({high - low, std::fabs(high - prev_close),
                                             std::fabs(low - prev_close)});
        if (auto a = atr14.update(tr)) {
            atr = *a;
        } else {
            atr = tr;
        }

        highs.push_back(high);
        lows.push_back(low);
        if (highs.size() > 14) {
            highs.pop_front();
            lows.pop_front();
        }
        const double hh = *std::max_element(highs.begin(), highs.end());
        const double ll = *std::min_element(lows.begin(), lows.end());
        const double range = hh - ll;
        const double wr = range > 0.0 ? -100.0 * (hh - close) / range : -50.0;
        const double rsv = range > 0.0 ? 100.0 * (close - ll) / range : 50.0;
        kline = 2.0 / 3.0 * kline + 1.0 / 3.0 * rsv;

        const double tp = (high + low + close) / 3.0;
        typical.push_back(tp);
        if (typical.size() > 20) typical.pop_front();
        double sma = 0.0;
        for (double v : typical) sma += v;
        sma /= static_cast<double>(typical.size());
        double mad = 0.0;
        for (double v : typical) mad += std::fabs(v - sma);
        mad /= static_cast<double>(typical.size());
        const double cci = mad > 0.0 ? (tp - sma) / (0.015 * mad) : 0.0;

        adx = std::clamp(adx + 0.8 * (25.0 - adx) * 0.1 + 1.5 * rng.normal(), 5.0, 80.0);
        adx_hist.push_back(adx);
        const double adxr = 0.5 * (adx + adx_hist[t >= 14 ? t - 14 : 0]);

        earnings *= std::exp(0.0015 + 0.01 * rng.normal());
        book *= std::exp(0.001 + 0.005 * rng.normal());
        sales *= std::exp(0.0012 + 0.006 * rng.normal());

        FeatureRow& row = rows[t];
        row.date = format_date(day);
        row.features = {ret,
                        adx,
                        adxr,
                        trix,
                        cci,
                        macdh,
                        rsi,
                        kline,
                        wr,
                        atr,
                        100.0 * atr / close,
                        close / book,
                        close / earnings,
                        close / sales,
                        0.5 * mood + 0.8 * rng.normal(),
                        mood + 0.5 * rng.normal(),
                        close};
        day += std::chrono::days{7};
    }
    return rows;
}

}  // namespace roaree
