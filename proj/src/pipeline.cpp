#include "volvar/pipeline.hpp"

#include "volvar/artifacts.hpp"
#include "volvar/backtest.hpp"
#include "volvar/numeric.hpp"
#include "volvar/serialize.hpp"
#include "volvar/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace volvar {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Reads and writes artifacts for one stage, remembering their checksums.
class StageIo {
public:
    StageIo(const RunConfig& config, Stage stage) : config_(config), stage_(stage), dir_(config.output_dir) {}

    std::string read(const std::string& rel) {
        const fs::path path = dir_ / rel;
        if (!fs::exists(path)) {
            fail(ErrorCode::MissingArtifact,
                 "missing " + path.string() + " (run the stage that produces it first)");
        }
        std::string text = read_file(path);
        inputs_[rel] = sha256_hex(text);
        return text;
    }

    std::string read_external(const std::string& path) {
        if (!fs::exists(path)) fail(ErrorCode::MissingArtifact, "missing input data " + path);
        std::string text = read_file(path);
        inputs_["data:" + fs::path(path).filename().string()] = sha256_hex(text);
        return text;
    }

    void write(const std::string& rel, const std::string& contents) {
        write_file_atomic(dir_ / rel, contents);
        outputs_[rel] = sha256_hex(contents);
    }

    // The manifest goes last so it only ever describes completed outputs.
    void commit() {
        const fs::path path = dir_ / "manifest.json";
        json manifest;
        const std::string hash = config_.hash();
        if (fs::exists(path)) {
            try {
                manifest = json::parse(read_file(path));
            } catch (const json::exception&) {
                manifest = json();
            }
            if (!manifest.is_object() || manifest.value("config_hash", "") != hash) manifest = json();
        }
        manifest["config_hash"] = hash;
        manifest["seed"] = config_.seed;
        manifest["stages"][std::string(to_string(stage_))] = {{"inputs", inputs_}, {"outputs", outputs_}};
        write_file_atomic(path, manifest.dump(2) + "\n");
    }

private:
    const RunConfig& config_;
    Stage stage_;
    fs::path dir_;
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::string> outputs_;
};

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

DailyPanel load_panel(StageIo& io) {
    std::istringstream in(io.read("daily.csv"));
    return read_daily_panel(in);
}

double ln_floor(double v) { return std::log(std::max(v, kVarianceFloor)); }

std::string lstm_artifact(VolModel model) { return "models/lstm_" + std::string(to_string(model)) + ".json"; }

std::string tail_artifact(QuantileMethod method, Tail tail) {
    return "tails/" + std::string(to_string(method)) + "_" + std::string(to_string(tail)) + ".json";
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::MalformedRow, what + ": " + e.what());
    }
}

void ingest(const RunConfig& config, StageIo& io) {
    std::istringstream in(io.read_external(config.data_path));
    auto days = parse_bars(in);
    if (config.split) {
        // Nothing after the last permitted date reaches any later stage.
        const Date last = config.split->test_end;
        const auto before = days.size();
        std::erase_if(days, [&](const TradingDay& d) { return d.date > last; });
        if (days.size() != before) {
            log_info("ingest: ignored " + std::to_string(before - days.size()) + " days after " + format_date(last));
        }
    }
    const DailyPanel panel = build_daily_panel(days);
    std::ostringstream out;
    write_daily_panel(out, panel);
    io.write("daily.csv", out.str());
}

void stats(StageIo& io) {
    const DailyPanel panel = load_panel(io);
    std::vector<double> ln_p, ln_v, r;
    for (double v : panel.rv_price) ln_p.push_back(ln_floor(v));
    for (double v : panel.rv_volume) ln_v.push_back(ln_floor(v));
    for (const auto& x : panel.ret) {
        if (x) r.push_back(*x);
    }
    const auto z = standardize(r);
    std::vector<NamedStats> rows{{"RV(p)", descriptive_stats(panel.rv_price)},
                                 {"RV(V)", descriptive_stats(panel.rv_volume)},
                                 {"lnRV(p)", descriptive_stats(ln_p)},
                                 {"lnRV(V)", descriptive_stats(ln_v)},
                                 {"R", descriptive_stats(z.values)}};
    io.write("stats.csv", stats_csv(rows));
}

void fit(const RunConfig& config, StageIo& io) {
    const DailyPanel panel = load_panel(io);
    const Split split = effective_split(config, panel.dates);
    const auto idx = resolve_split(panel.dates, split);
    const ForecastInputs inputs = forecast_inputs(panel, config.source);
    const RollingConfig rolling = config.rolling();

    for (VolModel model : config.volatility_models) {
        try {
            if (is_lstm(model)) {
                io.write(lstm_artifact(model),
                         to_json(fit_lstm_forecaster(model, inputs, idx.test_begin, rolling.lstm)).dump(1) + "\n");
            } else if (model == VolModel::Arfima) {
                std::vector<double> ln_rv;
                for (std::size_t t = 0; t < idx.test_begin; ++t) ln_rv.push_back(ln_floor(inputs.target[t]));
                io.write("models/arfima.json", to_json(arfima_fit(ln_rv, rolling.arfima).best).dump(1) + "\n");
            } else {
                const HarVariant variant = model == VolModel::Har    ? HarVariant::Har
                                           : model == VolModel::Harq ? HarVariant::Harq
                                                                     : HarVariant::Harqf;
                const auto end = static_cast<std::ptrdiff_t>(idx.test_begin);
                RvSeries history{{inputs.dates.begin(), inputs.dates.begin() + end},
                                 {inputs.target.begin(), inputs.target.begin() + end},
                                 variant == HarVariant::Har
                                     ? std::vector<double>{}
                                     : std::vector<double>(inputs.target_rq.begin(), inputs.target_rq.begin() + end)};
                io.write("models/har_" + std::string(to_string(model)) + ".json",
                         to_json(har_fit(history, variant)).dump(1) + "\n");
            }
        } catch (const Error& e) {
            throw Error(e.code(), "model " + std::string(to_string(model)) + ": " + e.message());
        }
    }

    const StandardizedReturns z = fitting_returns(panel, split.val_end);
    for (QuantileMethod method : config.quantile_methods) {
        for (Tail tail : {Tail::Left, Tail::Right}) {
            try {
                io.write(tail_artifact(method, tail), to_json(fit_tail(method, z, tail)).dump(1) + "\n");
            } catch (const Error& e) {
                throw Error(e.code(), "quantile method " + std::string(to_string(method)) + ": " + e.message());
            }
        }
    }
}

void forecast(const RunConfig& config, StageIo& io) {
    const DailyPanel panel = load_panel(io);
    const Split split = effective_split(config, panel.dates);
    const ForecastInputs inputs = forecast_inputs(panel, config.source);
    const RollingConfig rolling = config.rolling();

    std::string out = "model,date,forecast,actual\n";
    for (VolModel model : config.volatility_models) {
        ForecastSeries series;
        try {
            if (is_lstm(model)) {
                const LstmForecaster trained =
                    lstm_forecaster_from_json(parse_json(io.read(lstm_artifact(model)), lstm_artifact(model)));
                series = rolling_forecast(model, inputs, split, rolling, &trained);
            } else {
                series = rolling_forecast(model, inputs, split, rolling);
            }
        } catch (const Error& e) {
            throw Error(e.code(), "model " + std::string(to_string(model)) + ": " + e.message());
        }
        const std::string name(to_string(model));
        for (std::size_t i = 0; i < series.dates.size(); ++i) {
            out += name + "," + format_date(series.dates[i]) + "," + num(series.forecast[i]) + "," +
                   num(series.actual[i]) + "\n";
        }
    }
    io.write("forecasts.csv", out);
}

std::map<VolModel, ForecastSeries> load_forecasts(StageIo& io) {
    const CsvTable t = parse_csv(io.read("forecasts.csv"));
    const auto cm = t.column("model"), cd = t.column("date"), cf = t.column("forecast"), ca = t.column("actual");
    std::map<VolModel, ForecastSeries> out;
    for (const auto& row : t.rows) {
        const VolModel model = parse_vol_model(row[cm]);
        auto& s = out[model];
        s.model = model;
        s.dates.push_back(parse_date(row[cd]));
        s.forecast.push_back(parse_number(row[cf]));
        s.actual.push_back(parse_number(row[ca]));
    }
    return out;
}

const ForecastSeries& forecast_for(const std::map<VolModel, ForecastSeries>& all, VolModel model) {
    const auto it = all.find(model);
    if (it == all.end()) {
        fail(ErrorCode::MissingArtifact, "forecasts.csv has no rows for " + std::string(to_string(model)));
    }
    return it->second;
}

void var(const RunConfig& config, StageIo& io) {
    const auto forecasts = load_forecasts(io);
    std::map<QuantileMethod, std::pair<TailModel, TailModel>> tails;
    for (QuantileMethod method : config.quantile_methods) {
        const auto left = tail_artifact(method, Tail::Left), right = tail_artifact(method, Tail::Right);
        tails.emplace(method, std::make_pair(tail_model_from_json(parse_json(io.read(left), left)),
                                             tail_model_from_json(parse_json(io.read(right), right))));
    }
    std::map<ModelSpec, std::vector<VarForecast>> grid;
    for (const auto& spec : config.specs()) {
        try {
            const auto& [left, right] = tails.at(spec.quantile);
            grid[spec] = assemble_var(forecast_for(forecasts, spec.volatility), left, right, spec.p0);
        } catch (const Error& e) {
            throw Error(e.code(), "spec " + spec.name() + ": " + e.message());
        }
    }
    std::string detail = "date,model,quantile_method,var_long,var_short,rv_forecast,quantile_long,quantile_short\n";
    for (const auto& [spec, series] : grid) {
        const std::string prefix = "," + std::string(to_string(spec.volatility)) + "," +
                                   std::string(to_string(spec.quantile)) + ",";
        for (const auto& f : series) {
            detail += format_date(f.date) + prefix + num(f.var_long) + "," + num(f.var_short) + "," +
                      num(f.rv_forecast) + "," + num(f.quantile_long) + "," + num(f.quantile_short) + "\n";
        }
    }
    io.write("var.csv", var_csv(grid));
    io.write("var_detail.csv", detail);
}

json tests_json(const CoverageTests& t) {
    const auto v = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    return {{"violation_ratio", v(t.violation_ratio)}, {"lr_uc", v(t.lr_uc)}, {"p_uc", v(t.p_uc)},
            {"lr_ind", v(t.lr_ind)},                   {"p_ind", v(t.p_ind)}, {"lr_cc", v(t.lr_cc)},
            {"p_cc", v(t.p_cc)}};
}

double json_number(const json& j, const char* key) {
    if (!j.contains(key)) fail(ErrorCode::MalformedRow, std::string("missing field '") + key + "'");
    const auto& v = j.at(key);
    return v.is_null() ? kNaN : v.get<double>();
}

void backtest(const RunConfig& config, StageIo& io) {
    const DailyPanel panel = load_panel(io);
    const auto forecasts = load_forecasts(io);
    const CsvTable t = parse_csv(io.read("var_detail.csv"));
    const auto cd = t.column("date"), cm = t.column("model"), cq = t.column("quantile_method"),
               cl = t.column("var_long"), cs = t.column("var_short"), cr = t.column("rv_forecast"),
               cql = t.column("quantile_long"), cqs = t.column("quantile_short");

    std::map<ModelSpec, std::vector<VarForecast>> grid;
    for (const auto& row : t.rows) {
        const ModelSpec spec{parse_vol_model(row[cm]), parse_quantile_method(row[cq]), config.p0, config.source};
        grid[spec].push_back({parse_date(row[cd]), parse_number(row[cl]), parse_number(row[cs]), parse_number(row[cr]),
                              parse_number(row[cql]), parse_number(row[cqs])});
    }
    for (const auto& spec : config.specs()) {
        if (!grid.count(spec)) fail(ErrorCode::MissingArtifact, "var_detail.csv has no rows for " + spec.name());
    }

    json rows = json::array();
    for (const auto& r : backtest_grid(panel_returns(panel), grid)) {
        json row = tests_json(r.tests);
        row["model"] = std::string(to_string(r.spec.volatility));
        row["quantile_method"] = std::string(to_string(r.spec.quantile));
        row["side"] = std::string(to_string(r.side));
        row["rank"] = r.rank;
        rows.push_back(std::move(row));
    }

    json accuracy = json::array();
    for (VolModel model : config.volatility_models) {
        const auto& s = forecast_for(forecasts, model);
        const auto scores = accuracy_scores(s.actual, s.forecast);
        accuracy.push_back({{"model", std::string(to_string(model))},
                            {"mse", scores.mse},
                            {"mae", scores.mae},
                            {"qlike", scores.qlike},
                            {"mape", scores.mape}});
    }
    const json meta = {{"p0", config.p0}, {"source", std::string(to_string(config.source))}};
    io.write("backtest.json", json{{"meta", meta}, {"rows", rows}}.dump(1) + "\n");
    io.write("accuracy.json", json{{"meta", meta}, {"rows", accuracy}}.dump(1) + "\n");
}

std::string cell(double v, int width, const char* fmt = "%.4g") {
    char buf[48];
    if (std::isnan(v)) {
        std::snprintf(buf, sizeof(buf), "%*s", width, "nan");
    } else {
        char inner[40];
        std::snprintf(inner, sizeof(inner), fmt, v);
        std::snprintf(buf, sizeof(buf), "%*s", width, inner);
    }
    return buf;
}

std::string cell(const std::string& s, int width) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-*s", width, s.c_str());
    return buf;
}

void report(StageIo& io) {
    const json bt = parse_json(io.read("backtest.json"), "backtest.json");
    const json acc = parse_json(io.read("accuracy.json"), "accuracy.json");
    const double p0 = bt.at("meta").at("p0").get<double>();
    const Source source = parse_source(bt.at("meta").at("source").get<std::string>());

    std::vector<BacktestRow> rows;
    for (const auto& r : bt.at("rows")) {
        BacktestRow row;
        row.spec = {parse_vol_model(r.at("model").get<std::string>()),
                    parse_quantile_method(r.at("quantile_method").get<std::string>()), p0, source};
        row.side = r.at("side").get<std::string>() == "long" ? Side::Long : Side::Short;
        row.tests = {json_number(r, "violation_ratio"), json_number(r, "lr_uc"), json_number(r, "p_uc"),
                     json_number(r, "lr_ind"),          json_number(r, "p_ind"), json_number(r, "lr_cc"),
                     json_number(r, "p_cc")};
        row.rank = r.at("rank").get<int>();
        rows.push_back(row);
    }
    std::vector<AccuracyRow> accuracy;
    for (const auto& r : acc.at("rows")) {
        accuracy.push_back({r.at("model").get<std::string>(),
                            {json_number(r, "mse"), json_number(r, "mae"), json_number(r, "qlike"),
                             json_number(r, "mape")}});
    }
    if (accuracy.empty()) fail(ErrorCode::MissingArtifact, "accuracy.json has no rows");

    // Percentage improvements are measured against the joint-input LSTM when
    // present, otherwise against the first listed model.
    const std::string lstm_rv(to_string(VolModel::LstmRv));
    auto ref = std::find_if(accuracy.begin(), accuracy.end(), [&](const AccuracyRow& r) { return r.model == lstm_rv; });
    if (ref == accuracy.end()) ref = accuracy.begin();
    std::vector<AccuracyRow> baselines;
    for (auto it = accuracy.begin(); it != accuracy.end(); ++it) {
        if (it != ref) baselines.push_back(*it);
    }

    io.write("backtest_report.csv", backtest_csv(rows));
    io.write("accuracy_report.csv", accuracy_csv(accuracy));
    io.write("improvement.csv", improvement_csv(*ref, baselines));

    std::string s;
    const std::string suffix = source == Source::Volume ? "/V" : "";
    s += "Volatility forecast accuracy (test period, " + std::string(to_string(source)) + " RV)\n\n";
    s += cell("model", 10) + "       MSE        MAE      QLIKE       MAPE\n";
    for (const auto& r : accuracy) {
        s += cell(r.model + suffix, 10) + cell(r.scores.mse, 10) + " " + cell(r.scores.mae, 10) + " " +
             cell(r.scores.qlike, 10) + " " + cell(r.scores.mape, 10) + "\n";
    }
    char head[48];
    std::snprintf(head, sizeof(head), "%.4g", p0);
    for (Side side : {Side::Long, Side::Short}) {
        s += "\nVaR backtests, " + std::string(to_string(side)) + " position (p0 = " + head + ")\n\n";
        s += cell("rank", 5) + cell("model", 10) + cell("tail", 6) + "     ratio      LR_uc       p_uc     LR_ind"
                                                                      "      p_ind      LR_cc       p_cc\n";
        for (const auto& r : rows) {
            if (r.side != side) continue;
            const auto& t = r.tests;
            s += cell(std::to_string(r.rank), 5) + cell(std::string(to_string(r.spec.volatility)) + suffix, 10) +
                 cell(std::string(to_string(r.spec.quantile)), 6) + cell(t.violation_ratio, 10) + " " +
                 cell(t.lr_uc, 10) + " " + cell(t.p_uc, 10) + " " + cell(t.lr_ind, 10) + " " + cell(t.p_ind, 10) +
                 " " + cell(t.lr_cc, 10) + " " + cell(t.p_cc, 10) + "\n";
        }
    }
    s += "\nLR_cc is the conditional coverage likelihood ratio LR_uc + LR_ind, referred to chi-square(2).\n"
         "It is a first-order Markov statistic; multi-lag conditional coverage statistics sometimes\n"
         "reported under a J_c(5) heading are a different construction and are not computed here.\n"
         "Rank orders specs by LR_cc (nan last), then by |ratio - p0|, then by name.\n";
    io.write("summary.txt", s);
}

}  // namespace

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::Ingest: return "ingest";
        case Stage::Stats: return "stats";
        case Stage::Fit: return "fit";
        case Stage::Forecast: return "forecast";
        case Stage::Var: return "var";
        case Stage::Backtest: return "backtest";
        case Stage::Report: return "report";
        case Stage::All: return "all";
    }
    return "?";
}

Stage parse_stage(std::string_view name) {
    for (Stage s : {Stage::Ingest, Stage::Stats, Stage::Fit, Stage::Forecast, Stage::Var, Stage::Backtest,
                    Stage::Report, Stage::All}) {
        if (to_string(s) == name) return s;
    }
    fail(ErrorCode::InvalidConfig, "unknown stage '" + std::string(name) + "'");
}

void run_stage(const RunConfig& config, Stage stage) {
    config.validate();
    if (stage == Stage::All) {
        for (Stage s : kPipelineStages) run_stage(config, s);
        return;
    }
    log_info("stage " + std::string(to_string(stage)));
    StageIo io(config, stage);
    switch (stage) {
        case Stage::Ingest: ingest(config, io); break;
        case Stage::Stats: stats(io); break;
        case Stage::Fit: fit(config, io); break;
        case Stage::Forecast: forecast(config, io); break;
        case Stage::Var: var(config, io); break;
        case Stage::Backtest: backtest(config, io); break;
        case Stage::Report: report(io); break;
        case Stage::All: break;
    }
    io.commit();
}

int exit_code(ErrorCode code) {
    return code == ErrorCode::InvalidConfig || code == ErrorCode::InvalidSplit ? 2 : 1;
}

int run(const RunConfig& config, Stage stage) {
    try {
        run_stage(config, stage);
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace volvar
