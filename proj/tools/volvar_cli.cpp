#include "volvar/config.hpp"
#include "volvar/error.hpp"
#include "volvar/marketdata.hpp"
#include "volvar/numeric.hpp"
#include "volvar/pipeline.hpp"
#include "volvar/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>

namespace {

int synth_command(const volvar::SynthConfig& cfg, const std::string& out_path) {
    try {
        cfg.validate();
        const auto days = volvar::generate_synthetic(cfg);
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) volvar::fail(volvar::ErrorCode::Io, "cannot write " + out_path);
        volvar::write_bars(out, days);
        if (!out) volvar::fail(volvar::ErrorCode::Io, "short write to " + out_path);
        return 0;
    } catch (const volvar::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return volvar::exit_code(e.code());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volatility forecasting and Value-at-Risk backtesting pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", seed, "Override the configured seed");
    app.add_option("--output", output, "Override the configured output directory");
    app.add_flag("--quiet", quiet, "Suppress progress and warning messages");

    volvar::SynthConfig synth;
    std::string synth_out = "bars.csv";
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic intraday bar file");
    synth_cmd->add_option("--days", synth.days, "Trading days")->capture_default_str();
    synth_cmd->add_option("--bars", synth.bars_per_day, "Intraday returns per day")->capture_default_str();
    synth_cmd->add_option("--xi", synth.xi, "Tail index of the daily shocks (0 = Gaussian)")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--out", synth_out, "Output CSV path")->capture_default_str();

    std::vector<std::pair<CLI::App*, volvar::Stage>> stages;
    for (volvar::Stage s : {volvar::Stage::Ingest, volvar::Stage::Stats, volvar::Stage::Fit, volvar::Stage::Forecast,
                            volvar::Stage::Var, volvar::Stage::Backtest, volvar::Stage::Report, volvar::Stage::All}) {
        const std::string name(volvar::to_string(s));
        stages.emplace_back(app.add_subcommand(name, s == volvar::Stage::All ? "Run every stage in order"
                                                                             : "Run the " + name + " stage"),
                            s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    volvar::set_quiet(quiet);

    if (synth_cmd->parsed()) return synth_command(synth, synth_out);

    volvar::RunConfig config;
    try {
        if (!config_path.empty()) {
            config = volvar::load_config(config_path);
        } else {
            config = volvar::config_from_json(nlohmann::json::object());
        }
        if (seed) config.seed = *seed;
        config.lstm.seed = config.seed;
        if (output) config.output_dir = *output;
        config.validate();
    } catch (const volvar::Error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    for (const auto& [cmd, stage] : stages) {
        if (cmd->parsed()) return volvar::run(config, stage);
    }
    return 2;
}
