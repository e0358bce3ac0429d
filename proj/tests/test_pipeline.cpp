#include "volvar/artifacts.hpp"
#include "volvar/numeric.hpp"
#include "volvar/pipeline.hpp"
#include "volvar/synth.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>

using namespace volvar;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> snapshot(const fs::path& dir, bool with_manifest = true) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), dir).string();
        if (!with_manifest && rel == "manifest.json") continue;
        out[rel] = read_file(e.path());
    }
    return out;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct Fixture {
    fs::path dir;
    RunConfig config;
};

Fixture make_fixture(const std::string& name) {
    Fixture f;
    f.dir = volvar::testing::scratch_dir(name);
    SynthConfig s;
    s.days = 900;
    s.bars_per_day = 16;
    s.seed = 3;
    std::ofstream out(f.dir / "bars.csv");
    write_bars(out, generate_synthetic(s));
    f.config = config_from_json(nlohmann::json::parse(R"({
        "lstm": {"lag": 5, "hidden_size": 3, "max_epochs": 4},
        "arfima": {"truncation": 100}})"));
    f.config.data_path = (f.dir / "bars.csv").string();
    f.config.output_dir = (f.dir / "out").string();
    return f;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(VOLVAR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST(Pipeline, AllStagesProduceReportsDeterministically) {
    auto f = make_fixture("all");
    set_quiet(true);
    ASSERT_EQ(run(f.config, Stage::All), 0);
    const auto first = snapshot(f.dir / "out");
    for (const char* name : {"daily.csv", "stats.csv", "forecasts.csv", "var.csv", "backtest_report.csv",
                             "accuracy_report.csv", "improvement.csv", "summary.txt", "manifest.json"}) {
        EXPECT_TRUE(first.count(name)) << name;
    }
    EXPECT_EQ(lines(first.at("stats.csv")), 6u);
    EXPECT_EQ(lines(first.at("backtest_report.csv")), 37u);
    EXPECT_EQ(lines(first.at("accuracy_report.csv")), 7u);
    EXPECT_EQ(lines(first.at("improvement.csv")), 1u + 5u * 4u);

    ASSERT_EQ(run(f.config, Stage::All), 0);
    EXPECT_EQ(snapshot(f.dir / "out"), first);
    for (Stage s : kPipelineStages) {
        ASSERT_EQ(run(f.config, s), 0) << to_string(s);
        EXPECT_EQ(snapshot(f.dir / "out"), first) << to_string(s);
    }
    set_quiet(false);

    const auto manifest = nlohmann::json::parse(first.at("manifest.json"));
    EXPECT_EQ(manifest.at("config_hash"), f.config.hash());
    EXPECT_EQ(manifest.at("stages").size(), 7u);
    EXPECT_EQ(manifest.at("stages").at("report").at("outputs").at("summary.txt"), sha256_hex(first.at("summary.txt")));
}

TEST(Pipeline, FutureRowsAreIgnored) {
    auto f = make_fixture("poison");
    set_quiet(true);
    ASSERT_EQ(run(f.config, Stage::Ingest), 0);
    DailyPanel panel;
    {
        std::ifstream in(f.dir / "out" / "daily.csv");
        panel = read_daily_panel(in);
    }
    const std::size_t n = panel.size();
    f.config.split = Split{panel.dates[n * 3 / 10], panel.dates[n * 4 / 10], panel.dates[n - 60]};
    ASSERT_EQ(run(f.config, Stage::All), 0);
    const auto clean = snapshot(f.dir / "out", false);

    // Corrupt every bar after test_end with absurd but well-formed values.
    std::ifstream in(f.config.data_path);
    std::ofstream out(f.dir / "poisoned.csv");
    std::string line;
    const std::string cutoff = format_date(panel.dates[n - 60]) + "T99";
    while (std::getline(in, line)) {
        if (line.compare(0, 4, "time") != 0 && line > cutoff) {
            const auto comma = line.find(',');
            line = line.substr(0, comma) + ",1e9,1e12";
        }
        out << line << "\n";
    }
    out.close();
    f.config.data_path = (f.dir / "poisoned.csv").string();
    ASSERT_EQ(run(f.config, Stage::All), 0);
    set_quiet(false);
    EXPECT_EQ(snapshot(f.dir / "out", false), clean);
}

TEST(Pipeline, MissingArtifactsAreComputationErrors) {
    auto f = make_fixture("missing");
    set_quiet(true);
    EXPECT_EQ(run(f.config, Stage::Var), 1);
    f.config.data_path = (f.dir / "nope.csv").string();
    EXPECT_EQ(run(f.config, Stage::Ingest), 1);
    set_quiet(false);
}

TEST(Cli, ExitCodesAndNoArtifactsOnConfigErrors) {
    const auto dir = volvar::testing::scratch_dir("cli");
    {
        std::ofstream cfg(dir / "bad.json");
        cfg << R"({"output_dir": ")" << (dir / "out").string()
            << R"(", "split": {"train_end": "2005-01-01", "val_end": "2004-01-01", "test_end": "2006-01-01"}})";
        std::ofstream typo(dir / "typo.json");
        typo << R"({"output_dir": ")" << (dir / "out").string() << R"(", "lstm": {"hiden_size": 3}})";
    }
    EXPECT_EQ(run_cli("all --config " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(run_cli("all --config " + (dir / "typo.json").string()), 2);
    EXPECT_EQ(run_cli("all --config " + (dir / "absent.json").string()), 2);
    EXPECT_FALSE(fs::exists(dir / "out"));

    EXPECT_EQ(run_cli("synth --days 120 --bars 8 --seed 4 --out " + (dir / "bars.csv").string()), 0);
    EXPECT_EQ(run_cli("synth --days 120 --bars 8 --seed 4 --out " + (dir / "bars2.csv").string()), 0);
    EXPECT_EQ(read_file(dir / "bars.csv"), read_file(dir / "bars2.csv"));
    EXPECT_EQ(run_cli("ingest --quiet --output " + (dir / "o2").string() + " --config " + (dir / "none.json").string()),
              2);
    {
        std::ofstream cfg(dir / "ok.json");
        cfg << R"({"data_path": ")" << (dir / "bars.csv").string() << R"("})";
    }
    EXPECT_EQ(run_cli("stats --quiet --config " + (dir / "ok.json").string() + " --output " + (dir / "o3").string()), 1);
    EXPECT_EQ(run_cli("ingest --quiet --config " + (dir / "ok.json").string() + " --output " + (dir / "o3").string()), 0);
    EXPECT_EQ(run_cli("stats --quiet --config " + (dir / "ok.json").string() + " --output " + (dir / "o3").string()), 0);
    EXPECT_EQ(lines(read_file(dir / "o3" / "stats.csv")), 6u);
}
