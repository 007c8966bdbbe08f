#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mmwbeam/commands.hpp"

using namespace mmwbeam;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MMWBEAM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("mmwbeam_test_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string first_data_line(const std::string& csv, int skip) {
    std::size_t pos = 0;
    for (int i = 0; i < skip; ++i) pos = csv.find('\n', pos) + 1;
    return csv.substr(pos, csv.find('\n', pos) - pos);
}

std::string body(const std::string& csv) { return csv.substr(csv.find('\n', csv.find('\n') + 1) + 1); }

} // namespace

TEST(Format, TwelveSignificantDigits) {
    EXPECT_EQ(format_number(0.1 + 0.2), "0.3");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(123456789012345.0), "1.23456789012e+14");
}

TEST(GainCurve, OneFilePerBeamwidth) {
    const auto c = preset_config("gain-curves");
    const auto files = gain_curve(c);
    ASSERT_EQ(files.size(), 4u);
    EXPECT_EQ(files[0].name, "gain_curve_5deg.csv");
    const auto& text = files[1].content;
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(first_data_line(text, 2), "theta_deg,gain_db");
    EXPECT_EQ(first_data_line(text, 3).substr(0, 4), "-60,");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3 + 241);
}

TEST(Presets, ProvenanceReparsesToGeneratingConfig) {
    for (const auto& name : preset_names()) {
        auto c = preset_config(name);
        if (name == "adaptation-demo") c.adaptation->runs = 5;
        for (const auto& f : run_preset(name, c)) {
            const auto back = read_provenance(f.content);
            if (name == "adaptation-demo") {
                EXPECT_EQ(back.adaptation->runs, 5u) << f.name;
                EXPECT_EQ(back.theta_m_deg.size(), 1u) << f.name;
            } else {
                EXPECT_EQ(back, c) << f.name;
            }
        }
    }
}

TEST(Presets, WorkerCountDoesNotChangeBytes) {
    auto c = preset_config("sector-tx-sweep");
    const auto a = run_preset("sector-tx-sweep", c);
    c.optimizer.workers = 5;
    const auto b = run_preset("sector-tx-sweep", c);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        // Only the recorded worker count may differ.
        EXPECT_EQ(body(a[i].content), body(b[i].content)) << a[i].name;
    }
}

TEST(Presets, PencilGapGrowsAsBeamsNarrow) {
    const auto files = run_preset("pencil-pair-sweep", preset_config("pencil-pair-sweep"));
    ASSERT_EQ(files.size(), 2u);
    std::map<double, double> gap;
    std::istringstream in(files[1].content);
    std::string line;
    for (int i = 0; i < 3; ++i) std::getline(in, line);
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string phi, hi, lo, g;
        std::getline(row, phi, ',');
        std::getline(row, hi, ',');
        std::getline(row, lo, ',');
        std::getline(row, g, ',');
        gap[std::stod(phi)] = std::stod(g);
    }
    EXPECT_GT(gap.at(2.0), gap.at(10.0));
    EXPECT_GT(gap.at(10.0), gap.at(30.0));
    EXPECT_GT(gap.at(30.0), gap.at(90.0));
}

TEST(Presets, UnknownNameIsConfigError) {
    EXPECT_THROW(preset_config("fig-7"), config_error);
}

TEST(Overrides, MergeAndValidate) {
    const auto c = apply_overrides(preset_config("sector-tx-sweep"), nlohmann::json::parse(R"({"seed": 7})"));
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.beams.step_deg, 0.1);
    try {
        apply_overrides(preset_config("sector-tx-sweep"), nlohmann::json::parse(R"({"beams": {"phi_r": 3}})"));
        FAIL();
    } catch (const config_error& e) {
        EXPECT_EQ(e.field(), "beams.phi_r");
    }
    const auto d = apply_overrides(ExperimentConfig{}, nlohmann::json::parse(R"({"link": {"tx_power_dbm": 20}})"));
    EXPECT_DOUBLE_EQ(d.link.tx_power_mw, 100.0);
}

TEST(Optimize, RecordsCarryRequiredKeys) {
    ExperimentConfig c;
    c.theta_m_deg = {0.0, 9.0};
    const auto files = optimize(c);
    ASSERT_EQ(files.size(), 1u);
    const auto doc = nlohmann::json::parse(files[0].content);
    ASSERT_EQ(doc["records"].size(), 2u);
    for (const auto& r : doc["records"])
        for (const char* key : {"theta_m_deg", "phi_t_deg", "phi_r_deg", "objective", "iterations", "grid_check_pass"})
            EXPECT_TRUE(r.contains(key)) << key;
    EXPECT_EQ(read_provenance(files[0].content), c);
}

TEST(ExpectedCapacity, CsvColumns) {
    ExperimentConfig c;
    c.beams.phi_r_deg = {7.0};
    c.theta_m_deg = {7.0, 15.0};
    c.monte_carlo.samples = 10'000;
    const auto files = expected_capacity_table(c);
    EXPECT_EQ(first_data_line(files[0].content, 2), "method,phi_t_deg,phi_r_deg,theta_m_deg,value,stderr,p_mm");
    EXPECT_EQ(first_data_line(files[0].content, 3).substr(0, 22), "closed_form_main_lobe,");
}

TEST(AdaptSim, TraceAndSummary) {
    ExperimentConfig c;
    c.theta_m_deg = {10.0};
    AdaptationSection a;
    a.initial_phi_t_deg = 2.0;
    a.initial_phi_r_deg = 2.0;
    a.runs = 20;
    c.adaptation = a;
    const auto files = adapt_sim(c);
    ASSERT_EQ(files.size(), 3u);
    const auto summary = nlohmann::json::parse(files[2].content);
    EXPECT_EQ(summary["summary"][0]["mode"], "terminal");
    EXPECT_GT(summary["summary"][0]["improvement_ratio"].get<double>(), 1.0);
    EXPECT_EQ(std::count(files[0].content.begin(), files[0].content.end(), '\n'), 3 + 10);
}

TEST(Cli, ExitCodes) {
    TempDir tmp;
    const auto dir = tmp.path.string();
    EXPECT_EQ(run_cli("gain-curve --out " + dir + "/gc"), 0);
    EXPECT_TRUE(fs::exists(tmp.path / "gc" / "gain_curve_40deg.csv"));

    write_file(tmp.path / "bad.json", R"({"phi_r": 5})");
    EXPECT_EQ(run_cli("optimize --config " + dir + "/bad.json --out " + dir), 2);
    write_file(tmp.path / "broken.json", "{");
    EXPECT_EQ(run_cli("optimize --config " + dir + "/broken.json --out " + dir), 2);
    EXPECT_EQ(run_cli("preset no-such-figure --out " + dir), 2);

    write_file(tmp.path / "short.json", R"({"training": {"slot_ms": 0.1}})");
    EXPECT_EQ(run_cli("optimize --config " + dir + "/short.json --out " + dir), 3);

    EXPECT_EQ(run_cli("optimize --config " + dir + "/missing.json --out " + dir), 4);
    write_file(tmp.path / "plain", "x");
    EXPECT_EQ(run_cli("gain-curve --out " + dir + "/plain/sub"), 4);
}

TEST(Cli, SeedAndFormatFlags) {
    TempDir tmp;
    const auto dir = tmp.path.string();
    ASSERT_EQ(run_cli("gain-curve --format json --seed 5 --out " + dir), 0);
    const auto text = read_file(tmp.path / "gain_curve_5deg.json");
    const auto c = read_provenance(text);
    EXPECT_EQ(c.seed, 5u);
    EXPECT_EQ(c.output.format, OutputFormat::Json);
    EXPECT_EQ(nlohmann::json::parse(text)["records"].size(), 241u);
}
