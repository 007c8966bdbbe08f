#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmwbeam/mmwbeam.hpp"

namespace {

enum Exit { ok = 0, failure = 1, bad_config = 2, infeasible = 3, io_failure = 4 };

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string format;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config; fields override the defaults");
    cmd->add_option("--out", f.out, "output directory (default: output.path from the config)");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

mmwbeam::ExperimentConfig resolve(mmwbeam::ExperimentConfig base, const CommonFlags& f) {
    if (!f.config_path.empty()) {
        const std::string text = mmwbeam::read_file(f.config_path);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw mmwbeam::config_error(f.config_path, std::string("malformed JSON: ") + e.what());
        }
        base = mmwbeam::apply_overrides(base, doc);
    }
    if (f.seed) base.seed = *f.seed;
    if (!f.format.empty()) base.output.format = f.format == "csv" ? mmwbeam::OutputFormat::Csv : mmwbeam::OutputFormat::Json;
    mmwbeam::validate(base);
    return base;
}

void emit(const mmwbeam::ExperimentConfig& c, const CommonFlags& f, const mmwbeam::Outputs& files) {
    const std::filesystem::path dir = f.out.empty() ? c.output.path : f.out;
    mmwbeam::write_outputs(dir, files);
    for (const auto& file : files) std::cout << (dir / file.name).string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Beamwidth and capacity tools for misaligned mmWave links"};
    app.set_version_flag("--version", std::string("mmwbeam ") + mmwbeam::version);
    app.require_subcommand(1);

    CommonFlags flags;
    std::string preset;

    auto* gain = app.add_subcommand("gain-curve", "antenna gain (dB) versus pointing angle");
    auto* surface = app.add_subcommand("capacity-surface", "capacity over the (phi_t, phi_r) grid");
    auto* opt = app.add_subcommand("optimize", "capacity-maximizing beamwidths per theta_m (JSON)");
    auto* expected = app.add_subcommand("expected-capacity", "closed-form and Monte Carlo expected capacity");
    auto* adapt = app.add_subcommand("adapt-sim", "RSSI-threshold beamwidth adaptation");
    auto* pre = app.add_subcommand("preset", "reproduce a figure with pinned settings");
    pre->add_option("name", preset, "preset name")->required()->check(CLI::IsMember(mmwbeam::preset_names()));
    for (auto* cmd : {gain, surface, opt, expected, adapt, pre}) add_common(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : bad_config;
    }

    try {
        if (pre->parsed()) {
            const auto c = resolve(mmwbeam::preset_config(preset), flags);
            emit(c, flags, mmwbeam::run_preset(preset, c));
            return ok;
        }
        mmwbeam::ExperimentConfig base;
        if (adapt->parsed()) base.adaptation = mmwbeam::AdaptationSection{};
        const auto c = resolve(base, flags);
        if (gain->parsed()) emit(c, flags, mmwbeam::gain_curve(c));
        else if (surface->parsed()) emit(c, flags, mmwbeam::capacity_surface(c));
        else if (opt->parsed()) emit(c, flags, mmwbeam::optimize(c));
        else if (expected->parsed()) emit(c, flags, mmwbeam::expected_capacity_table(c));
        else if (adapt->parsed()) emit(c, flags, mmwbeam::adapt_sim(c));
        return ok;
    } catch (const mmwbeam::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bad_config;
    } catch (const mmwbeam::precondition_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bad_config;
    } catch (const mmwbeam::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return infeasible;
    } catch (const mmwbeam::convergence_error& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return infeasible;
    } catch (const mmwbeam::io_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}
