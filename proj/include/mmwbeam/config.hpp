#pragma once

// Experiment configuration. The resolved config is stored in the same units
// the JSON uses (deg, ms, us, mW, ...) and converted to SI by the build_*
// functions, so emitting and re-parsing reproduces it exactly.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmwbeam/adaptation.hpp"
#include "mmwbeam/capstats.hpp"
#include "mmwbeam/error.hpp"
#include "mmwbeam/link_budget.hpp"
#include "mmwbeam/optimizer.hpp"
#include "mmwbeam/units.hpp"

namespace mmwbeam {

inline constexpr const char* version = "0.1.0";

enum class OutputFormat { Csv, Json };
enum class TxMode { Sector, Pencil };

struct LinkSection {
    double tx_power_mw = 10.0;
    double carrier_ghz = 60.0;
    double distance_m = 5.0;
    double path_loss_exponent = 2.0;
    double noise_psd_dbm_hz = -174.0;
    double bandwidth_ghz = 2.16;
    bool operator==(const LinkSection&) const = default;
};

struct AntennaSection {
    double k1 = 1.0;
    std::vector<double> hpbw_deg{5.0, 10.0, 20.0, 40.0}; // gain-curve patterns
    double theta_min_deg = -60.0;
    double theta_max_deg = 60.0;
    double theta_step_deg = 0.5;
    bool operator==(const AntennaSection&) const = default;
};

struct TrainingSection {
    double sector_tx_deg = 90.0;
    double sector_rx_deg = 90.0;
    double probe_us = 15.6;
    double slot_ms = 10.0;
    bool operator==(const TrainingSection&) const = default;
};

struct BeamsSection {
    TxMode tx_mode = TxMode::Sector;
    std::vector<double> phi_t_deg{90.0}; // evaluation points
    std::vector<double> phi_r_deg{2.0, 7.0, 15.0};
    double min_deg = 1.0; // sweep range
    double max_deg = 90.0;
    double step_deg = 1.0;
    bool operator==(const BeamsSection&) const = default;
};

struct OptimizerSection {
    Objective objective = Objective::Jensen;
    ExponentConvention exponent = ExponentConvention::Derived;
    double grid_step_deg = 0.1;
    int max_iterations = 10000;
    double tolerance = 1e-9;
    double armijo = 1e-4;
    bool verify_with_grid = true;
    bool fallback_to_grid = true;
    unsigned workers = 1;
    bool operator==(const OptimizerSection&) const = default;
};

struct MonteCarloSection {
    std::uint64_t samples = 1'000'000;
    unsigned workers = 1;
    std::uint64_t block = 4096;
    bool operator==(const MonteCarloSection&) const = default;
};

struct AdaptationSection {
    double delta_phi_deg = 1.0;
    double delta_theta_deg = 2.0;
    std::optional<double> threshold_w; // unset: main-lobe average
    std::uint64_t max_slots = 10;
    bool enabled = true;
    bool rearm = false;
    std::uint64_t draws_per_slot = 1;
    std::uint64_t runs = 100;
    std::optional<double> initial_phi_t_deg; // unset: optimized with theta_m = 0
    std::optional<double> initial_phi_r_deg;
    bool operator==(const AdaptationSection&) const = default;
};

struct OutputSection {
    std::string path = "out";
    OutputFormat format = OutputFormat::Csv;
    bool operator==(const OutputSection&) const = default;
};

struct ExperimentConfig {
    LinkSection link;
    AntennaSection antenna;
    TrainingSection training;
    std::vector<double> theta_m_deg{0.0, 3.0, 6.0, 9.0};
    BeamsSection beams;
    OptimizerSection optimizer;
    MonteCarloSection monte_carlo;
    std::optional<AdaptationSection> adaptation;
    std::uint64_t seed = 42;
    OutputSection output;
    bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

using nlohmann::json;

// Every field name the schema knows, by section, used to explain unit-less keys.
inline const std::vector<std::pair<std::string, std::vector<std::string>>>& schema() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> s{
        {"", {"link", "antenna", "training", "misalignment", "beams", "optimizer", "monte_carlo", "adaptation", "seed",
              "output"}},
        {"link",
         {"tx_power_mw", "tx_power_dbm", "carrier_ghz", "distance_m", "path_loss_exponent", "noise_psd_dbm_hz",
          "bandwidth_ghz"}},
        {"antenna", {"k1", "hpbw_deg", "theta_min_deg", "theta_max_deg", "theta_step_deg"}},
        {"training", {"sector_tx_deg", "sector_rx_deg", "probe_us", "slot_ms"}},
        {"misalignment", {"theta_m_deg"}},
        {"beams", {"tx_mode", "phi_t_deg", "phi_r_deg", "min_deg", "max_deg", "step_deg"}},
        {"optimizer",
         {"objective", "exponent", "grid_step_deg", "max_iterations", "tolerance", "armijo", "verify_with_grid",
          "fallback_to_grid", "workers"}},
        {"monte_carlo", {"samples", "workers", "block"}},
        {"adaptation",
         {"delta_phi_deg", "delta_theta_deg", "threshold_w", "max_slots", "enabled", "rearm", "draws_per_slot", "runs",
          "initial_phi_t_deg", "initial_phi_r_deg"}},
        {"output", {"path", "format"}},
    };
    return s;
}

inline std::string join_path(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

inline bool has_unit_suffix(std::string_view field, std::string_view stem) {
    static constexpr std::string_view units[] = {"_deg", "_rad", "_ms", "_us", "_mw", "_dbm", "_dbm_hz", "_ghz", "_m", "_w"};
    if (field.size() <= stem.size() || field.substr(0, stem.size()) != stem) return false;
    const auto rest = field.substr(stem.size());
    for (auto u : units)
        if (rest == u) return true;
    return false;
}

[[noreturn]] inline void reject_unknown(const std::string& section, const std::string& key) {
    const std::string path = join_path(section, key);
    // Same section first, then anywhere, so "phi_r" at top level still gets a hint.
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& [name, fields] : schema()) {
            if (pass == 0 && name != section) continue;
            for (const auto& f : fields)
                if (has_unit_suffix(f, key))
                    throw config_error(path, "value has no unit; use \"" + join_path(name, f) + "\"");
        }
    }
    throw config_error(path, "unknown field");
}

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw config_error(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json* take(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = take(key)) out = as_number(*v, key);
    }

    void optional_number(const std::string& key, std::optional<double>& out) {
        if (const json* v = take(key)) {
            if (v->is_null()) out.reset();
            else out = as_number(*v, key);
        }
    }

    template <class Int>
    void integer(const std::string& key, Int& out, Int min_value) {
        const json* v = take(key);
        if (!v) return;
        if (!v->is_number_integer()) throw config_error(field(key), "expected an integer");
        if (v->is_number_unsigned()) {
            const auto u = v->get<std::uint64_t>();
            if (u < static_cast<std::uint64_t>(min_value)) throw config_error(field(key), "must be >= " + std::to_string(min_value));
            if (u > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) throw config_error(field(key), "too large");
            out = static_cast<Int>(u);
        } else {
            const auto s = v->get<std::int64_t>();
            if (s < static_cast<std::int64_t>(min_value)) throw config_error(field(key), "must be >= " + std::to_string(min_value));
            out = static_cast<Int>(s);
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) throw config_error(field(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void string(const std::string& key, std::string& out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) throw config_error(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        const json* v = take(key);
        if (!v) return;
        if (v->is_number()) {
            out = {as_number(*v, key)};
            return;
        }
        if (!v->is_array() || v->empty()) throw config_error(field(key), "expected a non-empty array of numbers");
        out.clear();
        for (const auto& e : *v) out.push_back(as_number(e, key));
    }

    template <class Enum>
    void choice(const std::string& key, Enum& out, std::initializer_list<std::pair<const char*, Enum>> options) {
        const json* v = take(key);
        if (!v) return;
        std::string allowed;
        if (v->is_string()) {
            for (const auto& [name, value] : options)
                if (v->get<std::string>() == name) {
                    out = value;
                    return;
                }
        }
        for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
        throw config_error(field(key), "expected one of: " + allowed);
    }

    std::string field(const std::string& key) const { return join_path(path_, key); }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) reject_unknown(path_, key);
    }

private:
    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) throw config_error(field(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw config_error(field(key), "must be finite");
        return x;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class Section, class Fn>
void read_section(Reader& parent, const std::string& key, Section& out, Fn&& fn) {
    if (const json* v = parent.take(key)) {
        Reader r(*v, parent.field(key));
        fn(r, out);
        r.finish();
    }
}

inline void check(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw config_error(field, what);
}

} // namespace detail

/// Checks cross-field invariants; every message names the offending field.
inline void validate(const ExperimentConfig& c) {
    using detail::check;
    const auto& l = c.link;
    check(l.tx_power_mw > 0.0, "link.tx_power_mw", "must be > 0");
    check(l.carrier_ghz > 0.0, "link.carrier_ghz", "must be > 0");
    check(l.distance_m > 0.0, "link.distance_m", "must be > 0");
    check(l.distance_m > units::wavelength(l.carrier_ghz * 1e9), "link.distance_m", "must exceed the wavelength");
    check(l.path_loss_exponent > 0.0, "link.path_loss_exponent", "must be > 0");
    check(l.bandwidth_ghz > 0.0, "link.bandwidth_ghz", "must be > 0");

    check(c.antenna.k1 > 0.0, "antenna.k1", "must be > 0");
    for (double h : c.antenna.hpbw_deg) check(h > 0.0 && h <= 360.0, "antenna.hpbw_deg", "values must lie in (0, 360]");
    check(c.antenna.theta_min_deg <= c.antenna.theta_max_deg, "antenna.theta_min_deg", "must not exceed theta_max_deg");
    check(c.antenna.theta_step_deg > 0.0, "antenna.theta_step_deg", "must be > 0");

    const auto& t = c.training;
    check(t.sector_tx_deg > 0.0 && t.sector_tx_deg <= 360.0, "training.sector_tx_deg", "must lie in (0, 360]");
    check(t.sector_rx_deg > 0.0 && t.sector_rx_deg <= 360.0, "training.sector_rx_deg", "must lie in (0, 360]");
    check(t.probe_us > 0.0, "training.probe_us", "must be > 0");
    check(t.slot_ms > 0.0, "training.slot_ms", "must be > 0");

    check(!c.theta_m_deg.empty(), "misalignment.theta_m_deg", "must not be empty");
    for (double v : c.theta_m_deg) check(v >= 0.0, "misalignment.theta_m_deg", "values must be >= 0");

    const auto& b = c.beams;
    check(!b.phi_t_deg.empty(), "beams.phi_t_deg", "must not be empty");
    check(!b.phi_r_deg.empty(), "beams.phi_r_deg", "must not be empty");
    for (double v : b.phi_t_deg) check(v > 0.0 && v <= t.sector_tx_deg, "beams.phi_t_deg", "values must lie in (0, sector_tx_deg]");
    for (double v : b.phi_r_deg) check(v > 0.0 && v <= t.sector_rx_deg, "beams.phi_r_deg", "values must lie in (0, sector_rx_deg]");
    check(b.min_deg > 0.0, "beams.min_deg", "must be > 0");
    check(b.min_deg <= b.max_deg, "beams.min_deg", "must not exceed max_deg");
    check(b.max_deg <= std::min(t.sector_tx_deg, t.sector_rx_deg), "beams.max_deg", "must not exceed the sector widths");
    check(b.step_deg > 0.0, "beams.step_deg", "must be > 0");

    check(c.optimizer.grid_step_deg > 0.0, "optimizer.grid_step_deg", "must be > 0");
    check(c.optimizer.tolerance > 0.0, "optimizer.tolerance", "must be > 0");
    check(c.optimizer.armijo > 0.0 && c.optimizer.armijo < 1.0, "optimizer.armijo", "must lie in (0, 1)");

    if (c.adaptation) {
        const auto& a = *c.adaptation;
        check(a.delta_phi_deg > 0.0, "adaptation.delta_phi_deg", "must be > 0");
        check(a.delta_theta_deg > 0.0, "adaptation.delta_theta_deg", "must be > 0");
        check(!a.threshold_w || *a.threshold_w > 0.0, "adaptation.threshold_w", "must be > 0");
        auto initial_ok = [](const std::optional<double>& v, double sector) { return !v || (*v > 0.0 && *v <= sector); };
        check(initial_ok(a.initial_phi_t_deg, t.sector_tx_deg), "adaptation.initial_phi_t_deg", "must lie in (0, sector_tx_deg]");
        check(initial_ok(a.initial_phi_r_deg, t.sector_rx_deg), "adaptation.initial_phi_r_deg", "must lie in (0, sector_rx_deg]");
    }
    check(!c.output.path.empty(), "output.path", "must not be empty");
}

/// Parses a JSON document; missing fields keep their defaults.
inline ExperimentConfig parse_config_document(const nlohmann::json& doc) {
    using detail::Reader;
    ExperimentConfig c;
    Reader root(doc, "");

    detail::read_section(root, "link", c.link, [](Reader& r, LinkSection& s) {
        if (r.has("tx_power_mw") && r.has("tx_power_dbm"))
            throw config_error(r.field("tx_power_dbm"), "give either tx_power_mw or tx_power_dbm, not both");
        r.number("tx_power_mw", s.tx_power_mw);
        std::optional<double> dbm;
        r.optional_number("tx_power_dbm", dbm);
        if (dbm) s.tx_power_mw = units::from_db(*dbm);
        r.number("carrier_ghz", s.carrier_ghz);
        r.number("distance_m", s.distance_m);
        r.number("path_loss_exponent", s.path_loss_exponent);
        r.number("noise_psd_dbm_hz", s.noise_psd_dbm_hz);
        r.number("bandwidth_ghz", s.bandwidth_ghz);
    });
    detail::read_section(root, "antenna", c.antenna, [](Reader& r, AntennaSection& s) {
        r.number("k1", s.k1);
        r.numbers("hpbw_deg", s.hpbw_deg);
        r.number("theta_min_deg", s.theta_min_deg);
        r.number("theta_max_deg", s.theta_max_deg);
        r.number("theta_step_deg", s.theta_step_deg);
    });
    detail::read_section(root, "training", c.training, [](Reader& r, TrainingSection& s) {
        r.number("sector_tx_deg", s.sector_tx_deg);
        r.number("sector_rx_deg", s.sector_rx_deg);
        r.number("probe_us", s.probe_us);
        r.number("slot_ms", s.slot_ms);
    });
    detail::read_section(root, "misalignment", c.theta_m_deg,
                         [](Reader& r, std::vector<double>& v) { r.numbers("theta_m_deg", v); });
    detail::read_section(root, "beams", c.beams, [](Reader& r, BeamsSection& s) {
        r.choice("tx_mode", s.tx_mode, {{"sector", TxMode::Sector}, {"pencil", TxMode::Pencil}});
        r.numbers("phi_t_deg", s.phi_t_deg);
        r.numbers("phi_r_deg", s.phi_r_deg);
        r.number("min_deg", s.min_deg);
        r.number("max_deg", s.max_deg);
        r.number("step_deg", s.step_deg);
    });
    detail::read_section(root, "optimizer", c.optimizer, [](Reader& r, OptimizerSection& s) {
        r.choice("objective", s.objective, {{"jensen", Objective::Jensen}, {"worst_case", Objective::WorstCase}});
        r.choice("exponent", s.exponent,
                 {{"derived", ExponentConvention::Derived}, {"printed", ExponentConvention::Printed}});
        r.number("grid_step_deg", s.grid_step_deg);
        r.integer("max_iterations", s.max_iterations, 1);
        r.number("tolerance", s.tolerance);
        r.number("armijo", s.armijo);
        r.boolean("verify_with_grid", s.verify_with_grid);
        r.boolean("fallback_to_grid", s.fallback_to_grid);
        r.integer("workers", s.workers, 1u);
    });
    detail::read_section(root, "monte_carlo", c.monte_carlo, [](Reader& r, MonteCarloSection& s) {
        r.integer<std::uint64_t>("samples", s.samples, 1);
        r.integer("workers", s.workers, 1u);
        r.integer<std::uint64_t>("block", s.block, 1);
    });
    if (const auto* v = root.take("adaptation"); v && !v->is_null()) {
        AdaptationSection s;
        Reader r(*v, "adaptation");
        r.number("delta_phi_deg", s.delta_phi_deg);
        r.number("delta_theta_deg", s.delta_theta_deg);
        r.optional_number("threshold_w", s.threshold_w);
        r.integer<std::uint64_t>("max_slots", s.max_slots, 1);
        r.boolean("enabled", s.enabled);
        r.boolean("rearm", s.rearm);
        r.integer<std::uint64_t>("draws_per_slot", s.draws_per_slot, 1);
        r.integer<std::uint64_t>("runs", s.runs, 1);
        r.optional_number("initial_phi_t_deg", s.initial_phi_t_deg);
        r.optional_number("initial_phi_r_deg", s.initial_phi_r_deg);
        r.finish();
        c.adaptation = s;
    }
    root.integer<std::uint64_t>("seed", c.seed, 0);
    detail::read_section(root, "output", c.output, [](Reader& r, OutputSection& s) {
        r.string("path", s.path);
        r.choice("format", s.format, {{"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}});
    });
    root.finish();
    validate(c);
    return c;
}

inline ExperimentConfig parse_config(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("<document>", std::string("malformed JSON: ") + e.what());
    }
    return parse_config_document(doc);
}

/// Fully resolved config; parse_config_document(to_json(c)) == c.
inline nlohmann::json to_json(const ExperimentConfig& c) {
    using nlohmann::json;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["link"] = {{"tx_power_mw", c.link.tx_power_mw},
                 {"carrier_ghz", c.link.carrier_ghz},
                 {"distance_m", c.link.distance_m},
                 {"path_loss_exponent", c.link.path_loss_exponent},
                 {"noise_psd_dbm_hz", c.link.noise_psd_dbm_hz},
                 {"bandwidth_ghz", c.link.bandwidth_ghz}};
    j["antenna"] = {{"k1", c.antenna.k1},
                    {"hpbw_deg", c.antenna.hpbw_deg},
                    {"theta_min_deg", c.antenna.theta_min_deg},
                    {"theta_max_deg", c.antenna.theta_max_deg},
                    {"theta_step_deg", c.antenna.theta_step_deg}};
    j["training"] = {{"sector_tx_deg", c.training.sector_tx_deg},
                     {"sector_rx_deg", c.training.sector_rx_deg},
                     {"probe_us", c.training.probe_us},
                     {"slot_ms", c.training.slot_ms}};
    j["misalignment"] = {{"theta_m_deg", c.theta_m_deg}};
    j["beams"] = {{"tx_mode", c.beams.tx_mode == TxMode::Sector ? "sector" : "pencil"},
                  {"phi_t_deg", c.beams.phi_t_deg},
                  {"phi_r_deg", c.beams.phi_r_deg},
                  {"min_deg", c.beams.min_deg},
                  {"max_deg", c.beams.max_deg},
                  {"step_deg", c.beams.step_deg}};
    const auto& o = c.optimizer;
    j["optimizer"] = {{"objective", o.objective == Objective::Jensen ? "jensen" : "worst_case"},
                      {"exponent", o.exponent == ExponentConvention::Derived ? "derived" : "printed"},
                      {"grid_step_deg", o.grid_step_deg},
                      {"max_iterations", o.max_iterations},
                      {"tolerance", o.tolerance},
                      {"armijo", o.armijo},
                      {"verify_with_grid", o.verify_with_grid},
                      {"fallback_to_grid", o.fallback_to_grid},
                      {"workers", o.workers}};
    j["monte_carlo"] = {{"samples", c.monte_carlo.samples},
                        {"workers", c.monte_carlo.workers},
                        {"block", c.monte_carlo.block}};
    if (c.adaptation) {
        const auto& a = *c.adaptation;
        j["adaptation"] = {{"delta_phi_deg", a.delta_phi_deg},
                           {"delta_theta_deg", a.delta_theta_deg},
                           {"threshold_w", opt(a.threshold_w)},
                           {"max_slots", a.max_slots},
                           {"enabled", a.enabled},
                           {"rearm", a.rearm},
                           {"draws_per_slot", a.draws_per_slot},
                           {"runs", a.runs},
                           {"initial_phi_t_deg", opt(a.initial_phi_t_deg)},
                           {"initial_phi_r_deg", opt(a.initial_phi_r_deg)}};
    } else {
        j["adaptation"] = nullptr;
    }
    j["seed"] = c.seed;
    j["output"] = {{"path", c.output.path}, {"format", c.output.format == OutputFormat::Csv ? "csv" : "json"}};
    return j;
}

inline LinkBudget build_budget(const ExperimentConfig& c) {
    LinkBudget b;
    b.p_t = c.link.tx_power_mw * 1e-3;
    b.lambda = units::wavelength(c.link.carrier_ghz * 1e9);
    b.d = c.link.distance_m;
    b.alpha = c.link.path_loss_exponent;
    b.n0 = units::dbm_to_watts(c.link.noise_psd_dbm_hz);
    b.w = c.link.bandwidth_ghz * 1e9;
    return b;
}

inline TrainingConfig build_training(const ExperimentConfig& c) {
    return {units::deg(c.training.sector_tx_deg), units::deg(c.training.sector_rx_deg), c.training.probe_us * 1e-6,
            c.training.slot_ms * 1e-3};
}

inline BeamBounds build_bounds(const ExperimentConfig& c) {
    const auto cfg = build_training(c);
    return c.beams.tx_mode == TxMode::Sector ? BeamBounds::sector_tx(cfg) : BeamBounds::pencil_pair(cfg);
}

inline OptimizerOptions build_optimizer(const ExperimentConfig& c) {
    OptimizerOptions o;
    o.objective = c.optimizer.objective;
    o.exponent = c.optimizer.exponent;
    o.k1 = c.antenna.k1;
    o.grid_step = units::deg(c.optimizer.grid_step_deg);
    o.max_iterations = c.optimizer.max_iterations;
    o.tolerance = c.optimizer.tolerance;
    o.armijo = c.optimizer.armijo;
    o.verify_with_grid = c.optimizer.verify_with_grid;
    o.fallback_to_grid = c.optimizer.fallback_to_grid;
    o.workers = c.optimizer.workers;
    return o;
}

inline MonteCarloOptions build_monte_carlo(const ExperimentConfig& c) {
    return {static_cast<std::size_t>(c.monte_carlo.samples), c.seed, c.monte_carlo.workers,
            static_cast<std::size_t>(c.monte_carlo.block)};
}

inline AdaptationConfig build_adaptation(const ExperimentConfig& c) {
    const AdaptationSection a = c.adaptation.value_or(AdaptationSection{});
    AdaptationConfig out;
    out.delta_phi = units::deg(a.delta_phi_deg);
    out.delta_theta = units::deg(a.delta_theta_deg);
    if (a.threshold_w) out.threshold = CustomThreshold{*a.threshold_w};
    out.max_slots = static_cast<std::size_t>(a.max_slots);
    out.seed = c.seed;
    out.enabled = a.enabled;
    out.rearm = a.rearm;
    out.draws_per_slot = static_cast<std::size_t>(a.draws_per_slot);
    out.k1 = c.antenna.k1;
    return out;
}

} // namespace mmwbeam
