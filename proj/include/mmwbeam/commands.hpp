#pragma once

// Subcommands and figure presets. Each returns the files it would write so
// that callers (CLI, tests) decide where the bytes go.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmwbeam/adaptation.hpp"
#include "mmwbeam/capstats.hpp"
#include "mmwbeam/config.hpp"
#include "mmwbeam/io.hpp"
#include "mmwbeam/optimizer.hpp"
#include "mmwbeam/units.hpp"

namespace mmwbeam {

struct OutputFile {
    std::string name;
    std::string content;
};

using Outputs = std::vector<OutputFile>;

namespace detail {

inline const char* extension(OutputFormat f) { return f == OutputFormat::Csv ? ".csv" : ".json"; }

/// lo, lo + step, ... up to hi (hi itself included when it lands on the grid).
inline std::vector<double> degree_axis(double lo, double hi, double step) {
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out[i] = lo + static_cast<double>(i) * step;
    return out;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. fn writes only to slot i.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::string tag(double deg) { return format_number(deg); }

struct Evaluation {
    double eta = 0.0;
    double surrogate = 0.0;
    double worst_case = 0.0;
    double expected = 0.0;
};

inline Evaluation evaluate_pair(const ExperimentConfig& c, const BeamPair& pair, double theta_m_deg) {
    const auto budget = build_budget(c);
    const auto cfg = build_training(c);
    const MisalignmentModel mis{units::deg(theta_m_deg)};
    Evaluation e;
    const auto s = surrogate_objective(budget, cfg, mis, pair, {c.optimizer.exponent});
    e.eta = s.eta;
    e.surrogate = s.rate;
    e.worst_case = worst_case_objective(budget, cfg, mis, pair, c.antenna.k1).rate;
    e.expected = expected_capacity(budget, cfg, pair, mis, c.antenna.k1).value;
    return e;
}

inline BeamPair initial_pair(const ExperimentConfig& c) {
    const AdaptationSection a = c.adaptation.value_or(AdaptationSection{});
    if (a.initial_phi_t_deg && a.initial_phi_r_deg)
        return {units::deg(*a.initial_phi_t_deg), units::deg(*a.initial_phi_r_deg)};
    auto opts = build_optimizer(c);
    opts.objective = Objective::Jensen;
    const auto r = optimize_beamwidths(build_budget(c), build_training(c), {0.0}, build_bounds(c), opts);
    BeamPair p = r.pair;
    if (a.initial_phi_t_deg) p.phi_t = units::deg(*a.initial_phi_t_deg);
    if (a.initial_phi_r_deg) p.phi_r = units::deg(*a.initial_phi_r_deg);
    return p;
}

} // namespace detail

/// theta_deg, gain_db for every configured half-power beamwidth.
inline Outputs gain_curve(const ExperimentConfig& c) {
    Outputs out;
    const auto thetas = detail::degree_axis(c.antenna.theta_min_deg, c.antenna.theta_max_deg, c.antenna.theta_step_deg);
    for (double h : c.antenna.hpbw_deg) {
        const AntennaPattern pattern{units::deg(h), c.antenna.k1};
        Table t({"theta_deg", "gain_db"});
        for (double th : thetas) t.add({th, gain_db(pattern, units::deg(th))});
        out.push_back({"gain_curve_" + detail::tag(h) + "deg" + detail::extension(c.output.format),
                       render(t, c, c.output.format)});
    }
    return out;
}

/// Capacity over the (phi_t, phi_r) grid for every theta_m.
inline Outputs capacity_surface(const ExperimentConfig& c) {
    const auto axis = detail::degree_axis(c.beams.min_deg, c.beams.max_deg, c.beams.step_deg);
    const std::size_t per_theta = axis.size() * axis.size();
    const std::size_t n = c.theta_m_deg.size() * per_theta;
    std::vector<detail::Evaluation> cells(n);
    detail::parallel_for(n, c.optimizer.workers, [&](std::size_t i) {
        const double theta = c.theta_m_deg[i / per_theta];
        const std::size_t k = i % per_theta;
        cells[i] = detail::evaluate_pair(c, {units::deg(axis[k / axis.size()]), units::deg(axis[k % axis.size()])}, theta);
    });
    Table t({"theta_m_deg", "phi_t_deg", "phi_r_deg", "eta", "surrogate", "worst_case", "expected"});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = i % per_theta;
        const auto& e = cells[i];
        t.add({c.theta_m_deg[i / per_theta], axis[k / axis.size()], axis[k % axis.size()], e.eta, e.surrogate,
               e.worst_case, e.expected});
    }
    return {{std::string("capacity_surface") + detail::extension(c.output.format), render(t, c, c.output.format)}};
}

/// Optimal pair for every theta_m. Always JSON.
inline Outputs optimize(const ExperimentConfig& c) {
    const auto budget = build_budget(c);
    const auto cfg = build_training(c);
    const auto bounds = build_bounds(c);
    const auto opts = build_optimizer(c);
    Table t({"theta_m_deg", "phi_t_deg", "phi_r_deg", "objective", "iterations", "converged", "grid_check_pass"});
    for (double theta : c.theta_m_deg) {
        const auto r = optimize_beamwidths(budget, cfg, {units::deg(theta)}, bounds, opts);
        t.add({theta, units::to_deg(r.pair.phi_t), units::to_deg(r.pair.phi_r), r.objective,
               static_cast<std::int64_t>(r.iterations), r.converged, r.grid_check_pass});
    }
    return {{"optimize.json", render_json({{"records", records(t)}}, c)}};
}

inline const char* method_name(CapacityMethod m) {
    switch (m) {
    case CapacityMethod::ClosedFormMainLobe: return "closed_form_main_lobe";
    case CapacityMethod::ClosedFormMixture: return "closed_form_mixture";
    case CapacityMethod::MonteCarlo: return "monte_carlo";
    }
    return "unknown";
}

/// Closed form and Monte Carlo rows for every (phi_t, phi_r, theta_m).
inline Outputs expected_capacity_table(const ExperimentConfig& c) {
    const auto budget = build_budget(c);
    const auto cfg = build_training(c);
    const auto mc = build_monte_carlo(c);
    Table t({"method", "phi_t_deg", "phi_r_deg", "theta_m_deg", "value", "stderr", "p_mm"});
    for (double pt : c.beams.phi_t_deg) {
        for (double pr : c.beams.phi_r_deg) {
            for (double theta : c.theta_m_deg) {
                const BeamPair pair{units::deg(pt), units::deg(pr)};
                const MisalignmentModel mis{units::deg(theta)};
                const auto cf = expected_capacity(budget, cfg, pair, mis, c.antenna.k1);
                const auto m = monte_carlo_expected_capacity(budget, cfg, pair, mis, mc, c.antenna.k1);
                for (const auto* e : {&cf, &m})
                    t.add({std::string(method_name(e->method)), pt, pr, theta, e->value, e->std_error, e->p_mm});
            }
        }
    }
    return {{std::string("expected_capacity") + detail::extension(c.output.format), render(t, c, c.output.format)}};
}

/// Slot trace (seeded run, with and without adaptation) and a multi-run summary per theta_m.
inline Outputs adapt_sim(const ExperimentConfig& c) {
    const auto budget = build_budget(c);
    const auto cfg = build_training(c);
    const AdaptationSection section = c.adaptation.value_or(AdaptationSection{});
    const auto adapt = build_adaptation(c);
    const BeamPair start = detail::initial_pair(c);

    Table trace({"theta_m_deg", "slot_index", "phi_t_deg", "phi_r_deg", "theta_drawn_deg", "mean_rssi_w", "threshold_w",
                 "capacity", "adapted", "widened", "capacity_static"});
    Table curve({"theta_m_deg", "slot_index", "mean_capacity_adaptive", "mean_capacity_static", "mean_phi_r_deg"});
    auto summary = nlohmann::json::array();
    for (double theta : c.theta_m_deg) {
        const MisalignmentModel mis{units::deg(theta)};
        AdaptationConfig off = adapt;
        off.enabled = false;
        const auto on_run = run_adaptation(budget, cfg, adapt, mis, start);
        const auto off_run = run_adaptation(budget, cfg, off, mis, start);
        for (std::size_t i = 0; i < on_run.trace.size(); ++i) {
            const auto& s = on_run.trace[i];
            trace.add({theta, static_cast<std::int64_t>(s.slot_index), units::to_deg(s.phi_t), units::to_deg(s.phi_r),
                       units::to_deg(s.theta_drawn), s.mean_rssi, s.threshold, s.capacity, s.adapted, s.widened,
                       off_run.trace[i].capacity});
        }

        const std::size_t slots = adapt.max_slots;
        std::vector<double> cap_on(slots, 0.0), cap_off(slots, 0.0), phi_r(slots, 0.0);
        for (std::uint64_t r = 0; r < section.runs; ++r) {
            AdaptationConfig a = adapt;
            a.seed = adapt.seed + r;
            AdaptationConfig b = a;
            b.enabled = false;
            const auto ra = run_adaptation(budget, cfg, a, mis, start);
            const auto rb = run_adaptation(budget, cfg, b, mis, start);
            for (std::size_t i = 0; i < slots; ++i) {
                cap_on[i] += ra.trace[i].capacity;
                cap_off[i] += rb.trace[i].capacity;
                phi_r[i] += ra.trace[i].phi_r;
            }
        }
        const auto runs = static_cast<double>(section.runs);
        for (std::size_t i = 0; i < slots; ++i)
            curve.add({theta, static_cast<std::int64_t>(i), cap_on[i] / runs, cap_off[i] / runs,
                       units::to_deg(phi_r[i] / runs)});

        const auto s = summarize_adaptation(budget, cfg, adapt, mis, start, static_cast<std::size_t>(section.runs));
        summary.push_back({{"theta_m_deg", theta},
                           {"phi_t_deg", units::to_deg(start.phi_t)},
                           {"phi_r_deg", units::to_deg(start.phi_r)},
                           {"runs", s.runs},
                           {"mean_capacity_adaptive", s.mean_capacity_adaptive},
                           {"mean_capacity_static", s.mean_capacity_static},
                           {"improvement_ratio", s.improvement_ratio},
                           {"mean_slots_to_stabilize", s.mean_slots_to_stabilize},
                           {"stabilized_runs", s.stabilized_runs},
                           {"adaptive_wins", s.adaptive_wins},
                           {"runs_with_retrips", s.runs_with_retrips},
                           {"mode", s.rearm ? "rearm" : "terminal"}});
    }
    const auto ext = detail::extension(c.output.format);
    return {{std::string("adapt_trace") + ext, render(trace, c, c.output.format)},
            {std::string("adapt_curve") + ext, render(curve, c, c.output.format)},
            {"adapt_summary.json", render_json({{"summary", summary}}, c)}};
}

// ---- presets ---------------------------------------------------------------

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"gain-curves", "capacity-surface", "sector-tx-sweep", "pencil-pair-sweep",
                                                "adaptation-demo"};
    return names;
}

/// The resolved config a preset starts from, before user overrides.
inline ExperimentConfig preset_config(std::string_view name) {
    ExperimentConfig c;
    if (name == "gain-curves") {
        c.antenna.hpbw_deg = {5.0, 10.0, 20.0, 40.0};
        c.antenna.theta_min_deg = -60.0;
        c.antenna.theta_max_deg = 60.0;
        c.antenna.theta_step_deg = 0.5;
    } else if (name == "capacity-surface") {
        c.theta_m_deg = {0.0, 3.0, 6.0, 9.0};
        c.beams.min_deg = 1.0;
        c.beams.max_deg = 90.0;
        c.beams.step_deg = 1.0;
    } else if (name == "sector-tx-sweep") {
        c.training.slot_ms = 10.0;
        c.theta_m_deg = {0.0, 3.0, 6.0, 9.0};
        c.beams.tx_mode = TxMode::Sector;
        c.beams.phi_t_deg = {90.0};
        c.beams.min_deg = 0.5;
        c.beams.max_deg = 90.0;
        c.beams.step_deg = 0.1;
        c.optimizer.objective = Objective::WorstCase;
    } else if (name == "pencil-pair-sweep") {
        c.training.slot_ms = 1000.0;
        c.theta_m_deg = {0.0, 3.0, 6.0, 9.0};
        c.beams.tx_mode = TxMode::Pencil;
        c.beams.min_deg = 0.5;
        c.beams.max_deg = 90.0;
        c.beams.step_deg = 0.5;
    } else if (name == "adaptation-demo") {
        c.training.slot_ms = 10.0;
        c.adaptation = AdaptationSection{};
    } else {
        throw config_error("preset", "unknown preset \"" + std::string(name) + "\"");
    }
    return c;
}

namespace detail {

inline Outputs sector_tx_sweep(const ExperimentConfig& c) {
    const auto axis = degree_axis(c.beams.min_deg, c.beams.max_deg, c.beams.step_deg);
    const double phi_t = c.beams.phi_t_deg.front();
    const std::size_t n = c.theta_m_deg.size() * axis.size();
    std::vector<Evaluation> cells(n);
    parallel_for(n, c.optimizer.workers, [&](std::size_t i) {
        cells[i] = evaluate_pair(c, {units::deg(phi_t), units::deg(axis[i % axis.size()])}, c.theta_m_deg[i / axis.size()]);
    });

    Outputs out;
    Table argmax({"theta_m_deg", "argmax_worst_case_deg", "argmax_surrogate_deg", "argmax_expected_deg",
                  "worst_case_ratio_15_vs_5"});
    auto at = [&](std::size_t row, double phi) {
        const auto it = std::min_element(axis.begin(), axis.end(),
                                         [&](double a, double b) { return std::abs(a - phi) < std::abs(b - phi); });
        return cells[row * axis.size() + static_cast<std::size_t>(it - axis.begin())].worst_case;
    };
    for (std::size_t row = 0; row < c.theta_m_deg.size(); ++row) {
        const double theta = c.theta_m_deg[row];
        Table t({"phi_r_deg", "worst_case", "surrogate", "expected"});
        std::size_t best_w = 0, best_s = 0, best_e = 0;
        for (std::size_t k = 0; k < axis.size(); ++k) {
            const auto& e = cells[row * axis.size() + k];
            t.add({axis[k], e.worst_case, e.surrogate, e.expected});
            if (e.worst_case > cells[row * axis.size() + best_w].worst_case) best_w = k;
            if (e.surrogate > cells[row * axis.size() + best_s].surrogate) best_s = k;
            if (e.expected > cells[row * axis.size() + best_e].expected) best_e = k;
        }
        const double low = at(row, 5.0);
        argmax.add({theta, axis[best_w], axis[best_s], axis[best_e], low > 0.0 ? at(row, 15.0) / low : 0.0});
        out.push_back({"sector_tx_sweep_theta_" + tag(theta) + "deg" + extension(c.output.format),
                       render(t, c, c.output.format)});
    }
    out.push_back({std::string("sector_tx_argmax") + extension(c.output.format), render(argmax, c, c.output.format)});
    return out;
}

inline Outputs pencil_pair_sweep(const ExperimentConfig& c) {
    const auto axis = degree_axis(c.beams.min_deg, c.beams.max_deg, c.beams.step_deg);
    const std::size_t m = c.theta_m_deg.size();
    const std::size_t n = axis.size() * m;
    std::vector<Evaluation> cells(n);
    parallel_for(n, c.optimizer.workers, [&](std::size_t i) {
        const double phi = units::deg(axis[i / m]);
        cells[i] = evaluate_pair(c, {phi, phi}, c.theta_m_deg[i % m]);
    });

    Table sweep({"phi_deg", "theta_m_deg", "worst_case", "surrogate", "expected"});
    Table gap({"phi_deg", "worst_case_max", "worst_case_min", "worst_case_gap", "surrogate_gap"});
    for (std::size_t k = 0; k < axis.size(); ++k) {
        double w_hi = -1.0, w_lo = 0.0, s_hi = -1.0, s_lo = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const auto& e = cells[k * m + j];
            sweep.add({axis[k], c.theta_m_deg[j], e.worst_case, e.surrogate, e.expected});
            if (j == 0 || e.worst_case > w_hi) w_hi = e.worst_case;
            if (j == 0 || e.worst_case < w_lo) w_lo = e.worst_case;
            if (j == 0 || e.surrogate > s_hi) s_hi = e.surrogate;
            if (j == 0 || e.surrogate < s_lo) s_lo = e.surrogate;
        }
        gap.add({axis[k], w_hi, w_lo, w_hi - w_lo, s_hi - s_lo});
    }
    const auto ext = extension(c.output.format);
    return {{std::string("pencil_pair_sweep") + ext, render(sweep, c, c.output.format)},
            {std::string("pencil_pair_gap") + ext, render(gap, c, c.output.format)}};
}

inline Outputs adaptation_demo(const ExperimentConfig& base) {
    struct Case {
        double phi;
        double theta_m;
    };
    Outputs out;
    for (const Case k : {Case{2.0, 2.0}, Case{2.0, 10.0}, Case{7.0, 15.0}}) {
        ExperimentConfig c = base;
        AdaptationSection a = c.adaptation.value_or(AdaptationSection{});
        a.initial_phi_t_deg = k.phi;
        a.initial_phi_r_deg = k.phi;
        c.adaptation = a;
        c.theta_m_deg = {k.theta_m};
        const std::string prefix = "adaptation_phi_" + tag(k.phi) + "deg_theta_" + tag(k.theta_m) + "deg_";
        for (auto& f : adapt_sim(c)) out.push_back({prefix + f.name.substr(std::string("adapt_").size()), f.content});
    }
    return out;
}

} // namespace detail

inline Outputs run_preset(std::string_view name, const ExperimentConfig& c) {
    if (name == "gain-curves") return gain_curve(c);
    if (name == "capacity-surface") return capacity_surface(c);
    if (name == "sector-tx-sweep") return detail::sector_tx_sweep(c);
    if (name == "pencil-pair-sweep") return detail::pencil_pair_sweep(c);
    if (name == "adaptation-demo") return detail::adaptation_demo(c);
    throw config_error("preset", "unknown preset \"" + std::string(name) + "\"");
}

/// Layers a user JSON document over `base` (RFC 7386 merge) and re-parses strictly.
inline ExperimentConfig apply_overrides(const ExperimentConfig& base, const nlohmann::json& overrides) {
    if (!overrides.is_object()) throw config_error("<document>", "expected an object");
    nlohmann::json merged = to_json(base);
    if (overrides.contains("link") && overrides["link"].is_object() && overrides["link"].contains("tx_power_dbm"))
        merged["link"].erase("tx_power_mw");
    merged.merge_patch(overrides);
    return parse_config_document(merged);
}

inline void write_outputs(const std::filesystem::path& dir, const Outputs& files) {
    for (const auto& f : files) write_file(dir / f.name, f.content);
}

} // namespace mmwbeam
