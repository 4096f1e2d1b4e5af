#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "fastosc/bound_state.hpp"
#include "fastosc/error.hpp"
#include "fastosc/two_scale.hpp"

namespace fastosc::harness {

/// Every violation found while validating a configuration, not just the first.
class ConfigError : public InputError {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : InputError(join(violations)), violations_(std::move(violations)) {}

    std::vector<std::string> const& violations() const { return violations_; }

private:
    static std::string join(std::vector<std::string> const& v) {
        std::string s = "invalid configuration:";
        for (auto const& m : v) s += "\n  - " + m;
        return s;
    }
    std::vector<std::string> violations_;
};

struct ExperimentConfig {
    Interval support{0.0, 1.0};
    TwoScaleFunction potential;
    bool real = false;
    SolverConfig solver;
    std::optional<Interval> bracket;
    std::vector<double> epsilons;
    std::uint64_t seed = 0;
};

/// Commands whose runs rely on a zero-mean potential.
inline bool is_theorem_command(std::string const& command) {
    static std::set<std::string> const theorem{"k2", "predict", "sweep", "keps", "lemma", "gauge-check"};
    return theorem.count(command) != 0;
}

namespace detail {

using json = nlohmann::json;

inline void check_keys(json const& obj, std::string const& where, std::set<std::string> const& allowed,
                       std::vector<std::string>& errs) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) errs.push_back("unknown key '" + it.key() + "' in " + where);
}

inline std::optional<Interval> read_interval(json const& j, std::string const& where, std::vector<std::string>& errs) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        errs.push_back(where + " must be a two-element numeric array [lo, hi]");
        return std::nullopt;
    }
    Interval i{j[0].get<double>(), j[1].get<double>()};
    if (!(i.hi > i.lo)) {
        errs.push_back(where + " must satisfy lo < hi");
        return std::nullopt;
    }
    return i;
}

inline std::optional<SlowProfile> read_profile(json const& j, std::string const& where, Interval fallback,
                                               std::vector<std::string>& errs) {
    if (!j.is_object()) {
        errs.push_back(where + " must be an object");
        return std::nullopt;
    }
    check_keys(j, where, {"kind", "power", "amplitude_re", "amplitude_im", "support"}, errs);
    std::string const kind = j.value("kind", std::string{});
    double re = 0.0, im = 0.0;
    for (auto [key, dst] : {std::pair{"amplitude_re", &re}, std::pair{"amplitude_im", &im}}) {
        if (!j.contains(key)) continue;
        if (!j[key].is_number()) errs.push_back(where + "." + key + " must be a number");
        else *dst = j[key].get<double>();
    }
    Interval support = fallback;
    if (j.contains("support")) {
        auto s = read_interval(j["support"], where + ".support", errs);
        if (!s) return std::nullopt;
        support = *s;
    }
    if (kind == "zero") return SlowProfile::zero();
    if (kind == "smooth_bump") {
        if (j.contains("power")) errs.push_back(where + ".power is only valid for polynomial_bump");
        return SlowProfile::smooth_bump({re, im}, support);
    }
    if (kind == "polynomial_bump") {
        if (!j.contains("power") || !j["power"].is_number_integer() || j["power"].get<int>() < 0) {
            errs.push_back(where + ".power must be a non-negative integer");
            return std::nullopt;
        }
        return SlowProfile::polynomial_bump({re, im}, j["power"].get<int>(), support);
    }
    errs.push_back(where + ".kind must be one of polynomial_bump, smooth_bump, zero (got '" + kind + "')");
    return std::nullopt;
}

} // namespace detail

/// Parses the JSON experiment description. `command`, when given, enables the
/// command-specific checks (zero-mean potential for theorem commands, non-empty modes).
inline ExperimentConfig parse_config(std::string const& text, std::optional<std::string> const& command = std::nullopt) {
    using detail::json;
    std::vector<std::string> errs;
    json root;
    try {
        root = json::parse(text);
    } catch (json::parse_error const& e) {
        throw ConfigError({std::string("malformed config: ") + e.what()});
    }
    if (!root.is_object()) throw ConfigError({"config root must be an object"});
    detail::check_keys(root, "config", {"potential", "solver", "sweep", "seed"}, errs);

    ExperimentConfig cfg;
    TwoScaleFunction::ModeMap modes;
    bool has_zero_mode = false;
    std::size_t mode_entries = 0;

    if (!root.contains("potential") || !root["potential"].is_object()) {
        errs.push_back("missing object 'potential'");
    } else {
        auto const& pot = root["potential"];
        detail::check_keys(pot, "potential", {"support", "modes", "cos", "sin"}, errs);
        if (pot.contains("support")) {
            if (auto s = detail::read_interval(pot["support"], "potential.support", errs)) cfg.support = *s;
        } else {
            errs.push_back("missing potential.support");
        }
        for (std::string const group : {"modes", "cos", "sin"}) {
            if (!pot.contains(group)) continue;
            if (!pot[group].is_array()) {
                errs.push_back("potential." + group + " must be an array");
                continue;
            }
            for (std::size_t i = 0; i < pot[group].size(); ++i) {
                auto const& m = pot[group][i];
                std::string const where = "potential." + group + "[" + std::to_string(i) + "]";
                if (!m.is_object()) {
                    errs.push_back(where + " must be an object");
                    continue;
                }
                detail::check_keys(m, where, {"n", "profile"}, errs);
                if (!m.contains("n") || !m["n"].is_number_integer()) {
                    errs.push_back(where + ".n must be an integer");
                    continue;
                }
                int const n = m["n"].get<int>();
                if (group != "modes" && n <= 0) {
                    errs.push_back(where + ".n must be a positive integer for " + group + " shorthand");
                    continue;
                }
                if (!m.contains("profile")) {
                    errs.push_back(where + ".profile is missing");
                    continue;
                }
                auto p = detail::read_profile(m["profile"], where + ".profile", cfg.support, errs);
                if (!p) continue;
                if (p->kind() != ProfileKind::Zero && !cfg.support.covers(p->support()))
                    errs.push_back(where + ".profile.support must lie inside potential.support");
                ++mode_entries;
                if (group == "modes") {
                    if (n == 0) has_zero_mode = true;
                    modes[n] = modes[n] + Coefficient(*p);
                } else {
                    auto const expanded = group == "cos" ? TwoScaleFunction::cosine(*p, n) : TwoScaleFunction::sine(*p, n);
                    for (auto const& [k, c] : expanded.modes()) modes[k] = modes[k] + c;
                }
            }
        }
    }

    if (root.contains("solver")) {
        auto const& s = root["solver"];
        if (!s.is_object()) {
            errs.push_back("solver must be an object");
        } else {
            detail::check_keys(s, "solver",
                               {"points_per_fast_period", "root_tol", "kappa_floor", "scan_window", "scan_samples",
                                "max_iterations", "bracket", "rk_order"},
                               errs);
            auto read_int = [&](char const* key, int& dst) {
                if (!s.contains(key)) return;
                if (!s[key].is_number_integer()) errs.push_back(std::string("solver.") + key + " must be an integer");
                else dst = s[key].get<int>();
            };
            auto read_real = [&](char const* key, double& dst) {
                if (!s.contains(key)) return;
                if (!s[key].is_number()) errs.push_back(std::string("solver.") + key + " must be a number");
                else dst = s[key].get<double>();
            };
            read_int("points_per_fast_period", cfg.solver.points_per_fast_period);
            read_int("scan_samples", cfg.solver.scan_samples);
            read_int("max_iterations", cfg.solver.max_iterations);
            read_real("root_tol", cfg.solver.root_tol);
            read_real("kappa_floor", cfg.solver.kappa_floor);
            if (s.contains("rk_order") && !(s["rk_order"].is_number_integer() && s["rk_order"].get<int>() == 4))
                errs.push_back("solver.rk_order must be 4");
            if (s.contains("scan_window"))
                if (auto w = detail::read_interval(s["scan_window"], "solver.scan_window", errs)) cfg.solver.scan_window = *w;
            if (s.contains("bracket")) cfg.bracket = detail::read_interval(s["bracket"], "solver.bracket", errs);
            if (cfg.solver.points_per_fast_period < 20) errs.push_back("solver.points_per_fast_period must be >= 20");
            if (!(cfg.solver.root_tol > 0.0)) errs.push_back("solver.root_tol must be positive");
            if (!(cfg.solver.kappa_floor > 0.0)) errs.push_back("solver.kappa_floor must be positive");
            if (cfg.solver.scan_samples < 2) errs.push_back("solver.scan_samples must be >= 2");
        }
    }

    if (root.contains("sweep")) {
        auto const& s = root["sweep"];
        if (!s.is_object()) {
            errs.push_back("sweep must be an object");
        } else {
            detail::check_keys(s, "sweep", {"epsilons"}, errs);
            if (s.contains("epsilons")) {
                if (!s["epsilons"].is_array()) {
                    errs.push_back("sweep.epsilons must be an array");
                } else {
                    for (auto const& e : s["epsilons"]) {
                        if (!e.is_number() || !(e.get<double>() > 0.0)) {
                            errs.push_back("sweep.epsilons entries must be positive numbers");
                            break;
                        }
                        cfg.epsilons.push_back(e.get<double>());
                    }
                    for (std::size_t i = 1; i < cfg.epsilons.size(); ++i)
                        if (!(cfg.epsilons[i] < cfg.epsilons[i - 1])) {
                            errs.push_back("sweep.epsilons must be strictly decreasing");
                            break;
                        }
                }
            }
        }
    }

    if (root.contains("seed")) {
        if (!root["seed"].is_number_integer() || root["seed"].get<std::int64_t>() < 0) errs.push_back("seed must be a non-negative integer");
        else cfg.seed = root["seed"].get<std::uint64_t>();
    }

    if (command) {
        if (mode_entries == 0) errs.push_back("potential needs at least one mode for '" + *command + "'");
        if (is_theorem_command(*command) && has_zero_mode)
            errs.push_back("mode n = 0 not allowed for '" + *command +
                           "': the potential must have zero mean over the fast period");
        if (*command != "k2" && cfg.epsilons.empty()) errs.push_back("sweep.epsilons must be non-empty for '" + *command + "'");
    }

    if (!errs.empty()) throw ConfigError(std::move(errs));
    cfg.potential = TwoScaleFunction(std::move(modes), cfg.support);
    cfg.real = cfg.potential.is_real();
    return cfg;
}

} // namespace fastosc::harness
