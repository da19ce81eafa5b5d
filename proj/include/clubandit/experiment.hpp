#pragma once

// Experiment harness: JSON configs, the two built-in presets, seeded parallel
// replication, per-checkpoint aggregation and CSV/SVG output.

#include <clubandit/algorithms.hpp>
#include <clubandit/bounds.hpp>
#include <clubandit/clustering.hpp>
#include <clubandit/core.hpp>
#include <clubandit/env.hpp>

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace clubandit {

struct ExperimentConfig {
    ParameterSet parameter_set;
    ArrivalConfig arrival;
    bool single_user = false;
    std::vector<AlgorithmSpec> algorithms;
    std::uint64_t horizon = 0;  // 0: num_users * tau
    std::size_t runs = 1;
    std::uint64_t seed = 0;
    std::uint64_t checkpoint_every = 100;

    std::uint64_t effective_horizon() const noexcept { return horizon == 0 ? arrival.horizon() : horizon; }
};

/// Configuration problem, tagged with the source and 1-based line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, std::size_t line, const std::string& message)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::size_t line_at(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Line of the first occurrence of `needle` at or after `from`, else 1.
inline std::size_t line_of(const std::string& text, const std::string& needle, std::size_t from = 0) {
    const auto pos = text.find(needle, from);
    return pos == std::string::npos ? 1 : line_at(text, pos);
}

inline std::string quoted(const std::string& key) { return "\"" + key + "\""; }

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>") {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source, detail::line_at(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
    const auto fail = [&](const std::string& key, const std::string& message) -> ConfigError {
        return ConfigError(source, detail::line_of(text, detail::quoted(key)), message);
    };
    if (!j.is_object()) throw ConfigError(source, 1, "config must be a JSON object");

    ExperimentConfig cfg;
    try {
        if (!j.contains("parameter_set")) throw fail("parameter_set", "missing 'parameter_set'");
        cfg.parameter_set = ParameterSet::from_rows(j.at("parameter_set").get<std::vector<std::vector<double>>>());
        if (!cfg.parameter_set.unique_optima()) {
            throw fail("parameter_set", "every type must have a unique optimal arm");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw fail("parameter_set", std::string("invalid parameter_set: ") + e.what());
    }
    const std::size_t n = cfg.parameter_set.num_types();

    try {
        if (j.contains("arrival") == j.contains("single_user")) {
            throw fail(j.contains("arrival") ? "single_user" : "algorithms",
                       "exactly one of 'arrival' or 'single_user' is required");
        }
        if (j.contains("arrival")) {
            const auto& a = j.at("arrival");
            cfg.arrival.num_users = a.at("num_users").get<std::size_t>();
            cfg.arrival.tau = a.at("tau").get<std::size_t>();
            cfg.arrival.type_probs = a.value("type_probs", std::vector<double>(n, 1.0 / static_cast<double>(n)));
        } else {
            const auto& s = j.at("single_user");
            cfg.single_user = true;
            cfg.arrival = single_user(s.at("type_probs").get<std::vector<double>>(), s.at("horizon").get<std::size_t>());
        }
        cfg.arrival.validate();
        if (cfg.arrival.type_probs.size() != n) throw std::invalid_argument("type_probs must have one entry per type");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        const std::string key = j.contains("arrival") ? "arrival" : "single_user";
        throw fail(key, "invalid '" + key + "': " + e.what());
    }

    try {
        cfg.horizon = j.value("horizon", std::uint64_t{0});
        cfg.runs = j.value("runs", std::size_t{1});
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.checkpoint_every = j.value("checkpoint_every", std::uint64_t{100});
    } catch (const std::exception& e) {
        throw fail("runs", std::string("invalid run settings: ") + e.what());
    }
    if (cfg.horizon > cfg.arrival.horizon()) throw fail("horizon", "horizon exceeds num_users * tau");
    if (cfg.runs == 0) throw fail("runs", "runs must be >= 1");
    if (cfg.checkpoint_every == 0) throw fail("checkpoint_every", "checkpoint_every must be >= 1");

    if (!j.contains("algorithms") || !j.at("algorithms").is_array() || j.at("algorithms").empty()) {
        throw fail("algorithms", "'algorithms' must be a non-empty array");
    }
    std::size_t cursor = text.find("\"algorithms\"");
    for (const auto& item : j.at("algorithms")) {
        AlgorithmSpec spec;
        std::size_t line = detail::line_at(text, cursor);
        try {
            spec.name = item.at("name").get<std::string>();
            const auto at = text.find(detail::quoted(spec.name), cursor);
            if (at != std::string::npos) {
                cursor = at + 1;
                line = detail::line_at(text, at);
            }
            spec.label = item.value("label", std::string{});
            if (spec.display_name().find_first_of(",\"\n") != std::string::npos) {
                throw std::invalid_argument("algorithm labels may not contain commas, quotes or newlines");
            }
            if (item.contains("params")) {
                const auto& p = item.at("params");
                if (p.contains("m0")) spec.params.m0 = p.at("m0").get<std::size_t>();
                if (p.contains("delta")) spec.params.delta = p.at("delta").get<double>();
                if (p.contains("m_th")) spec.params.m_th = p.at("m_th").get<std::size_t>();
                if (p.contains("recluster_every")) spec.params.recluster_every = p.at("recluster_every").get<std::size_t>();
                if (p.contains("elite_only")) spec.params.elite_only = p.at("elite_only").get<bool>();
                if (p.contains("arm")) spec.params.arm = p.at("arm").get<std::size_t>();
            }
            validate_algorithm(spec, cfg.parameter_set);
        } catch (const std::exception& e) {
            throw ConfigError(source, line, e.what());
        }
        cfg.algorithms.push_back(std::move(spec));
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 1, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
    using nlohmann::json;
    json j;
    j["parameter_set"] = cfg.parameter_set.means().to_rows();
    if (cfg.single_user) {
        j["single_user"] = {{"type_probs", cfg.arrival.type_probs}, {"horizon", cfg.arrival.tau}};
    } else {
        j["arrival"] = {{"num_users", cfg.arrival.num_users}, {"tau", cfg.arrival.tau}, {"type_probs", cfg.arrival.type_probs}};
    }
    json algs = json::array();
    for (const auto& a : cfg.algorithms) {
        json p = json::object();
        if (a.params.m0) p["m0"] = *a.params.m0;
        if (a.params.delta) p["delta"] = *a.params.delta;
        if (a.params.m_th) p["m_th"] = *a.params.m_th;
        if (a.params.recluster_every) p["recluster_every"] = *a.params.recluster_every;
        if (a.params.elite_only) p["elite_only"] = *a.params.elite_only;
        if (a.params.arm) p["arm"] = *a.params.arm;
        json item = {{"name", a.name}, {"params", p}};
        if (!a.label.empty()) item["label"] = a.label;
        algs.push_back(item);
    }
    j["algorithms"] = algs;
    if (cfg.horizon != 0) j["horizon"] = cfg.horizon;
    j["runs"] = cfg.runs;
    j["seed"] = cfg.seed;
    j["checkpoint_every"] = cfg.checkpoint_every;
    return j;
}

/// 21 types over 21 arms: type 0 has 0.55 on arm 0; type x >= 1 shares the
/// 0.55 on arm 0 and has 0.6 on arm x; every other mean is 0.5.
inline ParameterSet fig1_parameter_set() {
    constexpr std::size_t n = 21;
    Matrix m(n, n, 0.5);
    for (std::size_t x = 0; x < n; ++x) m(x, 0) = 0.55;
    for (std::size_t x = 1; x < n; ++x) m(x, x) = 0.6;
    return ParameterSet(std::move(m));
}

inline ParameterSet fig2_parameter_set() {
    return ParameterSet::from_rows({{0.6, 0.5, 0.5, 0.5}, {0.5, 0.6, 0.5, 0.5}});
}

inline ExperimentConfig preset_fig1(std::size_t horizon = 5000) {
    ExperimentConfig cfg;
    cfg.parameter_set = fig1_parameter_set();
    std::vector<double> probs(21, 1.0 / 40.0);
    probs[0] = 0.5;
    cfg.arrival = single_user(std::move(probs), horizon);
    cfg.single_user = true;
    AlgorithmSpec ucb{std::string(names::ucb), {}, "ucb-elite"};
    ucb.params.elite_only = true;
    cfg.algorithms = {ucb, AlgorithmSpec{std::string(names::ucb_kt), {}, ""}};
    cfg.runs = 100;
    cfg.seed = 1;
    cfg.checkpoint_every = 100;
    return cfg;
}

inline ExperimentConfig preset_fig2() {
    ExperimentConfig cfg;
    cfg.parameter_set = fig2_parameter_set();
    cfg.arrival = ArrivalConfig{2000, 100, {0.5, 0.5}};
    AlgorithmSpec per_user{std::string(names::ucb), {}, "ucb-per-user"};
    AlgorithmSpec continuous{std::string(names::kmeans_ucb_continuous), {}, ""};
    AlgorithmSpec unif{std::string(names::unif_kmeans_ucb_et), {}, ""};
    unif.params.m0 = 40;
    unif.params.delta = 0.01;
    AlgorithmSpec ucbp{std::string(names::ucb_kmeans_ucb_et), {}, ""};
    ucbp.params.m0 = 40;
    ucbp.params.delta = 0.01;
    AlgorithmSpec types{std::string(names::ucb_on_types), {}, ""};
    cfg.algorithms = {per_user, continuous, unif, ucbp, types};
    cfg.runs = 20;
    cfg.seed = 1;
    cfg.checkpoint_every = 100;
    return cfg;
}

struct CurvePoint {
    std::uint64_t t = 0;
    std::string algorithm;
    double mean_regret = 0.0;
    double stderr_regret = 0.0;
    std::size_t runs = 0;
};

struct AggregateCurve {
    std::vector<CurvePoint> points;  // grouped by algorithm, ascending t
};

struct SuiteResult {
    AggregateCurve curve;
    /// final_regret[algorithm][run]
    std::vector<std::vector<double>> final_regret;
    /// traces[algorithm][run]; checkpoints always, records with full_trace
    std::vector<std::vector<RunTrace>> traces;
};

struct RunOptions {
    std::size_t parallelism = 1;
    bool full_trace = false;
};

/// Raised when a replication throws; carries how many finished.
class RunFailure : public std::runtime_error {
public:
    RunFailure(const std::string& what, std::size_t completed, std::size_t total)
        : std::runtime_error(what), completed_(completed), total_(total) {}
    std::size_t completed() const noexcept { return completed_; }
    std::size_t total() const noexcept { return total_; }

private:
    std::size_t completed_;
    std::size_t total_;
};

inline std::uint64_t run_seed(const ExperimentConfig& cfg, std::size_t run) { return cfg.seed + run; }

/// One replication of one algorithm. Arrivals and rewards depend only on the
/// run seed, so all algorithms of a run face the same users and reward stream.
inline RunTrace run_single(const ExperimentConfig& cfg, std::size_t algorithm_index, std::size_t run, bool full_trace) {
    const std::uint64_t root = run_seed(cfg, run);
    std::vector<Arrival> arrivals = generate_arrivals(cfg.arrival, root);
    arrivals.resize(static_cast<std::size_t>(cfg.effective_horizon()));
    auto algo = make_algorithm(cfg.algorithms.at(algorithm_index), cfg.parameter_set, root);
    return run_experiment(cfg.parameter_set, arrivals, *algo, root, TraceOptions{cfg.checkpoint_every, full_trace});
}

inline AggregateCurve aggregate(const ExperimentConfig& cfg, const std::vector<std::vector<RunTrace>>& traces) {
    AggregateCurve curve;
    for (std::size_t a = 0; a < traces.size(); ++a) {
        const auto& runs = traces[a];
        const std::size_t r = runs.size();
        const std::size_t points = runs.front().checkpoints.size();
        for (std::size_t i = 0; i < points; ++i) {
            double sum = 0.0;
            for (const auto& tr : runs) sum += tr.checkpoints.at(i).cumulative_regret;
            const double mean = sum / static_cast<double>(r);
            double ss = 0.0;
            for (const auto& tr : runs) {
                const double dv = tr.checkpoints[i].cumulative_regret - mean;
                ss += dv * dv;
            }
            const double se = r > 1 ? std::sqrt(ss / static_cast<double>(r - 1)) / std::sqrt(static_cast<double>(r)) : 0.0;
            curve.points.push_back({runs.front().checkpoints[i].t, cfg.algorithms[a].display_name(), mean, se, r});
        }
    }
    return curve;
}

/// Executes every (algorithm, run) pair on a pool of `parallelism` workers.
/// Results are stored by index, so the output does not depend on scheduling.
inline SuiteResult run_suite(const ExperimentConfig& cfg, RunOptions options = {}) {
    const std::size_t algs = cfg.algorithms.size();
    const std::size_t total = algs * cfg.runs;
    if (total == 0) throw std::invalid_argument("nothing to run");
    for (const auto& spec : cfg.algorithms) validate_algorithm(spec, cfg.parameter_set);

    SuiteResult result;
    result.traces.assign(algs, std::vector<RunTrace>(cfg.runs));
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> completed{0};
    std::atomic<bool> abort{false};
    std::mutex error_mutex;
    std::string first_error;

    const auto worker = [&] {
        while (!abort.load()) {
            const std::size_t job = next.fetch_add(1);
            if (job >= total) return;
            const std::size_t a = job % algs;
            const std::size_t run = job / algs;
            try {
                result.traces[a][run] = run_single(cfg, a, run, options.full_trace);
                ++completed;
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (first_error.empty()) {
                    first_error = "run " + std::to_string(run) + " of " + cfg.algorithms[a].display_name() +
                                  " failed: " + e.what();
                }
                abort = true;
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.parallelism, 1, total);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (abort) throw RunFailure(first_error, completed.load(), total);

    result.curve = aggregate(cfg, result.traces);
    result.final_regret.assign(algs, std::vector<double>(cfg.runs));
    for (std::size_t a = 0; a < algs; ++a) {
        for (std::size_t r = 0; r < cfg.runs; ++r) result.final_regret[a][r] = result.traces[a][r].cumulative_regret;
    }
    return result;
}

inline std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline void write_csv(const AggregateCurve& curve, std::ostream& out) {
    out << "t,algorithm,mean_regret,stderr,runs\n";
    for (const auto& p : curve.points) {
        out << p.t << ',' << p.algorithm << ',' << format_g6(p.mean_regret) << ',' << format_g6(p.stderr_regret) << ','
            << p.runs << '\n';
    }
}

inline void write_trace_csv(const RunTrace& trace, std::ostream& out) {
    out << "t,user,true_type,arm,reward,regret_increment,cumulative_regret\n";
    double cumulative = 0.0;
    for (const auto& r : trace.records) {
        cumulative += r.regret_increment;
        out << r.t << ',' << r.user << ',' << r.true_type << ',' << r.arm << ',' << r.reward << ','
            << format_g6(r.regret_increment) << ',' << format_g6(cumulative) << '\n';
    }
}

/// Line chart of mean regret per algorithm with a +-2 stderr band.
inline void write_svg(const AggregateCurve& curve, std::ostream& out, const std::string& title = "Cumulative regret") {
    constexpr double width = 800, height = 500, left = 80, right = 200, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::vector<std::string> order;
    double t_max = 1.0, y_max = 0.0;
    for (const auto& p : curve.points) {
        if (std::find(order.begin(), order.end(), p.algorithm) == order.end()) order.push_back(p.algorithm);
        t_max = std::max(t_max, static_cast<double>(p.t));
        y_max = std::max(y_max, p.mean_regret + 2.0 * p.stderr_regret);
    }
    if (y_max <= 0.0) y_max = 1.0;
    const auto sx = [&](double t) { return left + plot_w * t / t_max; };
    const auto sy = [&](double y) { return top + plot_h * (1.0 - y / y_max); };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double tv = t_max * i / 5.0, yv = y_max * i / 5.0;
        out << "<text x=\"" << sx(tv) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">" << format_g6(tv)
            << "</text>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << format_g6(yv)
            << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">t</text>\n";

    for (std::size_t k = 0; k < order.size(); ++k) {
        const char* color = palette[k % std::size(palette)];
        std::ostringstream upper, lower, line;
        std::vector<const CurvePoint*> pts;
        for (const auto& p : curve.points) {
            if (p.algorithm == order[k]) pts.push_back(&p);
        }
        for (const auto* p : pts) {
            upper << sx(static_cast<double>(p->t)) << ',' << sy(p->mean_regret + 2 * p->stderr_regret) << ' ';
            line << sx(static_cast<double>(p->t)) << ',' << sy(p->mean_regret) << ' ';
        }
        for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
            lower << sx(static_cast<double>((*it)->t)) << ',' << sy(std::max(0.0, (*it)->mean_regret - 2 * (*it)->stderr_regret))
                  << ' ';
        }
        out << "<polygon points=\"" << upper.str() << lower.str() << "\" fill=\"" << color
            << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        out << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        const double ly = top + 10 + 20.0 * static_cast<double>(k);
        out << "<line x1=\"" << left + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 40 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + plot_w + 45 << "\" y=\"" << ly + 4 << "\">" << order[k] << "</text>\n";
    }
    out << "</svg>\n";
}

inline nlohmann::json to_json(const BoundReport& r) {
    nlohmann::json j;
    j["kind"] = to_string(r.kind);
    const auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    j["value"] = finite_or_null(r.value);
    j["unbounded"] = std::isinf(r.value);
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = v;
    j["inputs"] = inputs;
    nlohmann::json terms = nlohmann::json::object();
    for (const auto& [k, v] : r.terms) terms[k] = finite_or_null(v);
    j["terms"] = terms;
    if (r.confusion_set_empty) j["confusion_set_empty"] = *r.confusion_set_empty;
    return j;
}

/// Inputs of the `bounds` subcommand. Unset values fall back to the config
/// (arrival tau, horizon, the first explore-cluster algorithm's m0 and delta).
struct BoundsRequest {
    std::string kind;  // lemma1 | thm1 | thm2 | thm3 | eq1
    std::optional<TypeId> type;
    std::optional<double> horizon;
    std::optional<double> delta;
    std::optional<double> epsilon;
    std::optional<std::size_t> m0;
    std::optional<std::size_t> tau;
    std::optional<double> g;
    /// When g is absent for thm3: replications of estimate_g (seeded by `seed`).
    std::size_t g_reps = 200;
    std::uint64_t seed = 0;
};

inline std::vector<BoundReport> evaluate_bounds(const std::string& config_text, const BoundsRequest& req,
                                                const std::string& source = "<config>") {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(config_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source, detail::line_at(config_text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
    ParameterSet params;
    try {
        params = ParameterSet::from_rows(j.at("parameter_set").get<std::vector<std::vector<double>>>());
        derive_structure(params);
    } catch (const std::exception& e) {
        throw ConfigError(source, detail::line_of(config_text, "\"parameter_set\""),
                          std::string("invalid parameter_set: ") + e.what());
    }

    std::optional<std::size_t> cfg_tau, cfg_m0;
    std::optional<double> cfg_horizon, cfg_delta;
    if (j.contains("arrival")) {
        const auto& a = j.at("arrival");
        cfg_tau = a.value("tau", std::size_t{1});
        cfg_horizon = static_cast<double>(a.value("num_users", std::size_t{1}) * *cfg_tau);
    } else if (j.contains("single_user")) {
        cfg_horizon = static_cast<double>(j.at("single_user").value("horizon", std::size_t{0}));
    }
    if (j.contains("horizon")) cfg_horizon = j.at("horizon").get<double>();
    if (j.contains("algorithms")) {
        for (const auto& a : j.at("algorithms")) {
            if (!a.contains("params")) continue;
            const auto& p = a.at("params");
            if (!cfg_m0 && p.contains("m0")) {
                cfg_m0 = p.at("m0").get<std::size_t>();
                if (p.contains("delta")) cfg_delta = p.at("delta").get<double>();
            }
        }
    }

    const auto require = [&](const auto& value, const char* flag) {
        if (!value) throw std::invalid_argument("bounds --kind " + req.kind + " needs " + flag);
        return *value;
    };
    const auto types = [&] {
        std::vector<TypeId> out;
        if (req.type) {
            out.push_back(*req.type);
        } else {
            for (TypeId x = 0; x < params.num_types(); ++x) out.push_back(x);
        }
        return out;
    };

    std::vector<BoundReport> reports;
    if (req.kind == "lemma1") {
        reports.push_back(lemma1_bound(req.epsilon.value_or(derive_structure(params).epsilon_star)));
    } else if (req.kind == "thm1" || req.kind == "thm2") {
        const double horizon = require(req.horizon ? req.horizon : cfg_horizon, "--horizon");
        const double delta = req.delta.value_or(0.0);
        for (const TypeId x : types()) reports.push_back(thm1_bound(params, x, horizon, delta));
    } else if (req.kind == "thm3") {
        const std::size_t m0 = require(req.m0 ? req.m0 : cfg_m0, "--m0");
        const std::size_t tau = require(req.tau ? req.tau : cfg_tau, "--tau");
        const double delta = require(req.delta ? req.delta : cfg_delta, "--delta");
        const double horizon = require(req.horizon ? req.horizon : cfg_horizon, "--horizon");
        const double g = req.g ? *req.g : estimate_g(params, delta, m0, tau, req.g_reps, req.seed);
        reports.push_back(thm3_bound(params, m0, tau, delta, g, horizon));
    } else if (req.kind == "eq1") {
        if (req.type) {
            reports.push_back(eq1_report(params, *req.type));
        } else {
            const DerivedStructure d = derive_structure(params);
            for (TypeId x = 0; x < params.num_types(); ++x) {
                if (!confusion_set(params, d, x, 0.0).empty()) reports.push_back(eq1_report(params, x));
            }
        }
    } else {
        throw std::invalid_argument("unknown bound kind '" + req.kind + "'");
    }
    return reports;
}

}  // namespace clubandit
