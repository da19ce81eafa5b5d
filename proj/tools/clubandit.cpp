// Command-line entry point: run experiments from JSON configs, reproduce the
// two built-in presets and evaluate regret bounds.

#include <clubandit/clubandit.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace clubandit;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 1, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int execute(const ExperimentConfig& cfg, std::size_t parallelism, const fs::path& out_dir, bool full_trace,
            const std::string& title) {
    fs::create_directories(out_dir);
    const auto start = std::chrono::steady_clock::now();
    SuiteResult result;
    try {
        result = run_suite(cfg, RunOptions{parallelism, full_trace});
    } catch (const RunFailure& e) {
        std::cerr << "aborted: " << e.what() << "\npartial results: " << e.completed() << " of " << e.total()
                  << " replications finished; no output written\n";
        return 3;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ostringstream csv, svg;
    write_csv(result.curve, csv);
    write_svg(result.curve, svg, title);
    write_text(out_dir / "regret.csv", csv.str());
    write_text(out_dir / "regret.svg", svg.str());
    if (full_trace) {
        for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
            for (std::size_t r = 0; r < cfg.runs; ++r) {
                std::ostringstream t;
                write_trace_csv(result.traces[a][r], t);
                write_text(out_dir / ("trace_" + cfg.algorithms[a].display_name() + "_run" + std::to_string(r) + ".csv"),
                           t.str());
            }
        }
    }

    std::cout << "final mean regret at t = " << cfg.effective_horizon() << " over " << cfg.runs << " runs ("
              << format_g6(secs) << " s):\n";
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
        const auto& finals = result.final_regret[a];
        double mean = 0.0;
        for (const double v : finals) mean += v;
        mean /= static_cast<double>(finals.size());
        double ss = 0.0;
        for (const double v : finals) ss += (v - mean) * (v - mean);
        const double se = finals.size() > 1 ? std::sqrt(ss / static_cast<double>(finals.size() - 1) /
                                                        static_cast<double>(finals.size()))
                                            : 0.0;
        std::cout << "  " << cfg.algorithms[a].display_name() << ": " << format_g6(mean) << " +- " << format_g6(se)
                  << '\n';
    }
    std::cout << "wrote " << (out_dir / "regret.csv").string() << " and " << (out_dir / "regret.svg").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clustered multi-armed bandit simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::size_t parallelism = std::max(1U, std::thread::hardware_concurrency());
    std::string out_dir = ".";
    bool full_trace = false;

    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--full-trace", full_trace, "Also write per-step traces of every run");

    std::size_t fig1_horizon = 5000;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    bool dump = false;
    auto* fig1 = app.add_subcommand("fig1", "Known parameter set: UCB on elite arms vs UCB-KT (21 types, 21 arms)");
    fig1->add_option("--horizon", fig1_horizon, "Horizon T")->check(CLI::PositiveNumber);

    std::optional<std::size_t> recluster_every;
    std::optional<std::size_t> m_th;
    auto* fig2 = app.add_subcommand("fig2", "Clustered bandits: 2000 users, 2 types, 4 arms, sessions of 100 slots");
    fig2->add_option("--recluster-every", recluster_every, "Continuous clustering stride (default 1)");
    fig2->add_option("--m-th", m_th, "Users required before continuous clustering starts (default N)");

    for (auto* sub : {fig1, fig2}) {
        sub->add_option("--runs", runs, "Replications");
        sub->add_option("--seed", seed, "Root seed");
        sub->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_flag("--full-trace", full_trace, "Also write per-step traces of every run");
        sub->add_flag("--dump-config", dump, "Print the preset as a JSON config and exit");
    }

    BoundsRequest req;
    std::optional<std::string> bounds_out;
    auto* bounds = app.add_subcommand("bounds", "Evaluate regret bounds and print them as JSON");
    bounds->add_option("--config", config_path, "Config with a parameter_set")->required();
    bounds->add_option("--kind", req.kind, "Bound to evaluate")
        ->required()
        ->check(CLI::IsMember({"lemma1", "thm1", "thm2", "thm3", "eq1"}));
    bounds->add_option("--type", req.type, "True type x (default: every type)");
    bounds->add_option("--horizon", req.horizon, "Horizon T");
    bounds->add_option("--delta", req.delta, "Confusion-set tolerance delta");
    bounds->add_option("--epsilon", req.epsilon, "epsilon for lemma1 (default: the separation radius)");
    bounds->add_option("--m0", req.m0, "Pilot users (thm3)");
    bounds->add_option("--tau", req.tau, "Session length (thm3)");
    bounds->add_option("--g", req.g, "Clustering error probability (thm3); estimated by Monte Carlo if absent");
    bounds->add_option("--g-reps", req.g_reps, "Replications for the Monte Carlo estimate of g");
    bounds->add_option("--seed", req.seed, "Seed for the Monte Carlo estimate of g");
    bounds->add_option("--out", bounds_out, "Directory to write bounds.json into");

    TypeId lb_type = 0;
    auto* lower = app.add_subcommand("lower-bound", "Asymptotic lower-bound constant for a true type");
    lower->add_option("--config", config_path, "Config with a parameter_set")->required();
    lower->add_option("--type", lb_type, "True type x")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const ExperimentConfig cfg = parse_config(read_file(config_path), config_path);
            return execute(cfg, parallelism, out_dir, full_trace, "Cumulative regret");
        }
        if (*fig1 || *fig2) {
            ExperimentConfig cfg = *fig1 ? preset_fig1(fig1_horizon) : preset_fig2();
            if (runs) cfg.runs = *runs;
            if (seed) cfg.seed = *seed;
            if (*fig2) {
                for (auto& a : cfg.algorithms) {
                    if (a.name != names::kmeans_ucb_continuous) continue;
                    if (recluster_every) a.params.recluster_every = *recluster_every;
                    if (m_th) a.params.m_th = *m_th;
                }
            }
            if (cfg.runs == 0) throw std::invalid_argument("--runs must be >= 1");
            if (dump) {
                std::cout << to_json(cfg).dump(2) << '\n';
                return 0;
            }
            return execute(cfg, parallelism, out_dir, full_trace,
                           *fig1 ? "Known parameter set (21 types, 21 arms)" : "Clustered bandits (2 types, 4 arms)");
        }
        if (*bounds) {
            const auto reports = evaluate_bounds(read_file(config_path), req, config_path);
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& r : reports) arr.push_back(to_json(r));
            const std::string text = arr.dump(2) + "\n";
            std::cout << text;
            if (bounds_out) {
                fs::create_directories(*bounds_out);
                write_text(fs::path(*bounds_out) / "bounds.json", text);
            }
            return 0;
        }
        if (*lower) {
            BoundsRequest lb;
            lb.kind = "eq1";
            lb.type = lb_type;
            const auto reports = evaluate_bounds(read_file(config_path), lb, config_path);
            std::cout << to_json(reports.front()).dump(2) << '\n';
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
