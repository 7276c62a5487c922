// Command line front end. Subcommands cover the full loop: simulate a click
// log, evaluate a target ranking against it, sweep the misspecification grid,
// check a configuration against the exhaustive oracle, and plot result
// tables.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 bad configuration or usage,
// 3 malformed data, 4 logging policy support violation.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "interpol/interpol.hpp"

namespace {

using namespace interpol;

io::RunConfig base_config(const std::string& config_path) {
    if (config_path.empty()) return io::RunConfig{};
    return io::load_config(config_path);
}

int run_simulate(const io::RunConfig& cfg) {
    if (cfg.output.empty()) throw ConfigError("simulate needs --output");
    const Scenario scenario = io::scenario_from_config(cfg);
    const auto records = generate_dataset(scenario, cfg.n_queries, cfg.seed);
    io::write_log(records, cfg.output);
    std::cerr << "wrote " << records.size() << " records to " << cfg.output << "\n";
    return 0;
}

int run_evaluate(const io::RunConfig& cfg, const std::string& policy_path,
                 bool include_per_query) {
    if (cfg.input.empty()) throw ConfigError("evaluate needs --input");
    const auto records = io::read_log(cfg.input);
    if (records.empty()) throw DataError(cfg.input + ": log contains no records");
    const std::size_t k = records.front().logged_ranking.size();

    TargetPolicy policy;
    if (!policy_path.empty()) {
        policy = io::read_policy(policy_path);
    } else if (cfg.target) {
        policy.fixed = Ranking(*cfg.target);
    } else if (k == 10) {
        policy.fixed = toy_scenario().target;
    } else {
        throw ConfigError("no target ranking: pass --policy or set 'target' in the config");
    }

    EstimatorConfig estimator;
    estimator.family = cfg.family;
    estimator.window = cfg.window;
    estimator.curve = io::estimator_curve_from_config(cfg, k);

    const EstimateReport report = estimate(records, policy, estimator);
    const std::string text = io::report_to_json(report, include_per_query).dump(2);
    if (cfg.output.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(cfg.output);
        if (!out) throw DataError("cannot open '" + cfg.output + "' for writing");
        out << text << "\n";
        std::cerr << "wrote report to " << cfg.output << "\n";
    }
    return 0;
}

int run_grid(const io::RunConfig& cfg) {
    if (cfg.output.empty()) throw ConfigError("grid needs --output");
    const Scenario scenario = io::scenario_from_config(cfg);
    ExperimentGrid grid;
    grid.exponents = cfg.exponents;
    grid.stay_probs = cfg.stay_probs;
    grid.windows = cfg.windows;
    grid.n_queries = cfg.n_queries;
    grid.replications = cfg.replications;
    grid.base_seed = cfg.seed;
    const auto results = run_grid(scenario, grid, cfg.threads);
    io::write_results(results, cfg.output);
    std::cerr << "wrote " << results.size() << " grid cells to " << cfg.output << "\n";
    return 0;
}

int run_oracle(const io::RunConfig& cfg) {
    const Scenario scenario = io::scenario_from_config(cfg);
    const PositionBiasCurve curve = io::estimator_curve_from_config(cfg, scenario.size());
    const double oracle = exhaustive_oracle(scenario, cfg.window, curve);
    const double truth = true_value(scenario.target, scenario.user);
    nlohmann::json doc;
    doc["oracle"] = oracle;
    doc["true_value"] = truth;
    doc["window"] = cfg.window;
    doc["exponent"] = cfg.exponent;
    doc["stay_prob"] = cfg.stay_prob;
    doc["sampler"] = to_string(cfg.sampler);
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int run_plot(const io::RunConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("plot needs --input");
    if (cfg.output.empty()) throw ConfigError("plot needs --output");
    const auto cells = io::read_results(cfg.input);
    const plot::Axis axis = plot::axis_from_string(cfg.x_axis);
    std::vector<plot::Metric> metrics;
    for (const std::string& name : cfg.y_axes) metrics.push_back(plot::metric_from_string(name));
    plot::emit_plot(cells, axis, metrics, cfg.output);
    std::cerr << "wrote plot to " << cfg.output << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"counterfactual evaluation of ranking policies from click logs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string policy_path;
    std::string sampler_name;
    std::string family_name;
    bool include_per_query = false;
    std::uint64_t seed = 0;
    std::size_t k = 0, n = 0, window = 0, replications = 0;
    double stay_prob = 0.0, exponent = 0.0;
    unsigned threads = 0;
    std::string input, output, x_axis;
    std::vector<std::string> y_axes;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override it");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic click log");
    add_common(simulate);
    simulate->add_option("--seed", seed, "RNG seed")->required();
    simulate->add_option("--output", output, "log file to write (JSONL)")->required();
    simulate->add_option("--k", k, "ranking length");
    simulate->add_option("--n", n, "number of logged queries");
    simulate->add_option("--stay-prob", stay_prob, "probability the base ranking is shown");
    simulate->add_option("--sampler", sampler_name,
                         "identity-or-uniform or cyclic-shift");

    CLI::App* evaluate = app.add_subcommand("evaluate", "estimate a target ranking's value");
    add_common(evaluate);
    evaluate->add_option("--input", input, "click log to read (JSONL)")->required();
    evaluate->add_option("--policy", policy_path, "target ranking file (JSON)");
    evaluate->add_option("--family", family_name, "pbm, ipm or interpol");
    evaluate->add_option("--window", window, "rank window for the interpolating weights");
    evaluate->add_option("--exponent", exponent, "power applied to the estimator curve");
    evaluate->add_option("--output", output, "report file; stdout when omitted");
    evaluate->add_flag("--per-query", include_per_query, "include per-query sums");

    CLI::App* grid = app.add_subcommand("grid", "sweep curve misspecification x randomization");
    add_common(grid);
    grid->add_option("--seed", seed, "base RNG seed")->required();
    grid->add_option("--output", output, "result table to write (CSV)")->required();
    grid->add_option("--n", n, "queries per replication");
    grid->add_option("--replications", replications, "replications per cell");
    grid->add_option("--threads", threads, "worker threads; 0 uses all cores");

    CLI::App* oracle = app.add_subcommand(
        "oracle", "exact estimator expectation by enumerating logging outcomes");
    add_common(oracle);
    oracle->add_option("--window", window, "rank window for the interpolating weights");
    oracle->add_option("--exponent", exponent, "power applied to the estimator curve");
    oracle->add_option("--stay-prob", stay_prob, "probability the base ranking is shown");
    oracle->add_option("--sampler", sampler_name, "identity-or-uniform or cyclic-shift");

    CLI::App* plot = app.add_subcommand("plot", "render a result table as an SVG chart");
    add_common(plot);
    plot->add_option("--input", input, "result table to read (CSV)")->required();
    plot->add_option("--output", output, "SVG file to write")->required();
    plot->add_option("--x-axis", x_axis, "window, stay_prob or exponent");
    plot->add_option("--y", y_axes, "metrics to draw: mse, bias, variance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const auto passed = [&](const std::string& flag) {
            const CLI::Option* option = sub->get_option_no_throw(flag);
            return option != nullptr && option->count() > 0;
        };
        io::RunConfig cfg = base_config(config_path);
        cfg.mode = sub->get_name();
        if (sub == oracle && config_path.empty()) {
            // Enumeration needs a small world; default to the three item one.
            const Scenario mini = mini_scenario();
            cfg.k = mini.size();
            cfg.logging_base = mini.logging_base.items();
            cfg.target = mini.target.items();
            cfg.relevance = mini.user.relevance;
            cfg.true_curve = mini.user.true_curve.probs();
            cfg.stay_prob = mini.stay_prob;
            cfg.sampler = mini.sampler;
        }
        if (passed("--seed")) cfg.seed = seed;
        if (passed("--k")) cfg.k = k;
        if (passed("--n")) cfg.n_queries = n;
        if (passed("--stay-prob")) cfg.stay_prob = stay_prob;
        if (passed("--sampler")) cfg.sampler = sampler_from_string(sampler_name);
        if (passed("--family")) cfg.family = family_from_string(family_name);
        if (passed("--window")) cfg.window = window;
        if (passed("--exponent")) cfg.exponent = exponent;
        if (passed("--replications")) cfg.replications = replications;
        if (passed("--threads")) cfg.threads = threads;
        if (passed("--input")) cfg.input = input;
        if (passed("--output")) cfg.output = output;
        if (passed("--x-axis")) cfg.x_axis = x_axis;
        if (passed("--y")) cfg.y_axes = y_axes;
        io::validate_config(cfg);

        if (sub == simulate) return run_simulate(cfg);
        if (sub == evaluate) return run_evaluate(cfg, policy_path, include_per_query);
        if (sub == grid) return run_grid(cfg);
        if (sub == oracle) return run_oracle(cfg);
        if (sub == plot) return run_plot(cfg);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const SupportViolation& e) {
        std::cerr << "support violation: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
