#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mentor/error.hpp"
#include "mentor/harness.hpp"

namespace mentor::cli {

namespace {

std::string format_real(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    std::string text = s.str();
    if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
    return text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-objective neuro-evolution of network topologies for robot navigation", "mentor"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    auto* train = app.add_subcommand("train", "Run an experiment from a config file");
    train->add_option("--config", config_path, "Experiment config (key = value)")->required();
    train->add_option("--seed", seed, "Override the config seed");
    train->add_option("--threads", threads, "Evaluation worker threads");

    std::string genome_path;
    std::string robot = "ugv";
    int trials = 10;
    std::uint64_t eval_seed = 1;
    std::string report_path;
    auto* evaluate = app.add_subcommand("evaluate", "Test a genome on a fresh unseen layout");
    evaluate->add_option("--genome", genome_path, "Genome file")->required();
    evaluate->add_option("--robot", robot, "ugv or swarm");
    evaluate->add_option("--trials", trials, "Number of start/goal pairs");
    evaluate->add_option("--seed", eval_seed, "Seed of the unseen layout");
    evaluate->add_option("--out", report_path, "Also write the per-trial CSV here");

    std::string run_dir;
    auto* pareto = app.add_subcommand("pareto", "Print the non-dominated front of a run's final population");
    pareto->add_option("--run", run_dir, "Run output directory")->required();

    auto* cx = app.add_subcommand("complexity", "Print a genome's FLOPs relative to the minimal network");
    cx->add_option("--genome", genome_path, "Genome file")->required();

    std::string scenario_dir;
    auto* gen = app.add_subcommand("gen-scenarios", "Write the training scenario set of a config");
    gen->add_option("--config", config_path, "Experiment config")->required();
    gen->add_option("--seed", seed, "Override the config seed");
    gen->add_option("--out", scenario_dir, "Output directory (default: <output_dir>/scenarios)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*train) {
            ExperimentConfig cfg = load_config(config_path);
            if (seed) cfg.seed = *seed;
            if (threads > 0) cfg.evo.threads = threads;
            const auto result = run_experiment(cfg);
            const auto& champ = result.record.champion();
            out << "run written to " << result.output_dir.string() << '\n'
                << "champion " << champ.id << " F=" << format_real(champ.objectives->performance)
                << " G=" << format_real(champ.objectives->experience) << " complexity=" << format_real(complexity(champ))
                << '\n';
            for (const auto& d : result.record.diagnostics) err << d << '\n';
        } else if (*evaluate) {
            const Genome g = load_genome(genome_path);
            const RobotSpec spec = RobotSpec::of(parse_robot(robot));
            const auto report = evaluate_unseen(g, spec, trials, eval_seed);
            write_unseen_csv(out, report);
            out << "# successes=" << report.successes << '/' << report.trials.size() << '\n';
            if (!report_path.empty()) {
                std::ofstream f(report_path);
                if (!f) throw Error("cannot open '" + report_path + "' for writing");
                write_unseen_csv(f, report);
            }
        } else if (*pareto) {
            if (!std::filesystem::is_directory(run_dir)) throw Error("run directory not found: '" + run_dir + "'");
            const auto front = final_front(run_dir);
            write_pareto_csv(out, front);
        } else if (*cx) {
            out << format_real(complexity(load_genome(genome_path))) << '\n';
        } else if (*gen) {
            ExperimentConfig cfg = load_config(config_path);
            if (seed) cfg.seed = *seed;
            const auto scenarios = build_scenario_set(cfg);
            const std::filesystem::path dir =
                scenario_dir.empty() ? resolve_output_dir(cfg.output_dir) / "scenarios" : std::filesystem::path(scenario_dir);
            std::filesystem::create_directories(dir);
            for (std::size_t i = 0; i < scenarios.size(); ++i) {
                std::ostringstream name;
                name << "scenario_" << std::setw(3) << std::setfill('0') << i << ".txt";
                std::ofstream f(dir / name.str());
                if (!f) throw Error("cannot write into '" + dir.string() + "'");
                f << "# seed=" << cfg.seed << '\n';
                write_scenario(f, scenarios[i]);
            }
            out << scenarios.size() << " scenarios written to " << dir.string() << '\n';
        }
    } catch (const std::exception& e) {
        err << "mentor: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace mentor::cli
