#include "mentor/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "mentor/error.hpp"

namespace mentor {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::string scenario_file_name(std::size_t i) {
    std::ostringstream name;
    name << "scenario_" << std::setw(3) << std::setfill('0') << i << ".txt";
    return name.str();
}

}  // namespace

std::vector<Scenario> place_scenarios(const RobotSpec& spec, const Environment& env, int n, double tolerance,
                                      double budget_factor, double fixed_budget, Rng& rng) {
    std::vector<Scenario> out;
    const double side = env.side;
    const double margin = spec.half_extents.norm();
    for (int s = 0; s < n; ++s) {
        bool placed = false;
        for (int attempt = 0; attempt < kPlacementTries && !placed; ++attempt) {
            const Eigen::Vector2d start{rng.uniform(margin, side - margin), rng.uniform(margin, side - margin)};
            const Eigen::Vector2d goal{rng.uniform(margin, side - margin), rng.uniform(margin, side - margin)};
            const double d = (goal - start).norm();
            if (d < 0.3 * side || d > 0.9 * side) continue;
            const double heading = std::atan2(goal.y() - start.y(), goal.x() - start.x());
            const Pose start_pose{start, heading};
            if (body_collides(spec, env, start_pose) || body_collides(spec, env, Pose{goal, heading})) continue;
            Scenario sc;
            sc.env = env;
            sc.start = start_pose;
            sc.goal = goal;
            sc.goal_tolerance = tolerance;
            sc.time_budget = budget_factor > 0.0 ? budget_factor * d / spec.rated_velocity : fixed_budget;
            out.push_back(std::move(sc));
            placed = true;
        }
        if (!placed) {
            throw Error("could not place a collision-free start/goal pair after " + std::to_string(kPlacementTries) +
                        " tries");
        }
    }
    return out;
}

std::vector<Scenario> build_scenario_set(const ExperimentConfig& cfg) {
    const RobotSpec spec = RobotSpec::of(cfg.robot);
    Rng rng(derive_seed(cfg.seed, kTrainingEnvStream));
    const Environment env =
        generate_environment(spec.arena_side, cfg.obstacles_per_grid, spec.obstacle_size_lo, spec.obstacle_size_hi, rng);
    return place_scenarios(spec, env, cfg.n_training_scenarios, spec.train_tolerance, kTrainingBudgetFactor, 0.0, rng);
}

Objectives evaluate_genome(const Genome& genome, const RobotSpec& spec, std::span<const Scenario> scenarios,
                           const CriteriaConfig& criteria) {
    std::vector<ScenarioResult> results;
    results.reserve(scenarios.size());
    for (const auto& sc : scenarios) results.push_back(simulate_scenario(genome, spec, sc).result);
    std::vector<std::vector<ExperiencePoint>> experience;
    experience.reserve(results.size());
    for (auto& r : results) experience.push_back(std::move(r.experience));
    return {performance_total(results), experience_gain(experience, criteria)};
}

fs::path resolve_output_dir(const std::string& output_dir) {
    fs::path p(output_dir);
    if (p.is_relative()) {
        if (const char* root = std::getenv("MENTOR_OUTPUT_ROOT"); root && *root) return fs::path(root) / p;
    }
    return p;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_outputs) {
    cfg.check();
    const auto t0 = std::chrono::steady_clock::now();
    const RobotSpec spec = RobotSpec::of(cfg.robot);

    ExperimentResult result;
    result.scenarios = build_scenario_set(cfg);
    std::atomic<std::uint64_t> simulations{0};
    const auto& scenarios = result.scenarios;
    const Evaluator evaluator = [&](const Genome& g, int) {
        simulations += scenarios.size();
        return evaluate_genome(g, spec, scenarios, cfg.criteria);
    };

    const std::uint64_t evo_seed = derive_seed(cfg.seed, kEvolutionStream);
    result.record = cfg.framework == Framework::Single
                        ? run_single_stage(cfg.evo, cfg.speciation, spec.n_inputs(), spec.n_actions(), evaluator, evo_seed)
                        : run_dual_stage(cfg.evo, cfg.speciation, spec.n_inputs(), spec.n_actions(), evaluator, evo_seed);
    result.simulations = simulations.load();
    result.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!write_outputs) return result;

    const fs::path dir = resolve_output_dir(cfg.output_dir);
    result.output_dir = dir;
    for (const char* sub : {"scenarios", "elites", "population"}) fs::remove_all(dir / sub);
    fs::create_directories(dir / "scenarios");
    fs::create_directories(dir / "elites");
    fs::create_directories(dir / "population");
    const std::string seed_line = "# seed=" + std::to_string(cfg.seed) + "\n";

    {
        auto out = open_out(dir / "config.txt");
        write_config(out, cfg);
    }
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        auto out = open_out(dir / "scenarios" / scenario_file_name(i));
        out << "# seed=" << cfg.seed << '\n';
        write_scenario(out, scenarios[i]);
    }
    {
        auto out = open_out(dir / "metrics.csv");
        out << seed_line;
        write_metrics_csv(out, result.record);
    }
    {
        auto out = open_out(dir / "niches.csv");
        out << seed_line;
        write_niche_csv(out, result.record);
    }
    {
        auto out = open_out(dir / "pareto.csv");
        out << seed_line;
        write_pareto_csv(out, result.record.pareto);
    }

    const Population& pop = result.record.final_population;
    {
        auto out = open_out(dir / "complexity.csv");
        out << seed_line << "generation,genome_id,niche_id,rank,F,G,complexity\n";
        out.precision(17);
        for (const auto& g : pop.genomes) {
            out << pop.generation << ',' << g.id << ',' << pop.niche_of(g.id) << ',' << g.rank.value_or(0) << ','
                << g.objectives->performance << ',' << g.objectives->experience << ',' << complexity(g) << '\n';
        }
    }
    save_genome((dir / "champion.genome").string(), result.record.champion());
    {
        std::vector<const Genome*> order;
        for (const auto& g : pop.genomes) order.push_back(&g);
        std::sort(order.begin(), order.end(), [](const Genome* a, const Genome* b) { return fitter(*a, *b); });
        for (int i = 0; i < cfg.evo.elite_count() && i < static_cast<int>(order.size()); ++i) {
            save_genome((dir / "elites" / ("elite_" + std::to_string(i) + ".genome")).string(), *order[i]);
        }
    }
    for (const auto& g : pop.genomes) {
        save_genome((dir / "population" / (std::to_string(g.id) + ".genome")).string(), g);
    }
    {
        nlohmann::json info;
        info["seed"] = cfg.seed;
        info["robot"] = robot_name(cfg.robot);
        info["framework"] = framework_name(cfg.framework);
        info["generations"] = cfg.evo.max_generations;
        info["stage1_generations"] = result.record.stage1_generations;
        info["evaluator_calls"] = result.record.evaluations;
        info["scenario_simulations"] = result.simulations;
        info["champion_id"] = result.record.champion().id;
        info["experience_normalization"] =
            "sensor readings divided by sensor max range; actions mapped from [-1,1] to [0,1]";
        info["diagnostics"] = result.record.diagnostics;
        info["wall_clock_seconds"] = result.wall_clock_seconds;
        auto out = open_out(dir / "run.json");
        out << info.dump(2) << '\n';
    }
    return result;
}

UnseenReport evaluate_unseen(const Genome& champion, const RobotSpec& spec, int n_trials, std::uint64_t seed) {
    if (champion.n_inputs != spec.n_inputs() || champion.n_outputs != spec.n_actions()) {
        throw ConfigError("genome " + std::to_string(champion.id) + " has " + std::to_string(champion.n_inputs) +
                          " inputs / " + std::to_string(champion.n_outputs) + " outputs; robot '" +
                          std::string(robot_name(spec.kind)) + "' needs " + std::to_string(spec.n_inputs()) + " / " +
                          std::to_string(spec.n_actions()));
    }
    if (n_trials < 0) throw ConfigError("evaluate_unseen: negative trial count");
    UnseenReport report;
    Rng rng(derive_seed(seed, kUnseenEnvStream));
    report.env = generate_environment(spec.unseen_arena_side, spec.obstacles_per_grid, spec.unseen_size_lo,
                                      spec.unseen_size_hi, rng);
    report.scenarios = place_scenarios(spec, report.env, n_trials, spec.unseen_tolerance, 0.0, spec.unseen_budget, rng);
    for (int i = 0; i < n_trials; ++i) {
        const Rollout roll = simulate_scenario(champion, spec, report.scenarios[i]);
        UnseenTrial t;
        t.trial = i;
        t.success = roll.result.success;
        t.time = roll.elapsed;
        t.final_distance = roll.result.final_distance;
        t.collided = !roll.trajectory.empty() && roll.trajectory.back().collided;
        report.successes += t.success ? 1 : 0;
        report.trials.push_back(t);
    }
    return report;
}

void write_unseen_csv(std::ostream& out, const UnseenReport& report) {
    out << "trial,success,time,final_distance,collided\n";
    const auto old_precision = out.precision(17);
    for (const auto& t : report.trials) {
        out << t.trial << ',' << (t.success ? 1 : 0) << ',' << t.time << ',' << t.final_distance << ','
            << (t.collided ? 1 : 0) << '\n';
    }
    out.precision(old_precision);
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ParseError("csv has no column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.emplace_back();
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ParseError("csv line " + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) throw ParseError("csv is empty");
    return table;
}

CsvTable load_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("file not found: '" + path.string() + "'");
    return read_csv(in);
}

std::vector<ParetoPoint> final_front(const fs::path& run_dir) {
    const CsvTable t = load_csv(run_dir / "complexity.csv");
    const auto c_gen = t.column("generation"), c_id = t.column("genome_id"), c_f = t.column("F"),
               c_g = t.column("G"), c_cx = t.column("complexity");
    std::vector<ParetoPoint> pts;
    std::vector<Objectives> obj;
    for (const auto& r : t.rows) {
        ParetoPoint p;
        p.generation = std::stoi(r[c_gen]);
        p.genome_id = std::stoull(r[c_id]);
        p.f = std::stod(r[c_f]);
        p.g = std::stod(r[c_g]);
        p.complexity = std::stod(r[c_cx]);
        pts.push_back(p);
        obj.push_back({p.f, p.g});
    }
    const auto ranks = nondominated_sort(obj);
    std::vector<ParetoPoint> front;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (ranks[i] == 1) front.push_back(pts[i]);
    return front;
}

}  // namespace mentor
