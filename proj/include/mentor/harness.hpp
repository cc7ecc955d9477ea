#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mentor/criteria.hpp"
#include "mentor/evolution.hpp"
#include "mentor/simworld.hpp"

namespace mentor {

enum class Framework { Single, Dual };

std::string_view framework_name(Framework f);
Framework parse_framework(std::string_view name);

/// Everything needed to reproduce one training run.
struct ExperimentConfig {
    RobotKind robot = RobotKind::UGV;
    Framework framework = Framework::Single;
    std::uint64_t seed = 1;
    int n_training_scenarios = 80;
    int obstacles_per_grid = 5;
    EvoParams evo;
    CriteriaConfig criteria;
    SpeciationParams speciation;
    std::string output_dir = "runs/default";

    /// Defaults for a robot: 80 UGV / 20 Swarm scenarios, robot mutation rates.
    static ExperimentConfig defaults(RobotKind robot);
    void check() const;
};

/// Flat `key = value` lines; `#` starts a comment. `robot` is applied first
/// so that robot defaults can be overridden by any other key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const ExperimentConfig& cfg);

/// `n` start/goal pairs inside `env`: both poses collision-free, distance in
/// [0.3, 0.9] * side, start heading facing the goal. `budget_factor` > 0
/// sets the budget to that multiple of the straight-line time; otherwise
/// `fixed_budget` is used. Throws Error after 1000 failed placements.
std::vector<Scenario> place_scenarios(const RobotSpec& spec, const Environment& env, int n, double tolerance,
                                      double budget_factor, double fixed_budget, Rng& rng);

// Training budget in multiples of the straight-line time.
inline constexpr double kTrainingBudgetFactor = 3.0;
inline constexpr int kPlacementTries = 1000;

/// One training environment from the config's seed and n_training_scenarios
/// pairs inside it.
std::vector<Scenario> build_scenario_set(const ExperimentConfig& cfg);

struct ExperimentResult {
    RunRecord record;
    std::vector<Scenario> scenarios;
    std::uint64_t simulations = 0;  // scenario rollouts
    double wall_clock_seconds = 0.0;
    std::filesystem::path output_dir;
};

/// Performance (sum over scenarios) and experience gain of one genome.
Objectives evaluate_genome(const Genome& genome, const RobotSpec& spec, std::span<const Scenario> scenarios,
                           const CriteriaConfig& criteria);

/// Runs the configured framework. When `write_outputs` is set, writes
/// config.txt, scenarios/, metrics.csv, niches.csv, pareto.csv,
/// complexity.csv, champion.genome, elites/, population/ and run.json into
/// the output directory (MENTOR_OUTPUT_ROOT prefixes a relative path).
ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_outputs = true);

std::filesystem::path resolve_output_dir(const std::string& output_dir);

struct UnseenTrial {
    int trial = 0;
    bool success = false;
    double time = 0.0;            // simulated seconds used
    double final_distance = 0.0;  // m
    bool collided = false;
};

struct UnseenReport {
    std::vector<UnseenTrial> trials;
    int successes = 0;
    Environment env;
    std::vector<Scenario> scenarios;
};

/// Fresh-layout test: a new environment from a seed family disjoint from
/// training, the robot's test arena and obstacle sizes, a 50 s budget and
/// the robot's test tolerance.
UnseenReport evaluate_unseen(const Genome& champion, const RobotSpec& spec, int n_trials, std::uint64_t seed);

void write_unseen_csv(std::ostream& out, const UnseenReport& report);

// Seed-stream tags.
inline constexpr std::uint64_t kTrainingEnvStream = 0x7472'6169'6eULL;
inline constexpr std::uint64_t kUnseenEnvStream = 0x756e'7365'656eULL;
inline constexpr std::uint64_t kEvolutionStream = 0x6576'6f6cULL;

// ---- CSV reading -------------------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

/// Comma-separated text; lines starting with '#' are skipped. Throws
/// ParseError when a row's field count differs from the header's.
CsvTable read_csv(std::istream& in);
CsvTable load_csv(const std::filesystem::path& path);

/// Non-dominated (F, G) rows of a run's complexity.csv, as pareto rows.
std::vector<ParetoPoint> final_front(const std::filesystem::path& run_dir);

}  // namespace mentor
