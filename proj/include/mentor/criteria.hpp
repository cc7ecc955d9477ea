#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mentor {

/// Pre-action sensor readings, action, post-action sensor readings, each
/// component normalized to [0, 1]. Length is 2 * n_sensors + n_actions.
using ExperiencePoint = Eigen::VectorXd;

/// Outcome of one scenario rollout.
struct ScenarioResult {
    bool success = false;
    double t_total = 0.0;      // straight-line time at rated velocity, s
    double t_remaining = 0.0;  // budget left when the run ended, s
    double final_distance = 0.0;      // distance to goal at the end, m
    double final_displacement = 0.0;  // distance from start at the end, m (reported only)
    std::vector<ExperiencePoint> experience;
};

struct CriteriaConfig {
    // Relative importance of performance vs experience. Carried for
    // reporting; neither objective uses it.
    double alpha = 0.2;
    std::size_t max_experience_points = 500;

    void check() const;
};

/// Per-scenario performance:
///   success: 1 + T_rem / T_tot   (time ratio saturates at 1)
///   failure: 1 / (1 + S_f)
/// Lies in (0, 2]. Throws InvalidScenario when t_total <= 0.
double performance_scenario(const ScenarioResult& r);

/// Sum of per-scenario performance. Throws ConfigError on an empty list.
double performance_total(std::span<const ScenarioResult> results);

/// Concatenates all scenarios' points, drops exact duplicates (first
/// occurrence wins) and, above `cap`, keeps the points at indices
/// floor(i * n / cap) for i in [0, cap).
std::vector<ExperiencePoint> experience_union(std::span<const std::vector<ExperiencePoint>> per_scenario,
                                              std::size_t cap);

/// Total Euclidean edge weight of the minimum spanning tree over the
/// complete graph on `points` (Kruskal with union-find). 0 for < 2 points.
double mst_total_weight(std::span<const ExperiencePoint> points);

/// Experience gain: MST weight over the capped, deduplicated union.
double experience_gain(std::span<const std::vector<ExperiencePoint>> per_scenario, const CriteriaConfig& cfg);

/// One row per point, header `v0,v1,...`.
void write_experience_csv(std::ostream& out, std::span<const ExperiencePoint> points);

}  // namespace mentor
