#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mentor/criteria.hpp"
#include "mentor/genome.hpp"
#include "mentor/rng.hpp"

namespace mentor {

enum class RobotKind { UGV, Swarm };

std::string_view robot_name(RobotKind kind);
/// Accepts "ugv" / "swarm" in any case; throws ConfigError otherwise.
RobotKind parse_robot(std::string_view name);

struct SensorMount {
    Eigen::Vector2d offset;     // body frame, m
    Eigen::Vector2d direction;  // body frame, unit
};

/// Geometry, sensing and actuation limits of a robot, plus the arena and
/// obstacle settings used to train and test it.
struct RobotSpec {
    RobotKind kind = RobotKind::UGV;
    std::vector<SensorMount> sensors;
    Eigen::Vector2d half_extents = Eigen::Vector2d::Zero();  // +x is forward
    double sensor_max_range = 0.0;
    double rotate_lo = 0.0;
    double rotate_hi = 0.0;
    double translate_lo = 0.0;
    double translate_hi = 0.0;
    double rated_velocity = 0.0;

    double arena_side = 0.0;
    int obstacles_per_grid = 5;
    double obstacle_size_lo = 0.0;
    double obstacle_size_hi = 0.0;
    double train_tolerance = 0.0;

    double unseen_arena_side = 0.0;
    double unseen_size_lo = 0.0;
    double unseen_size_hi = 0.0;
    double unseen_tolerance = 0.0;
    double unseen_budget = 50.0;

    int n_sensors() const { return static_cast<int>(sensors.size()); }
    // Sensor readings, signal strength and two signal gradients.
    int n_inputs() const { return n_sensors() + 3; }
    int n_actions() const { return 2; }
    int experience_dim() const { return 2 * n_sensors() + n_actions(); }

    static RobotSpec ugv();
    static RobotSpec swarm();
    static RobotSpec of(RobotKind kind);
};

/// Axis-aligned rectangle.
struct Rect {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    Eigen::Vector2d half = Eigen::Vector2d::Zero();

    bool overlaps(const Rect& other) const;
    bool inside_square(double side) const;
};

/// Square arena [0, side]^2 with static rectangular obstacles.
struct Environment {
    double side = 0.0;
    std::vector<Rect> obstacles;
};

struct Pose {
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    double heading = 0.0;  // radians, in [-pi, pi]
};

struct Scenario {
    Environment env;
    Pose start;
    Eigen::Vector2d goal = Eigen::Vector2d::Zero();
    double time_budget = 0.0;
    double goal_tolerance = 0.0;

    double straight_line_distance() const { return (goal - start.position).norm(); }
};

struct RobotState {
    Pose pose;
    double elapsed = 0.0;
    // Goal signal at t, t-1, t-2.
    std::array<double, 3> signal{0.0, 0.0, 0.0};
    int steps = 0;
};

/// Splits the arena into 2x2 grids and Latin-hypercube samples
/// (center x, center y, width, height) for `n_per_grid` obstacles per grid.
/// A candidate that overlaps an accepted obstacle or leaves the arena is
/// redrawn inside its own hypercube cell up to 50 times, then skipped.
Environment generate_environment(double side, int n_per_grid, double size_lo, double size_hi, Rng& rng);

/// True when the robot body at `pose` overlaps an obstacle or leaves the arena.
bool body_collides(const RobotSpec& spec, const Environment& env, const Pose& pose);

/// Range reading of every sensor, clipped to the sensor's maximum range.
/// Arena walls are sensed like obstacles.
Eigen::VectorXd sense(const RobotSpec& spec, const Environment& env, const Pose& pose);

/// Goal signal, the inverse goal distance scaled by the goal tolerance; in (0, 1].
double goal_signal(double distance, double tolerance);

RobotState initial_state(const Scenario& scenario);

/// [readings / max_range, signal, signal(t) - signal(t-1), signal(t-1) - signal(t-2)],
/// with a gradient reading 0 until its history exists.
Eigen::VectorXd network_inputs(const RobotSpec& spec, const RobotState& state,
                               const Eigen::Ref<const Eigen::VectorXd>& readings);

struct ActionOutcome {
    RobotState state;
    bool collided = false;
    double rotation = 0.0;     // commanded, radians
    double translation = 0.0;  // commanded, m
    double travelled = 0.0;    // actual, m
};

// Number of collision checks along each translation.
inline constexpr int kSweepSubsteps = 10;

/// Rotates in place by raw[0] * pi, then translates forward by raw[1]
/// mapped affinely from [-1, 1] onto the translate bounds. The motion is
/// swept in sub-steps; on contact the robot stays at the last free sub-step.
ActionOutcome apply_action(const RobotSpec& spec, const Scenario& scenario, const RobotState& state,
                           const Eigen::Ref<const Eigen::VectorXd>& raw);

struct TrajectoryStep {
    int step = 0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double action_rot = 0.0;
    double action_trans = 0.0;
    bool collided = false;
};

struct Rollout {
    ScenarioResult result;
    std::vector<TrajectoryStep> trajectory;  // row 0 is the start pose
    double elapsed = 0.0;
};

inline constexpr int kMaxSteps = 1000;

/// Runs the sense-act loop until the goal is reached, the budget runs out,
/// the robot collides, or kMaxSteps actions have been taken.
/// Throws ConfigError when the genome's input/output counts do not match the robot.
Rollout simulate_scenario(const Genome& genome, const RobotSpec& spec, const Scenario& scenario);

// Scenario text format:
//   arena <side> / obstacle <cx> <cy> <hx> <hy> / start <x> <y> <heading>
//   goal <x> <y> / budget <seconds> / tolerance <m>
void write_scenario(std::ostream& out, const Scenario& s);
Scenario read_scenario(std::istream& in);

// CSV: step,x,y,heading,action_rot,action_trans,collided
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryStep>& trajectory);

}  // namespace mentor
