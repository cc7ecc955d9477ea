#include "mentor/simworld.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mentor/error.hpp"

namespace mentor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kResampleTries = 50;

Eigen::Vector2d rotate(const Eigen::Vector2d& v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

// Entry distance of a ray into an axis-aligned box, or +inf on a miss.
double ray_box_entry(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir, const Rect& box) {
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 2; ++axis) {
        const double lo = box.center[axis] - box.half[axis];
        const double hi = box.center[axis] + box.half[axis];
        if (dir[axis] == 0.0) {
            if (origin[axis] < lo || origin[axis] > hi) return std::numeric_limits<double>::infinity();
            continue;
        }
        double t0 = (lo - origin[axis]) / dir[axis];
        double t1 = (hi - origin[axis]) / dir[axis];
        if (t0 > t1) std::swap(t0, t1);
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
    }
    if (t_far < std::max(t_near, 0.0)) return std::numeric_limits<double>::infinity();
    return std::max(t_near, 0.0);
}

// Exit distance of a ray starting inside [0, side]^2.
double ray_wall_exit(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir, double side) {
    double t = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 2; ++axis) {
        if (dir[axis] > 0.0) t = std::min(t, (side - origin[axis]) / dir[axis]);
        else if (dir[axis] < 0.0) t = std::min(t, (0.0 - origin[axis]) / dir[axis]);
    }
    return std::max(t, 0.0);
}

bool oriented_overlaps(const Eigen::Vector2d& center, double heading, const Eigen::Vector2d& half, const Rect& box) {
    const double c = std::abs(std::cos(heading));
    const double s = std::abs(std::sin(heading));
    const Eigen::Vector2d d = box.center - center;
    // Separating axes: world x/y, then the body's own axes.
    if (std::abs(d.x()) >= half.x() * c + half.y() * s + box.half.x()) return false;
    if (std::abs(d.y()) >= half.x() * s + half.y() * c + box.half.y()) return false;
    const Eigen::Vector2d u{std::cos(heading), std::sin(heading)};
    const Eigen::Vector2d v{-u.y(), u.x()};
    if (std::abs(d.dot(u)) >= half.x() + box.half.x() * c + box.half.y() * s) return false;
    if (std::abs(d.dot(v)) >= half.y() + box.half.x() * s + box.half.y() * c) return false;
    return true;
}

}  // namespace

std::string_view robot_name(RobotKind kind) { return kind == RobotKind::UGV ? "ugv" : "swarm"; }

RobotKind parse_robot(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "ugv") return RobotKind::UGV;
    if (lower == "swarm" || lower == "swarm-robot") return RobotKind::Swarm;
    throw ConfigError("unknown robot '" + std::string(name) + "' (expected ugv or swarm)");
}

RobotSpec RobotSpec::ugv() {
    RobotSpec r;
    r.kind = RobotKind::UGV;
    r.half_extents = {0.25, 0.25};
    // Two sensors per edge, 0.075 m apart, facing the edge normal.
    const double h = 0.25;
    const double p = 0.0375;
    r.sensors = {
        {{h, -p}, {1, 0}},  {{h, p}, {1, 0}},     // front
        {{p, h}, {0, 1}},   {{-p, h}, {0, 1}},    // left
        {{-h, p}, {-1, 0}}, {{-h, -p}, {-1, 0}},  // back
        {{-p, -h}, {0, -1}}, {{p, -h}, {0, -1}},  // right
    };
    r.sensor_max_range = 3.0;
    r.rotate_lo = -kPi;
    r.rotate_hi = kPi;
    r.translate_lo = 0.1;
    r.translate_hi = 2.0;
    r.rated_velocity = 1.0;
    r.arena_side = 12.0;
    r.obstacle_size_lo = 0.3;
    r.obstacle_size_hi = 1.5;
    r.train_tolerance = 0.5;
    r.unseen_arena_side = 12.0;
    r.unseen_size_lo = 0.4;
    r.unseen_size_hi = 1.2;
    r.unseen_tolerance = 1.0;
    return r;
}

RobotSpec RobotSpec::swarm() {
    RobotSpec r;
    r.kind = RobotKind::Swarm;
    r.half_extents = {0.04, 0.03};
    r.sensors = {
        {{0.04, -0.02}, {1, 0}},
        {{0.04, 0.0}, {1, 0}},
        {{0.04, 0.02}, {1, 0}},
    };
    r.sensor_max_range = 0.5;
    r.rotate_lo = -kPi;
    r.rotate_hi = kPi;
    r.translate_lo = 0.01;
    r.translate_hi = 0.08;
    r.rated_velocity = 0.1;
    r.arena_side = 5.0;
    r.obstacle_size_lo = 0.15;
    r.obstacle_size_hi = 0.6;
    r.train_tolerance = 0.1;
    r.unseen_arena_side = 4.0;
    r.unseen_size_lo = 0.1;
    r.unseen_size_hi = 0.4;
    // 1 m UGV test tolerance scaled by the training tolerance ratio.
    r.unseen_tolerance = 0.2;
    return r;
}

RobotSpec RobotSpec::of(RobotKind kind) { return kind == RobotKind::UGV ? ugv() : swarm(); }

bool Rect::overlaps(const Rect& other) const {
    return std::abs(center.x() - other.center.x()) < half.x() + other.half.x() &&
           std::abs(center.y() - other.center.y()) < half.y() + other.half.y();
}

bool Rect::inside_square(double side) const {
    return center.x() - half.x() >= 0.0 && center.x() + half.x() <= side && center.y() - half.y() >= 0.0 &&
           center.y() + half.y() <= side;
}

Environment generate_environment(double side, int n_per_grid, double size_lo, double size_hi, Rng& rng) {
    if (n_per_grid < 0) throw ConfigError("generate_environment: negative obstacle count");
    if (!(size_lo > 0.0 && size_hi >= size_lo)) throw ConfigError("generate_environment: bad obstacle size range");
    Environment env;
    env.side = side;
    if (n_per_grid == 0) return env;

    const double cell = side / 2.0;
    const double n = n_per_grid;
    for (int gy = 0; gy < 2; ++gy) {
        for (int gx = 0; gx < 2; ++gx) {
            // One stratum permutation per sampled dimension.
            std::array<std::vector<int>, 4> strata;
            for (auto& perm : strata) {
                perm.resize(n_per_grid);
                std::iota(perm.begin(), perm.end(), 0);
                rng.shuffle(perm.begin(), perm.end());
            }
            for (int k = 0; k < n_per_grid; ++k) {
                auto in_stratum = [&](int dim, double lo, double hi) {
                    const double w = (hi - lo) / n;
                    return lo + (strata[dim][k] + rng.uniform()) * w;
                };
                for (int attempt = 0; attempt < kResampleTries; ++attempt) {
                    Rect r;
                    r.center.x() = in_stratum(0, gx * cell, (gx + 1) * cell);
                    r.center.y() = in_stratum(1, gy * cell, (gy + 1) * cell);
                    r.half.x() = in_stratum(2, size_lo, size_hi) / 2.0;
                    r.half.y() = in_stratum(3, size_lo, size_hi) / 2.0;
                    if (!r.inside_square(side)) continue;
                    const bool clash = std::any_of(env.obstacles.begin(), env.obstacles.end(),
                                                   [&](const Rect& o) { return o.overlaps(r); });
                    if (clash) continue;
                    env.obstacles.push_back(r);
                    break;
                }
            }
        }
    }
    return env;
}

bool body_collides(const RobotSpec& spec, const Environment& env, const Pose& pose) {
    const double c = std::abs(std::cos(pose.heading));
    const double s = std::abs(std::sin(pose.heading));
    const double rx = spec.half_extents.x() * c + spec.half_extents.y() * s;
    const double ry = spec.half_extents.x() * s + spec.half_extents.y() * c;
    const auto& p = pose.position;
    if (p.x() - rx < 0.0 || p.x() + rx > env.side || p.y() - ry < 0.0 || p.y() + ry > env.side) return true;
    return std::any_of(env.obstacles.begin(), env.obstacles.end(), [&](const Rect& o) {
        return oriented_overlaps(p, pose.heading, spec.half_extents, o);
    });
}

Eigen::VectorXd sense(const RobotSpec& spec, const Environment& env, const Pose& pose) {
    Eigen::VectorXd readings(spec.n_sensors());
    for (int i = 0; i < spec.n_sensors(); ++i) {
        const auto& mount = spec.sensors[i];
        const Eigen::Vector2d origin = pose.position + rotate(mount.offset, pose.heading);
        const Eigen::Vector2d dir = rotate(mount.direction, pose.heading);
        double t = ray_wall_exit(origin, dir, env.side);
        for (const auto& o : env.obstacles) t = std::min(t, ray_box_entry(origin, dir, o));
        readings[i] = std::clamp(t, 0.0, spec.sensor_max_range);
    }
    return readings;
}

double goal_signal(double distance, double tolerance) { return tolerance / std::max(distance, tolerance); }

RobotState initial_state(const Scenario& scenario) {
    RobotState st;
    st.pose = scenario.start;
    const double s = goal_signal(scenario.straight_line_distance(), scenario.goal_tolerance);
    st.signal = {s, s, s};
    return st;
}

Eigen::VectorXd network_inputs(const RobotSpec& spec, const RobotState& state,
                               const Eigen::Ref<const Eigen::VectorXd>& readings) {
    if (readings.size() != spec.n_sensors()) throw ShapeError("network_inputs: reading count does not match sensors");
    Eigen::VectorXd in(spec.n_inputs());
    in.head(spec.n_sensors()) = readings / spec.sensor_max_range;
    const auto n = spec.n_sensors();
    in[n] = state.signal[0];
    in[n + 1] = state.steps >= 1 ? state.signal[0] - state.signal[1] : 0.0;
    in[n + 2] = state.steps >= 2 ? state.signal[1] - state.signal[2] : 0.0;
    return in;
}

ActionOutcome apply_action(const RobotSpec& spec, const Scenario& scenario, const RobotState& state,
                           const Eigen::Ref<const Eigen::VectorXd>& raw) {
    if (raw.size() != spec.n_actions()) throw ShapeError("apply_action: expected 2 raw outputs");
    ActionOutcome out;
    out.rotation = std::clamp(raw[0], -1.0, 1.0) * kPi;
    const double u = (std::clamp(raw[1], -1.0, 1.0) + 1.0) / 2.0;
    out.translation = spec.translate_lo + u * (spec.translate_hi - spec.translate_lo);

    RobotState next = state;
    Pose turned{state.pose.position, wrap_angle(state.pose.heading + out.rotation)};
    const Eigen::Vector2d dir{std::cos(turned.heading), std::sin(turned.heading)};

    if (body_collides(spec, scenario.env, turned)) {
        // Turning in place would hit something: the robot does not move.
        out.collided = true;
    } else {
        next.pose = turned;
        for (int k = 1; k <= kSweepSubsteps; ++k) {
            const double dist = out.translation * k / kSweepSubsteps;
            Pose probe{state.pose.position + dist * dir, turned.heading};
            if (body_collides(spec, scenario.env, probe)) {
                out.collided = true;
                break;
            }
            next.pose = probe;
            out.travelled = dist;
        }
    }

    next.elapsed = state.elapsed + out.travelled / spec.rated_velocity;
    next.steps = state.steps + 1;
    const double d_goal = (scenario.goal - next.pose.position).norm();
    next.signal = {goal_signal(d_goal, scenario.goal_tolerance), state.signal[0], state.signal[1]};
    out.state = next;
    return out;
}

Rollout simulate_scenario(const Genome& genome, const RobotSpec& spec, const Scenario& scenario) {
    if (genome.n_inputs != spec.n_inputs() || genome.n_outputs != spec.n_actions()) {
        throw ConfigError("genome " + std::to_string(genome.id) + " has " + std::to_string(genome.n_inputs) +
                          " inputs / " + std::to_string(genome.n_outputs) + " outputs but robot '" +
                          std::string(robot_name(spec.kind)) + "' needs " + std::to_string(spec.n_inputs()) + " / " +
                          std::to_string(spec.n_actions()));
    }
    const double start_distance = scenario.straight_line_distance();
    if (!(start_distance > 0.0)) throw InvalidScenario("simulate_scenario: start and goal coincide");

    const Network net(genome);
    Rollout roll;
    auto& res = roll.result;
    res.t_total = start_distance / spec.rated_velocity;

    RobotState state = initial_state(scenario);
    roll.trajectory.push_back({0, state.pose.position.x(), state.pose.position.y(), state.pose.heading, 0.0, 0.0, false});

    const int n_s = spec.n_sensors();
    auto goal_distance = [&](const RobotState& st) { return (scenario.goal - st.pose.position).norm(); };

    bool done = goal_distance(state) <= scenario.goal_tolerance;
    res.success = done;
    Eigen::VectorXd readings = sense(spec, scenario.env, state.pose);
    while (!done && state.steps < kMaxSteps) {
        const Eigen::VectorXd raw = net(network_inputs(spec, state, readings));
        const ActionOutcome act = apply_action(spec, scenario, state, raw);
        const Eigen::VectorXd post = sense(spec, scenario.env, act.state.pose);

        ExperiencePoint xp(2 * n_s + spec.n_actions());
        xp.head(n_s) = readings / spec.sensor_max_range;
        xp[n_s] = (std::clamp(raw[0], -1.0, 1.0) + 1.0) / 2.0;
        xp[n_s + 1] = (std::clamp(raw[1], -1.0, 1.0) + 1.0) / 2.0;
        xp.tail(n_s) = post / spec.sensor_max_range;
        res.experience.push_back(std::move(xp));

        state = act.state;
        readings = post;
        roll.trajectory.push_back({state.steps, state.pose.position.x(), state.pose.position.y(), state.pose.heading,
                                   act.rotation, act.translation, act.collided});

        if (act.collided) break;
        if (goal_distance(state) <= scenario.goal_tolerance && state.elapsed <= scenario.time_budget) {
            res.success = true;
            break;
        }
        if (state.elapsed >= scenario.time_budget) break;
    }

    roll.elapsed = state.elapsed;
    res.t_remaining = std::max(scenario.time_budget - state.elapsed, 0.0);
    res.final_distance = goal_distance(state);
    res.final_displacement = (state.pose.position - scenario.start.position).norm();
    return roll;
}

}  // namespace mentor
