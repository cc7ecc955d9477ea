#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "mentor/error.hpp"
#include "mentor/simworld.hpp"

namespace mentor {

void write_scenario(std::ostream& out, const Scenario& s) {
    const auto old_precision = out.precision(17);
    out << "arena " << s.env.side << '\n';
    for (const auto& o : s.env.obstacles) {
        out << "obstacle " << o.center.x() << ' ' << o.center.y() << ' ' << o.half.x() << ' ' << o.half.y() << '\n';
    }
    out << "start " << s.start.position.x() << ' ' << s.start.position.y() << ' ' << s.start.heading << '\n';
    out << "goal " << s.goal.x() << ' ' << s.goal.y() << '\n';
    out << "budget " << s.time_budget << '\n';
    out << "tolerance " << s.goal_tolerance << '\n';
    out.precision(old_precision);
}

Scenario read_scenario(std::istream& in) {
    Scenario s;
    bool have_arena = false, have_start = false, have_goal = false, have_budget = false, have_tol = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream row(line);
        std::string key;
        if (!(row >> key) || key[0] == '#') continue;
        auto fail = [&](const std::string& what) {
            throw ParseError("scenario line " + std::to_string(line_no) + " ('" + key + "'): " + what);
        };
        bool ok = true;
        if (key == "arena") {
            ok = static_cast<bool>(row >> s.env.side);
            have_arena = true;
        } else if (key == "obstacle") {
            Rect r;
            ok = static_cast<bool>(row >> r.center.x() >> r.center.y() >> r.half.x() >> r.half.y());
            s.env.obstacles.push_back(r);
        } else if (key == "start") {
            ok = static_cast<bool>(row >> s.start.position.x() >> s.start.position.y() >> s.start.heading);
            have_start = true;
        } else if (key == "goal") {
            ok = static_cast<bool>(row >> s.goal.x() >> s.goal.y());
            have_goal = true;
        } else if (key == "budget") {
            ok = static_cast<bool>(row >> s.time_budget);
            have_budget = true;
        } else if (key == "tolerance") {
            ok = static_cast<bool>(row >> s.goal_tolerance);
            have_tol = true;
        } else {
            fail("unknown key");
        }
        if (!ok) fail("malformed numbers");
    }
    if (!(have_arena && have_start && have_goal && have_budget && have_tol)) {
        throw ParseError("scenario is missing one of arena/start/goal/budget/tolerance");
    }
    return s;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryStep>& trajectory) {
    out << "step,x,y,heading,action_rot,action_trans,collided\n";
    const auto old_precision = out.precision(17);
    for (const auto& t : trajectory) {
        out << t.step << ',' << t.x << ',' << t.y << ',' << t.heading << ',' << t.action_rot << ',' << t.action_trans
            << ',' << (t.collided ? 1 : 0) << '\n';
    }
    out.precision(old_precision);
}

}  // namespace mentor
