#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mentor/error.hpp"
#include "mentor/harness.hpp"

namespace mentor {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& text, int line_no, const std::string& key) {
    std::istringstream in(text);
    T value{};
    std::string rest;
    if (!(in >> value) || (in >> rest)) {
        throw ParseError("config line " + std::to_string(line_no) + ": key '" + key + "' has invalid value '" + text +
                         "'");
    }
    return value;
}

}  // namespace

std::string_view framework_name(Framework f) { return f == Framework::Single ? "single" : "dual"; }

Framework parse_framework(std::string_view name) {
    if (name == "single") return Framework::Single;
    if (name == "dual") return Framework::Dual;
    throw ConfigError("unknown framework '" + std::string(name) + "' (expected single or dual)");
}

ExperimentConfig ExperimentConfig::defaults(RobotKind robot) {
    ExperimentConfig cfg;
    cfg.robot = robot;
    cfg.evo = robot == RobotKind::UGV ? EvoParams::ugv() : EvoParams::swarm();
    cfg.n_training_scenarios = robot == RobotKind::UGV ? 80 : 20;
    cfg.obstacles_per_grid = RobotSpec::of(robot).obstacles_per_grid;
    return cfg;
}

void ExperimentConfig::check() const {
    evo.check();
    criteria.check();
    speciation.check();
    if (n_training_scenarios < 1) throw ConfigError("n_training_scenarios must be at least 1");
    if (obstacles_per_grid < 0) throw ConfigError("env.obstacles_per_grid must be non-negative");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ExperimentConfig parse_config(std::istream& in) {
    struct Entry {
        std::string key, value;
        int line;
    };
    std::vector<Entry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value', got '" + line + "'");
        }
        Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (e.key.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty key");
        entries.push_back(std::move(e));
    }

    RobotKind robot = RobotKind::UGV;
    for (const auto& e : entries) {
        if (e.key == "robot") {
            try {
                robot = parse_robot(e.value);
            } catch (const ConfigError& err) {
                throw ParseError("config line " + std::to_string(e.line) + ": key 'robot': " + err.what());
            }
        }
    }
    ExperimentConfig cfg = ExperimentConfig::defaults(robot);

    using Setter = std::function<void(const Entry&)>;
    auto real = [](double& field) {
        return Setter([&field](const Entry& e) { field = parse_number<double>(e.value, e.line, e.key); });
    };
    auto integer = [](int& field) {
        return Setter([&field](const Entry& e) { field = parse_number<int>(e.value, e.line, e.key); });
    };
    const std::map<std::string, Setter> setters = {
        {"robot", [](const Entry&) {}},
        {"framework",
         [&](const Entry& e) {
             try {
                 cfg.framework = parse_framework(e.value);
             } catch (const ConfigError& err) {
                 throw ParseError("config line " + std::to_string(e.line) + ": key 'framework': " + err.what());
             }
         }},
        {"seed", [&](const Entry& e) { cfg.seed = parse_number<std::uint64_t>(e.value, e.line, e.key); }},
        {"n_training_scenarios", integer(cfg.n_training_scenarios)},
        {"output_dir", [&](const Entry& e) { cfg.output_dir = e.value; }},
        {"env.obstacles_per_grid", integer(cfg.obstacles_per_grid)},
        {"evo.pop_size", integer(cfg.evo.pop_size)},
        {"evo.max_generations", integer(cfg.evo.max_generations)},
        {"evo.elitist_fraction", real(cfg.evo.elitist_fraction)},
        {"evo.crossover_prob", real(cfg.evo.crossover_prob)},
        {"evo.weight_mut_prob", real(cfg.evo.weight_mut_prob)},
        {"evo.add_node_prob", real(cfg.evo.add_node_prob)},
        {"evo.add_edge_prob", real(cfg.evo.add_edge_prob)},
        {"evo.threads", integer(cfg.evo.threads)},
        {"criteria.alpha", real(cfg.criteria.alpha)},
        {"criteria.max_experience_points",
         [&](const Entry& e) {
             cfg.criteria.max_experience_points = parse_number<std::size_t>(e.value, e.line, e.key);
         }},
        {"speciation.c1", real(cfg.speciation.c1)},
        {"speciation.c2", real(cfg.speciation.c2)},
        {"speciation.c3", real(cfg.speciation.c3)},
        {"speciation.compat_threshold", real(cfg.speciation.compat_threshold)},
    };
    for (const auto& e : entries) {
        auto it = setters.find(e.key);
        if (it == setters.end()) {
            throw ParseError("config line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
        }
        it->second(e);
    }
    try {
        cfg.check();
    } catch (const ConfigError& err) {
        throw ParseError(std::string("config: ") + err.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("config file not found: '" + path.string() + "'");
    return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
    const auto old_precision = out.precision(17);
    out << "robot = " << robot_name(cfg.robot) << '\n'
        << "framework = " << framework_name(cfg.framework) << '\n'
        << "seed = " << cfg.seed << '\n'
        << "n_training_scenarios = " << cfg.n_training_scenarios << '\n'
        << "output_dir = " << cfg.output_dir << '\n'
        << "env.obstacles_per_grid = " << cfg.obstacles_per_grid << '\n'
        << "evo.pop_size = " << cfg.evo.pop_size << '\n'
        << "evo.max_generations = " << cfg.evo.max_generations << '\n'
        << "evo.elitist_fraction = " << cfg.evo.elitist_fraction << '\n'
        << "evo.crossover_prob = " << cfg.evo.crossover_prob << '\n'
        << "evo.weight_mut_prob = " << cfg.evo.weight_mut_prob << '\n'
        << "evo.add_node_prob = " << cfg.evo.add_node_prob << '\n'
        << "evo.add_edge_prob = " << cfg.evo.add_edge_prob << '\n'
        << "criteria.alpha = " << cfg.criteria.alpha << '\n'
        << "criteria.max_experience_points = " << cfg.criteria.max_experience_points << '\n'
        << "speciation.c1 = " << cfg.speciation.c1 << '\n'
        << "speciation.c2 = " << cfg.speciation.c2 << '\n'
        << "speciation.c3 = " << cfg.speciation.c3 << '\n'
        << "speciation.compat_threshold = " << cfg.speciation.compat_threshold << '\n';
    out.precision(old_precision);
}

}  // namespace mentor
