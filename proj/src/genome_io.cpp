#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "mentor/error.hpp"
#include "mentor/genome.hpp"

namespace mentor {

void write_genome(std::ostream& out, const Genome& g) {
    out << "genome " << g.id << ' ' << g.n_inputs << ' ' << g.n_outputs << ' ' << g.hidden_count() << '\n';
    const auto old_precision = out.precision(17);
    for (const auto& gene : g.genes) {
        out << gene.innovation << ' ' << gene.origin << ' ' << gene.terminal << ' ' << gene.weight << ' '
            << (gene.enabled ? 1 : 0) << '\n';
    }
    out.precision(old_precision);
}

Genome read_genome(std::istream& in) {
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw ParseError("genome line " + std::to_string(line_no) + ": " + what);
    };

    Genome g;
    int n_hidden = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream header(line);
        std::string tag;
        if (!(header >> tag >> g.id >> g.n_inputs >> g.n_outputs >> n_hidden) || tag != "genome") {
            fail("expected 'genome <id> <n_inputs> <n_outputs> <n_hidden>'");
        }
        break;
    }
    if (line_no == 0 || g.n_inputs < 1 || g.n_outputs < 1) fail("missing or invalid header");

    for (int i = 0; i < g.n_inputs; ++i) g.nodes.push_back({i, NodeRole::Input});
    g.nodes.push_back({g.bias_id(), NodeRole::Bias});
    for (int k = 0; k < g.n_outputs; ++k) g.nodes.push_back({g.output_id(k), NodeRole::Output});

    std::set<NodeId> hidden;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        Gene gene;
        int enabled = 0;
        if (!(row >> gene.innovation >> gene.origin >> gene.terminal >> gene.weight >> enabled)) {
            fail("expected '<innovation> <origin> <terminal> <weight> <enabled>'");
        }
        if (enabled != 0 && enabled != 1) fail("enabled flag must be 0 or 1");
        std::string extra;
        if (row >> extra) fail("trailing data '" + extra + "'");
        gene.enabled = enabled == 1;
        for (NodeId end : {gene.origin, gene.terminal}) {
            if (end < 0) fail("negative node id");
            if (end >= g.first_hidden_id()) hidden.insert(end);
        }
        g.genes.push_back(gene);
    }
    if (static_cast<int>(hidden.size()) != n_hidden) {
        throw ParseError("genome header declares " + std::to_string(n_hidden) + " hidden nodes but genes reference " +
                         std::to_string(hidden.size()));
    }
    for (NodeId id : hidden) g.nodes.push_back({id, NodeRole::Hidden});
    g.normalize();
    return g;
}

void save_genome(const std::string& path, const Genome& g) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_genome(out, g);
}

Genome load_genome(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("genome file not found: '" + path + "'");
    return read_genome(in);
}

}  // namespace mentor
