#include "mentor/genome.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

#include "mentor/error.hpp"

namespace mentor {

int Genome::hidden_count() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                          [](const NodeSpec& n) { return n.role == NodeRole::Hidden; }));
}

int Genome::enabled_gene_count() const {
    return static_cast<int>(std::count_if(genes.begin(), genes.end(), [](const Gene& g) { return g.enabled; }));
}

bool Genome::has_node(NodeId id) const {
    return std::any_of(nodes.begin(), nodes.end(), [id](const NodeSpec& n) { return n.id == id; });
}

const Gene* Genome::find_gene(Innovation innovation) const {
    auto it = std::lower_bound(genes.begin(), genes.end(), innovation,
                               [](const Gene& g, Innovation v) { return g.innovation < v; });
    if (it != genes.end() && it->innovation == innovation) return &*it;
    return nullptr;
}

bool Genome::connected(NodeId origin, NodeId terminal) const {
    return std::any_of(genes.begin(), genes.end(),
                       [&](const Gene& g) { return g.origin == origin && g.terminal == terminal; });
}

Innovation Genome::max_innovation() const { return genes.empty() ? 0 : genes.back().innovation; }

void Genome::normalize() {
    std::stable_sort(genes.begin(), genes.end(),
                     [](const Gene& a, const Gene& b) { return a.innovation < b.innovation; });
    std::stable_sort(nodes.begin(), nodes.end(), [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
}

NodeRole role_of(const Genome& g, NodeId id) {
    if (id < g.n_inputs) return NodeRole::Input;
    if (id == g.bias_id()) return NodeRole::Bias;
    if (id < g.first_hidden_id()) return NodeRole::Output;
    return NodeRole::Hidden;
}

Innovation minimal_innovation(int source_index, int output_index, int n_outputs) {
    return static_cast<Innovation>(source_index) * n_outputs + output_index + 1;
}

Genome minimal_genome(int n_inputs, int n_outputs, Rng& rng) {
    if (n_inputs < 1 || n_outputs < 1) throw ConfigError("minimal_genome: need at least one input and one output");
    Genome g;
    g.n_inputs = n_inputs;
    g.n_outputs = n_outputs;
    for (int i = 0; i < n_inputs; ++i) g.nodes.push_back({i, NodeRole::Input});
    g.nodes.push_back({g.bias_id(), NodeRole::Bias});
    for (int k = 0; k < n_outputs; ++k) g.nodes.push_back({g.output_id(k), NodeRole::Output});
    for (int src = 0; src <= n_inputs; ++src) {
        for (int k = 0; k < n_outputs; ++k) {
            g.genes.push_back({minimal_innovation(src, k, n_outputs), src, g.output_id(k), rng.uniform(-1.0, 1.0), true});
        }
    }
    return g;
}

std::optional<std::vector<NodeId>> topological_order(const Genome& g) {
    std::map<NodeId, int> indegree;
    std::map<NodeId, std::vector<NodeId>> out_edges;
    for (const auto& n : g.nodes) indegree[n.id] = 0;
    for (const auto& gene : g.genes) {
        if (!gene.enabled) continue;
        indegree[gene.origin];
        ++indegree[gene.terminal];
        out_edges[gene.origin].push_back(gene.terminal);
    }
    // Kahn's algorithm with a min-heap so the order is a pure function of the graph.
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (const auto& [id, deg] : indegree)
        if (deg == 0) ready.push(id);
    std::vector<NodeId> order;
    order.reserve(indegree.size());
    while (!ready.empty()) {
        const NodeId id = ready.top();
        ready.pop();
        order.push_back(id);
        if (auto it = out_edges.find(id); it != out_edges.end()) {
            for (NodeId t : it->second)
                if (--indegree[t] == 0) ready.push(t);
        }
    }
    if (order.size() != indegree.size()) return std::nullopt;
    return order;
}

bool edge_keeps_acyclic(const Genome& g, NodeId origin, NodeId terminal) {
    if (origin == terminal) return false;
    // The new edge closes a cycle iff origin is reachable from terminal.
    std::unordered_map<NodeId, std::vector<NodeId>> adj;
    for (const auto& gene : g.genes)
        if (gene.enabled) adj[gene.origin].push_back(gene.terminal);
    std::vector<NodeId> stack{terminal};
    std::set<NodeId> seen{terminal};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        if (v == origin) return false;
        if (auto it = adj.find(v); it != adj.end()) {
            for (NodeId w : it->second)
                if (seen.insert(w).second) stack.push_back(w);
        }
    }
    return true;
}

Network::Network(const Genome& g) : n_inputs_(g.n_inputs), bias_id_(g.bias_id()) {
    const auto order = topological_order(g);
    if (!order) throw InvalidGenome("activate: enabled genes form a cycle in genome " + std::to_string(g.id));

    std::unordered_map<NodeId, int> slot;
    for (NodeId id : *order) slot.emplace(id, static_cast<int>(slot.size()));
    n_slots_ = static_cast<int>(slot.size());

    std::unordered_map<NodeId, std::vector<const Gene*>> incoming;
    for (const auto& gene : g.genes)
        if (gene.enabled) incoming[gene.terminal].push_back(&gene);

    for (NodeId id : *order) {
        const NodeRole role = role_of(g, id);
        if (role == NodeRole::Input || role == NodeRole::Bias) continue;
        Step step{slot.at(id), static_cast<int>(links_.size()), 0};
        if (auto it = incoming.find(id); it != incoming.end()) {
            for (const Gene* e : it->second) links_.push_back({slot.at(e->origin), e->weight});
        }
        step.end_link = static_cast<int>(links_.size());
        steps_.push_back(step);
    }
    for (int k = 0; k < g.n_outputs; ++k) {
        auto it = slot.find(g.output_id(k));
        output_slots_.push_back(it == slot.end() ? -1 : it->second);
    }
    // Input and bias slots are addressed by node id during evaluation.
    input_slots_.assign(g.n_inputs + 1, -1);
    for (NodeId id = 0; id <= g.n_inputs; ++id)
        if (auto it = slot.find(id); it != slot.end()) input_slots_[id] = it->second;
    values_.assign(n_slots_, 0.0);
}

Eigen::VectorXd Network::operator()(const Eigen::Ref<const Eigen::VectorXd>& inputs) const {
    if (inputs.size() != n_inputs_) {
        throw ShapeError("activate: expected " + std::to_string(n_inputs_) + " inputs, got " +
                         std::to_string(inputs.size()));
    }
    for (int i = 0; i < n_inputs_; ++i)
        if (input_slots_[i] >= 0) values_[input_slots_[i]] = inputs[i];
    if (input_slots_[bias_id_] >= 0) values_[input_slots_[bias_id_]] = 1.0;
    for (const auto& step : steps_) {
        double sum = 0.0;
        for (int l = step.first_link; l < step.end_link; ++l) sum += links_[l].weight * values_[links_[l].source];
        values_[step.slot] = std::tanh(sum);
    }
    Eigen::VectorXd out(output_slots_.size());
    for (std::size_t k = 0; k < output_slots_.size(); ++k) out[k] = output_slots_[k] < 0 ? 0.0 : values_[output_slots_[k]];
    return out;
}

Eigen::VectorXd activate(const Genome& g, const Eigen::Ref<const Eigen::VectorXd>& inputs) {
    if (inputs.size() != g.n_inputs) {
        throw ShapeError("activate: expected " + std::to_string(g.n_inputs) + " inputs, got " +
                         std::to_string(inputs.size()));
    }
    return Network(g)(inputs);
}

double flops(const Genome& g) {
    const int non_input = g.n_outputs + g.hidden_count();
    return 2.0 * g.enabled_gene_count() + kActivationFlops * non_input;
}

double complexity(const Genome& g) {
    const double base = 2.0 * (g.n_inputs + 1) * g.n_outputs + kActivationFlops * g.n_outputs;
    return flops(g) / base;
}

std::vector<Violation> validate(const Genome& g) {
    std::vector<Violation> out;
    std::set<NodeId> ids;
    for (const auto& n : g.nodes) {
        if (!ids.insert(n.id).second) {
            out.push_back({ViolationKind::BadRoster, "node " + std::to_string(n.id) + " listed twice"});
        }
        if (n.id < 0 || role_of(g, n.id) != n.role) {
            out.push_back({ViolationKind::BadRoster, "node " + std::to_string(n.id) + " has the wrong role"});
        }
    }
    for (int i = 0; i < g.first_hidden_id(); ++i) {
        if (!ids.count(i)) out.push_back({ViolationKind::BadRoster, "fixed node " + std::to_string(i) + " missing"});
    }

    std::set<Innovation> innovations;
    std::set<NodeId> touched;
    for (const auto& gene : g.genes) {
        if (!innovations.insert(gene.innovation).second) {
            out.push_back({ViolationKind::DuplicateInnovation,
                           "innovation " + std::to_string(gene.innovation) + " appears more than once"});
        }
        if (gene.origin == gene.terminal) {
            out.push_back({ViolationKind::SelfLoop, "gene " + std::to_string(gene.innovation) + " is a self-loop"});
        }
        for (NodeId end : {gene.origin, gene.terminal}) {
            if (!ids.count(end)) {
                out.push_back({ViolationKind::DanglingNode, "gene " + std::to_string(gene.innovation) +
                                                                " references unknown node " + std::to_string(end)});
            }
            touched.insert(end);
        }
    }
    for (const auto& n : g.nodes) {
        if (n.role == NodeRole::Hidden && !touched.count(n.id)) {
            out.push_back({ViolationKind::OrphanHidden, "hidden node " + std::to_string(n.id) + " has no genes"});
        }
    }
    if (!topological_order(g)) out.push_back({ViolationKind::Cycle, "enabled genes form a cycle"});
    return out;
}

}  // namespace mentor
