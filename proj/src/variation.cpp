#include <algorithm>
#include <limits>
#include <set>

#include "mentor/error.hpp"
#include "mentor/evolution.hpp"

namespace mentor {

namespace {

// Rank ascending, then crowding descending. Ties are not "better".
bool tournament_better(const Genome& a, const Genome& b) {
    const int ra = a.rank.value_or(std::numeric_limits<int>::max());
    const int rb = b.rank.value_or(std::numeric_limits<int>::max());
    if (ra != rb) return ra < rb;
    return a.crowding.value_or(0.0) > b.crowding.value_or(0.0);
}

std::size_t gene_index(const Genome& g, Innovation innovation) {
    auto it = std::lower_bound(g.genes.begin(), g.genes.end(), innovation,
                               [](const Gene& gene, Innovation v) { return gene.innovation < v; });
    return static_cast<std::size_t>(it - g.genes.begin());
}

void clear_fitness(Genome& g) {
    g.objectives.reset();
    g.rank.reset();
    g.crowding.reset();
}

}  // namespace

std::pair<std::size_t, std::size_t> select_parents_intra(std::span<const Genome> pool, Rng& rng) {
    if (pool.empty()) throw ConfigError("select_parents_intra: empty niche");
    if (pool.size() == 1) return {0, 0};
    auto tournament = [&]() {
        const std::size_t i = rng.index(pool.size());
        const std::size_t j = rng.index(pool.size());
        return tournament_better(pool[j], pool[i]) ? j : i;
    };
    const std::size_t first = tournament();
    const std::size_t second = tournament();
    return {first, second};
}

std::pair<std::size_t, std::size_t> select_parents_global(std::span<const Genome> champions, Rng& rng) {
    if (champions.empty()) throw ConfigError("select_parents_global: no champions");
    std::vector<double> weight(champions.size());
    double total = 0.0;
    for (std::size_t i = 0; i < champions.size(); ++i) {
        weight[i] = 1.0 / champions[i].rank.value_or(1);
        total += weight[i];
    }
    auto draw = [&]() {
        double u = rng.uniform() * total;
        for (std::size_t i = 0; i < weight.size(); ++i) {
            if (u < weight[i]) return i;
            u -= weight[i];
        }
        return weight.size() - 1;
    };
    const std::size_t first = draw();
    const std::size_t second = draw();
    return {first, second};
}

Genome crossover(const Genome& a, const Genome& b, Rng& rng) {
    if (a.n_inputs != b.n_inputs || a.n_outputs != b.n_outputs) throw ShapeError("crossover: parents differ in I/O");
    const int ra = a.rank.value_or(std::numeric_limits<int>::max());
    const int rb = b.rank.value_or(std::numeric_limits<int>::max());
    bool a_leads = ra < rb;
    if (ra == rb) a_leads = rng.bernoulli(0.5);
    const Genome& lead = a_leads ? a : b;
    const Genome& other = a_leads ? b : a;

    Genome child;
    child.n_inputs = a.n_inputs;
    child.n_outputs = a.n_outputs;
    for (const auto& gene : lead.genes) {
        const Gene* twin = other.find_gene(gene.innovation);
        if (twin && rng.bernoulli(0.5)) child.genes.push_back(*twin);
        else child.genes.push_back(gene);
    }

    std::set<NodeId> hidden;
    for (const auto& gene : child.genes)
        for (NodeId end : {gene.origin, gene.terminal})
            if (end >= child.first_hidden_id()) hidden.insert(end);
    for (int i = 0; i < child.n_inputs; ++i) child.nodes.push_back({i, NodeRole::Input});
    child.nodes.push_back({child.bias_id(), NodeRole::Bias});
    for (int k = 0; k < child.n_outputs; ++k) child.nodes.push_back({child.output_id(k), NodeRole::Output});
    for (NodeId id : hidden) child.nodes.push_back({id, NodeRole::Hidden});

    // Re-enable genes one at a time in innovation order, refusing any that
    // would close a cycle.
    std::vector<bool> wanted(child.genes.size());
    for (std::size_t i = 0; i < child.genes.size(); ++i) {
        wanted[i] = child.genes[i].enabled;
        child.genes[i].enabled = false;
    }
    for (std::size_t i = 0; i < child.genes.size(); ++i) {
        if (wanted[i] && edge_keeps_acyclic(child, child.genes[i].origin, child.genes[i].terminal)) {
            child.genes[i].enabled = true;
        }
    }
    return child;
}

void add_node(Genome& g, std::size_t index, InnovationRegistry& registry) {
    if (index >= g.genes.size()) throw ConfigError("add_node: gene index out of range");
    const Gene old = g.genes[index];
    if (!old.enabled) throw ConfigError("add_node: cannot split a disabled gene");

    NodeId hidden = registry.split_node(old.innovation);
    // The same split may already be present via the other parent.
    if (g.has_node(hidden)) hidden = registry.fresh_node();
    const Innovation in_edge = registry.edge(old.origin, hidden);
    const Innovation out_edge = registry.edge(hidden, old.terminal);

    g.genes[index].enabled = false;
    g.nodes.push_back({hidden, NodeRole::Hidden});
    g.genes.push_back({in_edge, old.origin, hidden, 1.0, true});
    g.genes.push_back({out_edge, hidden, old.terminal, old.weight, true});
    g.normalize();
}

bool add_edge(Genome& g, NodeId origin, NodeId terminal, double weight, InnovationRegistry& registry) {
    if (origin == terminal || !g.has_node(origin) || !g.has_node(terminal)) return false;
    const NodeRole to = role_of(g, terminal);
    if (to == NodeRole::Input || to == NodeRole::Bias) return false;
    if (role_of(g, origin) == NodeRole::Output) return false;
    if (g.connected(origin, terminal)) return false;
    if (!edge_keeps_acyclic(g, origin, terminal)) return false;
    g.genes.push_back({registry.edge(origin, terminal), origin, terminal, weight, true});
    g.normalize();
    return true;
}

Genome mutate(const Genome& g, InnovationRegistry& registry, const EvoParams& params, Rng& rng) {
    Genome child = g;
    clear_fitness(child);

    std::vector<Innovation> originals;
    originals.reserve(child.genes.size());
    for (const auto& gene : child.genes) originals.push_back(gene.innovation);

    for (Innovation inn : originals) {
        const std::size_t i = gene_index(child, inn);
        if (!child.genes[i].enabled) continue;
        if (rng.bernoulli(params.weight_mut_prob)) {
            if (rng.bernoulli(kWeightReplaceProb)) {
                child.genes[i].weight = rng.uniform(-kWeightReplaceRange, kWeightReplaceRange);
            } else {
                child.genes[i].weight += rng.normal(0.0, kWeightSigma);
            }
        }
        if (rng.bernoulli(params.add_node_prob)) add_node(child, i, registry);
    }

    std::vector<NodeId> sources;
    std::vector<NodeId> sinks;
    for (const auto& n : child.nodes) {
        if (n.role != NodeRole::Output) sources.push_back(n.id);
        if (n.role == NodeRole::Output || n.role == NodeRole::Hidden) sinks.push_back(n.id);
    }
    const int samples = std::min<int>(static_cast<int>(child.genes.size()), kMaxEdgeCandidates);
    for (int s = 0; s < samples; ++s) {
        if (!rng.bernoulli(params.add_edge_prob)) continue;
        const NodeId origin = sources[rng.index(sources.size())];
        const NodeId terminal = sinks[rng.index(sinks.size())];
        const double w = rng.uniform(-1.0, 1.0);
        add_edge(child, origin, terminal, w, registry);
    }
    return child;
}

}  // namespace mentor
