#include <algorithm>
#include <cmath>

#include "mentor/error.hpp"
#include "mentor/evolution.hpp"

namespace mentor {

void SpeciationParams::check() const {
    if (c1 < 0 || c2 < 0 || c3 < 0) throw ConfigError("speciation coefficients must be non-negative");
    if (!(compat_threshold > 0)) throw ConfigError("speciation.compat_threshold must be positive");
}

Innovation InnovationRegistry::edge(NodeId origin, NodeId terminal) {
    auto [it, inserted] = edges_.try_emplace({origin, terminal}, next_innovation_);
    if (inserted) ++next_innovation_;
    return it->second;
}

NodeId InnovationRegistry::split_node(Innovation gene) {
    auto [it, inserted] = splits_.try_emplace(gene, next_node_);
    if (inserted) ++next_node_;
    return it->second;
}

void InnovationRegistry::new_generation() {
    edges_.clear();
    splits_.clear();
}

const Genome& Population::genome(GenomeId id) const {
    auto it = std::find_if(genomes.begin(), genomes.end(), [id](const Genome& g) { return g.id == id; });
    if (it == genomes.end()) throw Error("population has no genome " + std::to_string(id));
    return *it;
}

int Population::niche_of(GenomeId id) const {
    for (const auto& n : niches)
        if (std::find(n.members.begin(), n.members.end(), id) != n.members.end()) return n.id;
    return -1;
}

double distance(const Genome& a, const Genome& b, const SpeciationParams& p) {
    // Both gene lists are sorted by innovation.
    const Innovation max_a = a.max_innovation();
    const Innovation max_b = b.max_innovation();
    int excess = 0;
    int disjoint = 0;
    double weight_diff = 0.0;
    auto ia = a.genes.begin();
    auto ib = b.genes.begin();
    auto unmatched = [&](Innovation inn, Innovation other_max) {
        if (inn > other_max) ++excess;
        else ++disjoint;
    };
    while (ia != a.genes.end() || ib != b.genes.end()) {
        if (ib == b.genes.end() || (ia != a.genes.end() && ia->innovation < ib->innovation)) {
            unmatched(ia->innovation, max_b);
            ++ia;
        } else if (ia == a.genes.end() || ib->innovation < ia->innovation) {
            unmatched(ib->innovation, max_a);
            ++ib;
        } else {
            weight_diff += std::abs(ia->weight - ib->weight);
            ++ia;
            ++ib;
        }
    }
    const auto larger = std::max(a.genes.size(), b.genes.size());
    const double n = larger < static_cast<std::size_t>(kDistanceSmallGenome) ? 1.0 : static_cast<double>(larger);
    return p.c1 * excess / n + p.c2 * disjoint / n + p.c3 * weight_diff;
}

void speciate(Population& pop, const SpeciationParams& p) {
    for (auto& n : pop.niches) n.members.clear();
    for (const auto& g : pop.genomes) {
        Niche* home = nullptr;
        for (auto& n : pop.niches) {
            if (distance(g, n.representative, p) < p.compat_threshold) {
                home = &n;
                break;
            }
        }
        if (!home) {
            Niche fresh;
            fresh.id = pop.next_niche_id++;
            fresh.representative = g;
            pop.niches.push_back(std::move(fresh));
            home = &pop.niches.back();
        }
        home->members.push_back(g.id);
    }
    std::erase_if(pop.niches, [](const Niche& n) { return n.members.empty(); });
    for (auto& n : pop.niches) {
        const GenomeId rep = n.members[pop.rng.index(n.members.size())];
        n.representative = pop.genome(rep);
    }
}

}  // namespace mentor
