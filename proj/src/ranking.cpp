#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mentor/error.hpp"
#include "mentor/evolution.hpp"

namespace mentor {

namespace {

bool dominates(const Objectives& a, const Objectives& b) {
    return a.performance >= b.performance && a.experience >= b.experience &&
           (a.performance > b.performance || a.experience > b.experience);
}

}  // namespace

std::vector<int> nondominated_sort(std::span<const Objectives> points) {
    const std::size_t n = points.size();
    std::vector<int> rank(n, 0);
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<int> dominators(n, 0);
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(points[i], points[j])) {
                dominated[i].push_back(j);
                ++dominators[j];
            } else if (dominates(points[j], points[i])) {
                dominated[j].push_back(i);
                ++dominators[i];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (dominators[i] == 0) front.push_back(i);
    int level = 1;
    while (!front.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : front) {
            rank[i] = level;
            for (std::size_t j : dominated[i])
                if (--dominators[j] == 0) next.push_back(j);
        }
        front = std::move(next);
        ++level;
    }
    return rank;
}

std::vector<double> crowding_distance(std::span<const Objectives> front) {
    const std::size_t n = front.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }
    auto accumulate_objective = [&](auto value) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return value(front[a]) < value(front[b]); });
        const double lo = value(front[idx.front()]);
        const double hi = value(front[idx.back()]);
        dist[idx.front()] = inf;
        dist[idx.back()] = inf;
        if (!(hi > lo)) return;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            dist[idx[k]] += (value(front[idx[k + 1]]) - value(front[idx[k - 1]])) / (hi - lo);
        }
    };
    accumulate_objective([](const Objectives& o) { return o.performance; });
    accumulate_objective([](const Objectives& o) { return o.experience; });
    return dist;
}

void assign_ranks(std::vector<Genome>& genomes, Mode mode) {
    std::vector<Objectives> obj;
    obj.reserve(genomes.size());
    for (const auto& g : genomes) {
        if (!g.objectives) throw Error("assign_ranks: genome " + std::to_string(g.id) + " has not been evaluated");
        obj.push_back(*g.objectives);
    }

    if (mode == Mode::Single) {
        std::vector<double> f(obj.size());
        for (std::size_t i = 0; i < obj.size(); ++i) f[i] = obj[i].performance;
        std::vector<double> sorted = f;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        for (std::size_t i = 0; i < genomes.size(); ++i) {
            const auto better = std::lower_bound(sorted.begin(), sorted.end(), f[i], std::greater<>()) - sorted.begin();
            genomes[i].rank = static_cast<int>(better) + 1;
            genomes[i].crowding = 0.0;
        }
        return;
    }

    const auto ranks = nondominated_sort(obj);
    const int max_rank = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
    for (int r = 1; r <= max_rank; ++r) {
        std::vector<std::size_t> members;
        std::vector<Objectives> front;
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            if (ranks[i] == r) {
                members.push_back(i);
                front.push_back(obj[i]);
            }
        }
        const auto cd = crowding_distance(front);
        for (std::size_t k = 0; k < members.size(); ++k) {
            genomes[members[k]].rank = r;
            genomes[members[k]].crowding = cd[k];
        }
    }
}

bool fitter(const Genome& a, const Genome& b) {
    const int ra = a.rank.value_or(std::numeric_limits<int>::max());
    const int rb = b.rank.value_or(std::numeric_limits<int>::max());
    if (ra != rb) return ra < rb;
    const double ca = a.crowding.value_or(0.0);
    const double cb = b.crowding.value_or(0.0);
    if (ca != cb) return ca > cb;
    const double fa = a.objectives ? a.objectives->performance : 0.0;
    const double fb = b.objectives ? b.objectives->performance : 0.0;
    if (fa != fb) return fa > fb;
    return a.id < b.id;
}

double rank_fitness(int rank, double crowding) {
    const double base = 1.0 / rank;
    if (std::isinf(crowding)) return 2.0 * base;
    return base * (1.0 + crowding / (1.0 + crowding));
}

std::vector<double> niche_size_targets(Population& pop, int pop_size) {
    std::vector<double> niche_sum(pop.niches.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < pop.niches.size(); ++i) {
        auto& niche = pop.niches[i];
        const double size = static_cast<double>(niche.members.size());
        for (GenomeId id : niche.members) {
            const Genome& g = pop.genome(id);
            if (!g.rank) throw Error("niche sizing needs ranked genomes");
            const double shared = rank_fitness(*g.rank, g.crowding.value_or(0.0)) / size;
            niche_sum[i] += shared;
        }
        total += niche_sum[i];
    }
    // Mean shared fitness over the population; targets then sum to pop_size.
    const double mean = total / pop_size;
    std::vector<double> targets(pop.niches.size());
    for (std::size_t i = 0; i < pop.niches.size(); ++i) {
        targets[i] = mean > 0.0 ? niche_sum[i] / mean : static_cast<double>(pop_size) / pop.niches.size();
        pop.niches[i].size_target = targets[i];
    }
    return targets;
}

std::vector<int> largest_remainder(std::span<const double> weights, int total) {
    std::vector<int> out(weights.size(), 0);
    if (weights.empty() || total <= 0) return out;
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> quota(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        quota[i] = sum > 0.0 ? weights[i] / sum * total : static_cast<double>(total) / weights.size();
    }
    int assigned = 0;
    for (std::size_t i = 0; i < quota.size(); ++i) {
        out[i] = static_cast<int>(std::floor(quota[i]));
        assigned += out[i];
    }
    std::vector<std::size_t> order(quota.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return quota[a] - std::floor(quota[a]) > quota[b] - std::floor(quota[b]);
    });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
        ++out[order[k]];
        ++assigned;
    }
    // Floating error can overshoot by one; take it back from the largest share.
    while (assigned > total) {
        const auto it = std::max_element(out.begin(), out.end());
        --*it;
        --assigned;
    }
    return out;
}

std::vector<int> resize_niches(Population& pop, int pop_size) {
    const auto raw = niche_size_targets(pop, pop_size);
    return largest_remainder(raw, pop_size);
}

}  // namespace mentor
