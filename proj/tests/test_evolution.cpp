#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mentor/error.hpp"
#include "mentor/evolution.hpp"
#include "oracles.hpp"

using namespace mentor;

namespace {

Genome from_genes(int n_in, int n_out, std::vector<Gene> genes) {
    Genome g;
    g.n_inputs = n_in;
    g.n_outputs = n_out;
    for (int i = 0; i < n_in; ++i) g.nodes.push_back({i, NodeRole::Input});
    g.nodes.push_back({g.bias_id(), NodeRole::Bias});
    for (int k = 0; k < n_out; ++k) g.nodes.push_back({g.output_id(k), NodeRole::Output});
    g.genes = std::move(genes);
    return g;
}

std::set<Innovation> innovations(const Genome& g) {
    std::set<Innovation> s;
    for (const auto& gene : g.genes) s.insert(gene.innovation);
    return s;
}

// Structurally related genomes sharing one innovation history.
std::vector<Genome> related_genomes(Rng& rng, int count, int n_in = 4, int n_out = 2) {
    const Genome base = minimal_genome(n_in, n_out, rng);
    InnovationRegistry reg(base.max_innovation() + 1, base.first_hidden_id());
    EvoParams p;
    p.weight_mut_prob = 0.5;
    p.add_node_prob = 0.1;
    p.add_edge_prob = 0.3;
    std::vector<Genome> out;
    for (int i = 0; i < count; ++i) {
        Genome g = base;
        const int steps = static_cast<int>(rng.index(4));
        for (int s = 0; s < steps; ++s) g = mutate(g, reg, p, rng);
        g.id = static_cast<GenomeId>(i + 1);
        out.push_back(std::move(g));
    }
    return out;
}

Population population_of(std::vector<Genome> genomes, std::uint64_t seed = 1) {
    Population pop;
    pop.rng = Rng(seed);
    for (auto& g : genomes) g.id = pop.next_genome_id++;
    pop.genomes = std::move(genomes);
    return pop;
}

Objectives toy_objectives(const Genome& g) {
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(g.n_inputs, -1.0, 1.0);
    const Eigen::VectorXd y = activate(g, x);
    double spread = 0.0;
    for (const auto& gene : g.genes)
        if (gene.enabled) spread += std::abs(gene.weight);
    return {2.0 + y[0] - 0.5 * std::abs(y[1]), spread / (1.0 + g.genes.size()) + 0.1 * g.hidden_count()};
}

const Evaluator toy = [](const Genome& g, int) { return toy_objectives(g); };

EvoParams small_params(int generations) {
    EvoParams p = EvoParams::swarm();
    p.pop_size = 30;
    p.max_generations = generations;
    return p;
}

std::string metrics_text(const RunRecord& r) {
    std::ostringstream s;
    write_metrics_csv(s, r);
    write_niche_csv(s, r);
    write_pareto_csv(s, r.pareto);
    for (const auto& g : r.final_population.genomes) write_genome(s, g);
    return s.str();
}

}  // namespace

TEST_CASE("distance worked example") {
    const Genome a = from_genes(1, 1, {{1, 0, 2, 0.5, true}});
    const Genome b = from_genes(1, 1, {{1, 0, 2, 0.9, true}, {2, 1, 2, 0.1, true}});
    const SpeciationParams p;
    CHECK(distance(a, b, p) == doctest::Approx(1.16).epsilon(1e-12));
    CHECK(distance(a, a, p) == 0.0);
}

TEST_CASE("distance counts disjoint genes with c2") {
    const Genome a = from_genes(2, 1, {{1, 0, 3, 0.0, true}, {3, 2, 3, 0.0, true}});
    const Genome b = from_genes(2, 1, {{1, 0, 3, 0.0, true}, {2, 1, 3, 0.0, true}, {4, 0, 3, 0.0, false}});
    SpeciationParams p{0.0, 5.0, 0.0, 3.0};
    // Innovations 2 and 3 are disjoint, 4 is excess.
    CHECK(distance(a, b, p) == doctest::Approx(10.0));
    p = {7.0, 0.0, 0.0, 3.0};
    CHECK(distance(a, b, p) == doctest::Approx(7.0));
}

TEST_CASE("distance normalizes by the larger gene count from 20 genes up") {
    Rng rng(2);
    const Genome a = minimal_genome(11, 2, rng);  // 24 genes
    Genome b = a;
    b.genes.pop_back();
    const SpeciationParams p{1.0, 0.0, 0.0, 3.0};
    CHECK(distance(a, b, p) == doctest::Approx(1.0 / 24.0));
}

TEST_CASE("distance is symmetric, non-negative and zero on identical genomes") {
    Rng rng(11);
    const SpeciationParams p;
    for (int trial = 0; trial < 200; ++trial) {
        const auto gs = related_genomes(rng, 2);
        const double d = distance(gs[0], gs[1], p);
        CHECK(d >= 0.0);
        CHECK(d == distance(gs[1], gs[0], p));
        CHECK(distance(gs[0], gs[0], p) == 0.0);
    }
}

TEST_CASE("speciation of identical genomes yields one niche") {
    Rng rng(12);
    const Genome g = minimal_genome(6, 2, rng);
    Population pop = population_of(std::vector<Genome>(20, g));
    speciate(pop, SpeciationParams{});
    CHECK(pop.niches.size() == 1);
    CHECK(pop.niches[0].members.size() == 20);
}

TEST_CASE("speciation separates two weight clusters") {
    Rng rng(13);
    const Genome base = minimal_genome(6, 2, rng);
    std::vector<Genome> gs;
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < 10; ++i) {
            Genome g = base;
            for (auto& gene : g.genes) gene.weight += (c == 0 ? 0.0 : 1.0) + rng.uniform(-0.01, 0.01);
            gs.push_back(g);
        }
    }
    const SpeciationParams p;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        for (std::size_t j = 0; j < gs.size(); ++j) {
            const bool same = (i < 10) == (j < 10);
            if (same) CHECK(distance(gs[i], gs[j], p) < p.compat_threshold);
            else CHECK(distance(gs[i], gs[j], p) > p.compat_threshold);
        }
    }
    Population pop = population_of(gs);
    speciate(pop, p);
    REQUIRE(pop.niches.size() == 2);
    for (const auto& n : pop.niches) {
        CHECK(n.members.size() == 10);
        const bool first = n.members.front() <= 10;
        for (GenomeId id : n.members) CHECK((id <= 10) == first);
    }
}

TEST_CASE("speciation partitions the population") {
    Rng rng(14);
    for (int trial = 0; trial < 30; ++trial) {
        Population pop = population_of(related_genomes(rng, 40), trial);
        SpeciationParams p;
        p.compat_threshold = rng.uniform(0.3, 3.0);
        for (int round = 0; round < 3; ++round) {
            speciate(pop, p);
            std::multiset<GenomeId> seen;
            for (const auto& n : pop.niches) {
                CHECK(!n.members.empty());
                seen.insert(n.members.begin(), n.members.end());
            }
            CHECK(seen.size() == pop.genomes.size());
            for (const auto& g : pop.genomes) CHECK(seen.count(g.id) == 1);
        }
    }
}

TEST_CASE("non-dominated sort examples") {
    const std::vector<Objectives> one{{1.0, 1.0}};
    CHECK(nondominated_sort(one) == std::vector<int>{1});
    const std::vector<Objectives> three{{2, 1}, {1, 2}, {0, 0}};
    CHECK(nondominated_sort(three) == std::vector<int>{1, 1, 2});
}

TEST_CASE("non-dominated sort agrees with the pairwise-dominance oracle") {
    Rng rng(15);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng.index(200);
        const bool grid = trial % 2 == 0;  // coarse grid produces ties
        std::vector<Objectives> pts(n);
        for (auto& p : pts) {
            p.performance = grid ? static_cast<double>(rng.index(6)) : rng.uniform();
            p.experience = grid ? static_cast<double>(rng.index(6)) : rng.uniform();
        }
        CHECK(nondominated_sort(pts) == oracle::pareto_ranks(pts));
    }
}

TEST_CASE("crowding distance") {
    const std::vector<Objectives> two{{0, 1}, {1, 0}};
    for (double c : crowding_distance(two)) CHECK(std::isinf(c));
    const std::vector<Objectives> single{{3, 3}};
    CHECK(std::isinf(crowding_distance(single)[0]));

    const std::vector<Objectives> three{{0, 2}, {1, 1}, {2, 0}};
    const auto c = crowding_distance(three);
    CHECK(std::isinf(c[0]));
    CHECK(c[1] == doctest::Approx(2.0));
    CHECK(std::isinf(c[2]));

    Rng rng(16);
    std::vector<Objectives> front;
    for (int i = 0; i < 12; ++i) {
        const double x = rng.uniform();
        front.push_back({x, 1.0 - x});
    }
    const auto base = crowding_distance(front);
    std::vector<std::size_t> perm(front.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm.begin(), perm.end());
    std::vector<Objectives> shuffled;
    for (auto i : perm) shuffled.push_back(front[i]);
    const auto moved = crowding_distance(shuffled);
    for (std::size_t k = 0; k < perm.size(); ++k) CHECK(moved[k] == base[perm[k]]);
}

TEST_CASE("largest remainder rounding sums to the total") {
    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> w(1 + rng.index(15));
        for (auto& x : w) x = rng.uniform(0.0, 10.0);
        const int total = static_cast<int>(rng.index(300));
        const auto r = largest_remainder(w, total);
        CHECK(std::accumulate(r.begin(), r.end(), 0) == total);
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(r[i] - w[i] / sum * total) < 1.0);
    }
}

namespace {

// k niches of `size` members; niche i's members get rank ranks[i], crowding 0.
Population niche_population(const std::vector<int>& ranks, int size) {
    Rng rng(18);
    const Genome g = minimal_genome(2, 1, rng);
    Population pop;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        Niche n;
        n.id = static_cast<int>(i + 1);
        for (int m = 0; m < size; ++m) {
            Genome c = g;
            c.id = pop.next_genome_id++;
            c.rank = ranks[i];
            c.crowding = 0.0;
            n.members.push_back(c.id);
            pop.genomes.push_back(c);
        }
        pop.niches.push_back(n);
    }
    return pop;
}

}  // namespace

TEST_CASE("niche targets") {
    SUBCASE("equal niches share equally") {
        for (int k : {1, 2, 4, 5}) {
            Population pop = niche_population(std::vector<int>(k, 1), 20 / k);
            for (double t : niche_size_targets(pop, 20)) CHECK(t == doctest::Approx(20.0 / k));
            for (int t : resize_niches(pop, 20)) CHECK(t == 20 / k);
        }
    }
    SUBCASE("double adjusted fitness gives double target") {
        Population pop = niche_population({1, 2}, 6);
        const auto t = niche_size_targets(pop, 12);
        CHECK(t[0] == doctest::Approx(2.0 * t[1]));
        CHECK(t[0] + t[1] == doctest::Approx(12.0));
    }
    SUBCASE("rounded targets sum to the population size") {
        Rng rng(19);
        for (int trial = 0; trial < 100; ++trial) {
            Population pop = population_of(related_genomes(rng, 40), trial);
            for (auto& g : pop.genomes) g.objectives = Objectives{rng.uniform(), rng.uniform()};
            assign_ranks(pop.genomes, trial % 2 ? Mode::Multi : Mode::Single);
            SpeciationParams p;
            p.compat_threshold = 0.5;
            speciate(pop, p);
            const auto r = resize_niches(pop, 40);
            CHECK(std::accumulate(r.begin(), r.end(), 0) == 40);
        }
    }
}

TEST_CASE("rank fitness") {
    CHECK(rank_fitness(1, 0.0) == 1.0);
    CHECK(rank_fitness(2, 0.0) == 0.5);
    CHECK(rank_fitness(1, 1.0) == doctest::Approx(1.5));
    CHECK(rank_fitness(4, std::numeric_limits<double>::infinity()) == 0.5);
}

TEST_CASE("single-mode ranks order by F only") {
    Rng rng(20);
    std::vector<Genome> gs(4, minimal_genome(1, 1, rng));
    const double fs[] = {1.0, 3.0, 3.0, 2.0};
    for (int i = 0; i < 4; ++i) gs[i].objectives = Objectives{fs[i], 10.0 - i};
    assign_ranks(gs, Mode::Single);
    CHECK(*gs[0].rank == 4);
    CHECK(*gs[1].rank == 1);
    CHECK(*gs[2].rank == 1);
    CHECK(*gs[3].rank == 3);
}

TEST_CASE("intra-niche tournament") {
    Rng rng(21);
    const Genome base = minimal_genome(1, 1, rng);
    std::vector<Genome> pool(4, base);
    for (int i = 0; i < 4; ++i) {
        pool[i].id = i + 1;
        pool[i].rank = i < 2 ? 1 : 2;
        pool[i].crowding = 0.0;
        pool[i].objectives = Objectives{1.0, 1.0};
    }
    CHECK(fitter(pool[0], pool[2]));
    CHECK(!fitter(pool[3], pool[1]));

    const std::vector<Genome> alone(1, pool[0]);
    CHECK(select_parents_intra(alone, rng) == std::pair<std::size_t, std::size_t>{0, 0});

    int rank1 = 0;
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) {
        const auto [a, b] = select_parents_intra(pool, rng);
        rank1 += a < 2;
        (void)b;
    }
    CHECK(std::abs(static_cast<double>(rank1) / draws - 0.75) <= 0.02);
}

TEST_CASE("global rank-proportionate selection") {
    Rng rng(22);
    const Genome base = minimal_genome(1, 1, rng);
    std::vector<Genome> champs(2, base);
    champs[0].rank = 1;
    champs[1].rank = 2;
    int first = 0;
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) first += select_parents_global(champs, rng).first == 0;
    CHECK(std::abs(static_cast<double>(first) / draws - 2.0 / 3.0) <= 0.02);

    std::vector<Genome> equal(4, base);
    for (auto& g : equal) g.rank = 1;
    std::vector<int> hits(4, 0);
    for (int d = 0; d < draws; ++d) ++hits[select_parents_global(equal, rng).second];
    for (int h : hits) CHECK(std::abs(h / static_cast<double>(draws) - 0.25) <= 0.02);

    CHECK_THROWS_AS(select_parents_global(std::span<const Genome>{}, rng), ConfigError);
}

TEST_CASE("crossover inherits unmatched genes from the better parent") {
    Genome a = from_genes(2, 1, {{1, 0, 3, 0.5, true}, {2, 1, 3, 0.7, true}});
    Genome b = from_genes(2, 1, {{1, 0, 3, -0.5, true}, {3, 2, 3, 0.2, true}});
    a.rank = 1;
    b.rank = 2;
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        CHECK(innovations(crossover(a, b, rng)) == std::set<Innovation>{1, 2});
        CHECK(innovations(crossover(b, a, rng)) == std::set<Innovation>{1, 2});
    }
    int from_b = 0;
    for (int trial = 0; trial < 2000; ++trial) from_b += crossover(a, b, rng).genes[0].weight == -0.5;
    CHECK(std::abs(from_b / 2000.0 - 0.5) < 0.05);
}

TEST_CASE("crossover identity and subset properties") {
    Rng rng(24);
    for (int trial = 0; trial < 200; ++trial) {
        auto gs = related_genomes(rng, 2);
        gs[0].rank = 1 + static_cast<int>(rng.index(3));
        gs[1].rank = 1 + static_cast<int>(rng.index(3));
        const Genome same = crossover(gs[0], gs[0], rng);
        CHECK(same.genes == gs[0].genes);
        CHECK(same.nodes == gs[0].nodes);

        const Genome child = crossover(gs[0], gs[1], rng);
        auto parents = innovations(gs[0]);
        const auto other = innovations(gs[1]);
        parents.insert(other.begin(), other.end());
        for (auto inn : innovations(child)) CHECK(parents.count(inn) == 1);
        CHECK(validate(child).empty());
    }
}

TEST_CASE("mutation with zero probabilities is the identity") {
    Rng rng(25);
    EvoParams p;
    p.weight_mut_prob = p.add_node_prob = p.add_edge_prob = 0.0;
    for (const auto& g : related_genomes(rng, 20)) {
        InnovationRegistry reg(1000, 1000);
        const Genome m = mutate(g, reg, p, rng);
        CHECK(m.genes == g.genes);
        CHECK(m.nodes == g.nodes);
    }
}

TEST_CASE("add-node keeps the signal path") {
    Rng rng(26);
    Genome g = minimal_genome(1, 1, rng);
    g.genes[1].enabled = false;  // bias edge off: one enabled gene
    g.genes[1].weight = 0.0;
    const double w = g.genes[0].weight;
    InnovationRegistry reg(g.max_innovation() + 1, g.first_hidden_id());
    Genome split = g;
    split.genes.erase(split.genes.begin() + 1);
    add_node(split, 0, reg);
    CHECK(split.enabled_gene_count() == 2);
    CHECK(split.genes.size() == 3);
    CHECK(split.hidden_count() == 1);
    for (double x : {-1.0, 0.3, 2.5}) {
        const double out = activate(split, Eigen::VectorXd::Constant(1, x))[0];
        CHECK(out == doctest::Approx(std::tanh(w * std::tanh(x))).epsilon(1e-14));
    }
}

TEST_CASE("innovation registry") {
    Rng rng(27);
    const Genome base = minimal_genome(3, 2, rng);
    InnovationRegistry reg(base.max_innovation() + 1, base.first_hidden_id());

    Genome a = base, b = base;
    add_node(a, 2, reg);
    add_node(b, 2, reg);
    CHECK(a.genes == b.genes);

    Genome c = base, d = base;
    add_node(c, 0, reg);
    add_node(d, 0, reg);
    const NodeId h = c.nodes.back().id;
    CHECK(d.nodes.back().id == h);
    REQUIRE(add_edge(c, 1, h, 0.3, reg));
    REQUIRE(add_edge(d, 1, h, -0.7, reg));
    CHECK(c.genes.back().innovation == d.genes.back().innovation);

    // New generation: new structures never reuse numbers.
    std::set<Innovation> issued;
    InnovationRegistry fresh(1, 100);
    for (int gen = 0; gen < 5; ++gen) {
        fresh.new_generation();
        for (NodeId o = 0; o < 6; ++o)
            for (NodeId t = 0; t < 6; ++t) {
                const Innovation i = fresh.edge(o + 10 * gen, t);
                CHECK(fresh.edge(o + 10 * gen, t) == i);
                CHECK(issued.insert(i).second);
            }
    }
}

TEST_CASE("add-edge rejects invalid edges") {
    Rng rng(28);
    Genome g = minimal_genome(2, 2, rng);
    InnovationRegistry reg(g.max_innovation() + 1, g.first_hidden_id());
    CHECK_FALSE(add_edge(g, 0, 0, 1.0, reg));                           // self loop
    CHECK_FALSE(add_edge(g, 0, g.output_id(0), 1.0, reg));              // exists
    CHECK_FALSE(add_edge(g, g.output_id(0), 1, 1.0, reg));              // into an input
    CHECK_FALSE(add_edge(g, g.output_id(0), g.output_id(1), 1.0, reg));  // from an output
    add_node(g, 0, reg);
    const NodeId h = g.first_hidden_id();
    add_node(g, g.genes.size() - 1, reg);  // splits h -> out0
    const NodeId h2 = h + 1;
    CHECK_FALSE(add_edge(g, h2, h, 1.0, reg));  // cycle
    CHECK(add_edge(g, h, g.output_id(1), 1.0, reg));
    CHECK(validate(g).empty());
}

TEST_CASE("structural mutations strictly increase complexity") {
    Rng rng(29);
    for (int chain = 0; chain < 100; ++chain) {
        Genome g = minimal_genome(1 + static_cast<int>(rng.index(8)), 1 + static_cast<int>(rng.index(3)), rng);
        CHECK(complexity(g) == 1.0);
        InnovationRegistry reg(g.max_innovation() + 1, g.first_hidden_id());
        for (int step = 0; step < 15; ++step) {
            const double before = complexity(g);
            if (rng.bernoulli(0.5)) {
                std::vector<std::size_t> enabled;
                for (std::size_t i = 0; i < g.genes.size(); ++i)
                    if (g.genes[i].enabled) enabled.push_back(i);
                add_node(g, enabled[rng.index(enabled.size())], reg);
                CHECK(complexity(g) > before);
            } else if (add_edge(g, g.nodes[rng.index(g.nodes.size())].id, g.nodes[rng.index(g.nodes.size())].id, 0.5,
                                reg)) {
                CHECK(complexity(g) > before);
            }
        }
    }
}

TEST_CASE("generation zero") {
    EvoParams p = small_params(3);
    const Population pop = initial_population(p, SpeciationParams{}, 6, 2, 99);
    CHECK(pop.genomes.size() == 30);
    std::set<double> first_weights;
    for (const auto& g : pop.genomes) {
        CHECK(g.genes.size() == 14);
        CHECK(g.hidden_count() == 0);
        first_weights.insert(g.genes[0].weight);
    }
    CHECK(first_weights.size() == 30);
}

TEST_CASE("evolve generation keeps the population size and elitism") {
    EvoParams p = small_params(0);
    Population pop = initial_population(p, SpeciationParams{}, 6, 2, 5);
    RunRecord record;
    double last_best = -1.0;
    for (int t = 0; t < 12; ++t) {
        const auto rec = evolve_generation(pop, p, SpeciationParams{}, Mode::Single, toy, record);
        CHECK(pop.genomes.size() == 30);
        CHECK(rec.best_f >= last_best);
        CHECK(rec.target_sum == 30);
        last_best = rec.best_f;
        std::size_t members = 0;
        for (const auto& n : pop.niches) members += n.members.size();
        CHECK(members == 30);
        for (const auto& g : pop.genomes) CHECK(validate(g).empty());
    }
}

TEST_CASE("single-stage runs") {
    const SpeciationParams sp;
    SUBCASE("zero generations evaluate only the initial population") {
        const auto r = run_single_stage(small_params(0), sp, 6, 2, toy, 3);
        CHECK(r.generations.size() == 1);
        CHECK(r.evaluations == 30);
    }
    SUBCASE("deterministic and elitist") {
        const auto a = run_single_stage(small_params(10), sp, 6, 2, toy, 8);
        const auto b = run_single_stage(small_params(10), sp, 6, 2, toy, 8);
        CHECK(metrics_text(a) == metrics_text(b));
        CHECK(a.generations.size() == 10);
        CHECK(a.evaluations == 300);
        for (std::size_t t = 1; t < a.generations.size(); ++t)
            CHECK(a.generations[t].best_f >= a.generations[t - 1].best_f);
    }
    SUBCASE("thread count does not change results") {
        EvoParams p = small_params(6);
        const auto a = run_single_stage(p, sp, 6, 2, toy, 4);
        p.threads = 4;
        const auto b = run_single_stage(p, sp, 6, 2, toy, 4);
        CHECK(metrics_text(a) == metrics_text(b));
    }
}

TEST_CASE("dual-stage runs") {
    const SpeciationParams sp;
    for (int gens : {1, 2, 7, 10}) {
        const auto single = run_single_stage(small_params(gens), sp, 6, 2, toy, 9);
        const auto dual = run_dual_stage(small_params(gens), sp, 6, 2, toy, 9);
        CHECK(single.evaluations == dual.evaluations);
        CHECK(dual.evaluations == 30u * gens);
        CHECK(dual.stage1_generations == (gens + 1) / 2);
        CHECK(metrics_text(dual) == metrics_text(run_dual_stage(small_params(gens), sp, 6, 2, toy, 9)));

        const int last = dual.stage1_generations - 1;
        std::vector<ParetoPoint> front;
        for (const auto& p : dual.pareto)
            if (p.generation == last) front.push_back(p);
        CHECK(!front.empty());
        for (const auto& x : front)
            for (const auto& y : front)
                CHECK_FALSE(oracle::dominates({x.f, x.g}, {y.f, y.g}));
    }
}

TEST_CASE("a failing evaluation scores zero and is logged") {
    const Evaluator flaky = [](const Genome& g, int) -> Objectives {
        if (g.id % 7 == 0) throw std::runtime_error("boom");
        return toy_objectives(g);
    };
    const auto r = run_single_stage(small_params(2), SpeciationParams{}, 6, 2, flaky, 1);
    CHECK(!r.diagnostics.empty());
    CHECK(r.diagnostics.front().find("boom") != std::string::npos);
    for (const auto& g : r.final_population.genomes)
        if (g.id % 7 == 0) CHECK(*g.objectives == Objectives{0.0, 0.0});
}
