#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <ostream>
#include <thread>

#include "mentor/error.hpp"
#include "mentor/evolution.hpp"

namespace mentor {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("evo.") + name + " must lie in [0, 1]");
}

GenerationRecord summarize(const Population& pop, Mode mode, int target_sum) {
    GenerationRecord rec;
    rec.generation = pop.generation;
    rec.mode = mode;
    rec.best_f = -std::numeric_limits<double>::infinity();
    rec.best_g = -std::numeric_limits<double>::infinity();
    for (const auto& g : pop.genomes) {
        const auto& o = *g.objectives;
        rec.best_f = std::max(rec.best_f, o.performance);
        rec.best_g = std::max(rec.best_g, o.experience);
        rec.mean_f += o.performance;
        rec.mean_g += o.experience;
    }
    rec.mean_f /= static_cast<double>(pop.genomes.size());
    rec.mean_g /= static_cast<double>(pop.genomes.size());
    rec.n_niches = static_cast<int>(pop.niches.size());
    for (const auto& n : pop.niches) {
        const int size = static_cast<int>(n.members.size());
        rec.niche_sizes.emplace_back(n.id, size);
        rec.max_niche_frac = std::max(rec.max_niche_frac, static_cast<double>(size) / pop.genomes.size());
    }
    rec.target_sum = target_sum;
    return rec;
}

void record_front(const Population& pop, RunRecord& record) {
    for (const auto& g : pop.genomes) {
        if (g.rank == 1) {
            record.pareto.push_back(
                {pop.generation, g.id, g.objectives->performance, g.objectives->experience, complexity(g)});
        }
    }
}

std::vector<const Genome*> by_fitness(const Population& pop) {
    std::vector<const Genome*> order;
    for (const auto& g : pop.genomes) order.push_back(&g);
    std::sort(order.begin(), order.end(), [](const Genome* a, const Genome* b) { return fitter(*a, *b); });
    return order;
}

Genome fresh_child(Genome child, Population& pop) {
    child.id = pop.next_genome_id++;
    child.objectives.reset();
    child.rank.reset();
    child.crowding.reset();
    return child;
}

}  // namespace

EvoParams EvoParams::ugv() {
    EvoParams p;
    p.add_node_prob = 0.05;
    p.add_edge_prob = 0.03;
    return p;
}

EvoParams EvoParams::swarm() {
    EvoParams p;
    p.add_node_prob = 0.08;
    p.add_edge_prob = 0.5;
    return p;
}

void EvoParams::check() const {
    if (pop_size < 4) throw ConfigError("evo.pop_size must be at least 4");
    if (max_generations < 0) throw ConfigError("evo.max_generations must be non-negative");
    check_probability(elitist_fraction, "elitist_fraction");
    check_probability(crossover_prob, "crossover_prob");
    check_probability(weight_mut_prob, "weight_mut_prob");
    check_probability(add_node_prob, "add_node_prob");
    check_probability(add_edge_prob, "add_edge_prob");
    if (threads < 1) throw ConfigError("evo.threads must be at least 1");
}

int EvoParams::elite_count() const {
    const int n = static_cast<int>(std::lround(elitist_fraction * pop_size));
    return std::clamp(n, 1, pop_size);
}

const Genome& RunRecord::champion() const {
    const auto& genomes = final_population.genomes;
    if (genomes.empty()) throw Error("run record has no final population");
    // Best F; ties broken by the lower id.
    return *std::min_element(genomes.begin(), genomes.end(), [](const Genome& a, const Genome& b) {
        const double fa = a.objectives ? a.objectives->performance : -1.0;
        const double fb = b.objectives ? b.objectives->performance : -1.0;
        if (fa != fb) return fa > fb;
        return a.id < b.id;
    });
}

Population initial_population(const EvoParams& params, const SpeciationParams& sp, int n_inputs, int n_outputs,
                              std::uint64_t seed) {
    params.check();
    sp.check();
    Population pop;
    pop.rng = Rng(seed);
    for (int i = 0; i < params.pop_size; ++i) {
        Genome g = minimal_genome(n_inputs, n_outputs, pop.rng);
        g.id = pop.next_genome_id++;
        pop.genomes.push_back(std::move(g));
    }
    pop.registry = InnovationRegistry(static_cast<Innovation>(n_inputs + 1) * n_outputs + 1, n_inputs + 1 + n_outputs);
    speciate(pop, sp);
    return pop;
}

std::uint64_t evaluate_population(Population& pop, const Evaluator& evaluator, int threads,
                                  std::vector<std::string>* diagnostics) {
    const std::size_t n = pop.genomes.size();
    std::vector<std::string> failures(n);
    auto work = [&](std::size_t i) {
        try {
            pop.genomes[i].objectives = evaluator(pop.genomes[i], pop.generation);
        } catch (const std::exception& e) {
            pop.genomes[i].objectives = Objectives{0.0, 0.0};
            failures[i] = "generation " + std::to_string(pop.generation) + ", genome " +
                          std::to_string(pop.genomes[i].id) + ": evaluation failed: " + e.what();
        }
    };
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        const int count = std::min<int>(threads, static_cast<int>(n));
        for (int t = 0; t < count; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) work(i);
            });
        }
    }
    for (auto& f : failures)
        if (!f.empty() && diagnostics) diagnostics->push_back(std::move(f));
    return n;
}

void reproduce(Population& pop, const EvoParams& params, const SpeciationParams& sp) {
    const int n = params.pop_size;
    pop.registry.new_generation();

    const auto order = by_fitness(pop);
    const int n_elite = std::min<int>(params.elite_count(), static_cast<int>(order.size()));
    std::vector<Genome> next;
    std::set<GenomeId> elite_ids;
    for (int i = 0; i < n_elite; ++i) {
        next.push_back(*order[i]);
        elite_ids.insert(order[i]->id);
    }

    const auto targets = resize_niches(pop, n);
    const int n_champ = std::min<int>(static_cast<int>(pop.niches.size()), n - n_elite);
    const int budget = n - n_elite - n_champ;
    std::vector<double> weights(targets.begin(), targets.end());
    const auto offspring = largest_remainder(weights, budget);

    std::vector<Genome> champions;
    for (std::size_t ni = 0; ni < pop.niches.size(); ++ni) {
        const auto& niche = pop.niches[ni];
        std::vector<Genome> pool;
        for (GenomeId id : niche.members) pool.push_back(pop.genome(id));
        std::sort(pool.begin(), pool.end(), fitter);
        champions.push_back(pool.front());

        // Truncate worst-first (elites stay) or refill with mutated copies.
        const auto target = static_cast<std::size_t>(targets[ni]);
        if (pool.size() > target) {
            std::vector<Genome> kept;
            for (std::size_t k = 0; k < pool.size(); ++k) {
                if (k < target || elite_ids.count(pool[k].id)) kept.push_back(std::move(pool[k]));
            }
            pool = std::move(kept);
            if (pool.empty()) pool.push_back(champions.back());
        } else {
            const std::size_t members = pool.size();
            for (std::size_t k = 0; pool.size() < target; k = (k + 1) % members) {
                Genome copy = mutate(pool[k], pop.registry, params, pop.rng);
                copy.id = pool[k].id;
                copy.rank = pool[k].rank;
                copy.crowding = pool[k].crowding;
                copy.objectives = pool[k].objectives;
                pool.push_back(std::move(copy));
            }
        }

        for (int c = 0; c < offspring[ni]; ++c) {
            const auto [i, j] = select_parents_intra(pool, pop.rng);
            Genome child = pop.rng.bernoulli(params.crossover_prob) ? crossover(pool[i], pool[j], pop.rng) : pool[i];
            child = mutate(child, pop.registry, params, pop.rng);
            next.push_back(fresh_child(std::move(child), pop));
        }
    }

    for (int c = 0; c < n_champ; ++c) {
        const auto [i, j] = select_parents_global(champions, pop.rng);
        Genome child =
            pop.rng.bernoulli(params.crossover_prob) ? crossover(champions[i], champions[j], pop.rng) : champions[i];
        child = mutate(child, pop.registry, params, pop.rng);
        next.push_back(fresh_child(std::move(child), pop));
    }

    for (auto& g : next) {
        g.objectives.reset();
        g.rank.reset();
        g.crowding.reset();
    }
    pop.genomes = std::move(next);
    ++pop.generation;
    speciate(pop, sp);
}

GenerationRecord finish_generation(Population& pop, const EvoParams& params, Mode mode, const Evaluator& evaluator,
                                   RunRecord& record) {
    record.evaluations += evaluate_population(pop, evaluator, params.threads, &record.diagnostics);
    assign_ranks(pop.genomes, mode);
    const auto targets = resize_niches(pop, params.pop_size);
    const int target_sum = std::accumulate(targets.begin(), targets.end(), 0);
    if (mode == Mode::Multi) record_front(pop, record);
    record.generations.push_back(summarize(pop, mode, target_sum));
    return record.generations.back();
}

GenerationRecord evolve_generation(Population& pop, const EvoParams& params, const SpeciationParams& sp, Mode mode,
                                   const Evaluator& evaluator, RunRecord& record) {
    GenerationRecord rec = finish_generation(pop, params, mode, evaluator, record);
    reproduce(pop, params, sp);
    return rec;
}

RunRecord run_single_stage(const EvoParams& params, const SpeciationParams& sp, int n_inputs, int n_outputs,
                           const Evaluator& evaluator, std::uint64_t seed) {
    RunRecord record;
    Population pop = initial_population(params, sp, n_inputs, n_outputs, seed);
    for (int t = 1; t < params.max_generations; ++t) evolve_generation(pop, params, sp, Mode::Single, evaluator, record);
    finish_generation(pop, params, Mode::Single, evaluator, record);
    record.final_population = std::move(pop);
    return record;
}

RunRecord run_dual_stage(const EvoParams& params, const SpeciationParams& sp, int n_inputs, int n_outputs,
                         const Evaluator& evaluator, std::uint64_t seed) {
    RunRecord record;
    Population pop = initial_population(params, sp, n_inputs, n_outputs, seed);
    const int stage1 = std::max(1, (params.max_generations + 1) / 2);
    const int stage2 = std::max(0, params.max_generations - stage1);
    record.stage1_generations = stage1;

    for (int t = 1; t < stage1; ++t) evolve_generation(pop, params, sp, Mode::Multi, evaluator, record);
    finish_generation(pop, params, Mode::Multi, evaluator, record);

    if (stage2 > 0) {
        // Hand-off: the better half by F seeds stage 2; mutated copies refill it.
        // This transition counts as the first stage-2 generation.
        assign_ranks(pop.genomes, Mode::Single);
        auto order = by_fitness(pop);
        const std::size_t keep = (pop.genomes.size() + 1) / 2;
        std::vector<Genome> next;
        for (std::size_t i = 0; i < keep; ++i) next.push_back(*order[i]);
        pop.registry.new_generation();
        for (std::size_t k = 0; next.size() < static_cast<std::size_t>(params.pop_size); k = (k + 1) % keep) {
            next.push_back(fresh_child(mutate(next[k], pop.registry, params, pop.rng), pop));
        }
        for (auto& g : next) {
            g.objectives.reset();
            g.rank.reset();
            g.crowding.reset();
        }
        pop.genomes = std::move(next);
        ++pop.generation;
        speciate(pop, sp);

        for (int t = 1; t < stage2; ++t) evolve_generation(pop, params, sp, Mode::Single, evaluator, record);
        finish_generation(pop, params, Mode::Single, evaluator, record);
    }
    record.final_population = std::move(pop);
    return record;
}

void write_metrics_csv(std::ostream& out, const RunRecord& record) {
    out << "generation,best_F,mean_F,best_G,mean_G,n_niches,max_niche_frac\n";
    const auto old_precision = out.precision(17);
    for (const auto& r : record.generations) {
        out << r.generation << ',' << r.best_f << ',' << r.mean_f << ',' << r.best_g << ',' << r.mean_g << ','
            << r.n_niches << ',' << r.max_niche_frac << '\n';
    }
    out.precision(old_precision);
}

void write_niche_csv(std::ostream& out, const RunRecord& record) {
    out << "generation,niche_id,size,fraction\n";
    const auto old_precision = out.precision(17);
    for (const auto& r : record.generations) {
        int total = 0;
        for (const auto& [id, size] : r.niche_sizes) total += size;
        for (const auto& [id, size] : r.niche_sizes) {
            out << r.generation << ',' << id << ',' << size << ',' << static_cast<double>(size) / total << '\n';
        }
    }
    out.precision(old_precision);
}

void write_pareto_csv(std::ostream& out, std::span<const ParetoPoint> points) {
    out << "generation,genome_id,F,G,complexity\n";
    const auto old_precision = out.precision(17);
    for (const auto& p : points) {
        out << p.generation << ',' << p.genome_id << ',' << p.f << ',' << p.g << ',' << p.complexity << '\n';
    }
    out.precision(old_precision);
}

}  // namespace mentor
