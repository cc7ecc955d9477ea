#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mentor/genome.hpp"
#include "mentor/rng.hpp"

namespace mentor {

/// Coefficients of the genome distance and the niche-membership threshold.
struct SpeciationParams {
    double c1 = 1.0;  // excess genes
    double c2 = 1.0;  // disjoint genes
    double c3 = 0.4;  // summed weight differences of matching genes
    double compat_threshold = 3.0;

    void check() const;
};

/// Reproduction settings. Defaults are the shared values; the structural
/// mutation rates differ per robot, see ugv() and swarm().
struct EvoParams {
    int pop_size = 100;
    int max_generations = 50;
    double elitist_fraction = 0.02;
    double crossover_prob = 0.85;
    double weight_mut_prob = 0.25;
    double add_node_prob = 0.05;
    double add_edge_prob = 0.03;
    // Worker threads for candidate evaluation. Results do not depend on it.
    int threads = 1;

    static EvoParams ugv();
    static EvoParams swarm();
    void check() const;
    int elite_count() const;
};

// Weight perturbation details.
inline constexpr double kWeightSigma = 0.5;
inline constexpr double kWeightReplaceProb = 0.1;
inline constexpr double kWeightReplaceRange = 2.0;
// Cap on candidate node pairs examined by edge addition.
inline constexpr int kMaxEdgeCandidates = 20;
// Genomes smaller than this use N = 1 in the distance.
inline constexpr int kDistanceSmallGenome = 20;

/// Issues innovation numbers and hidden node ids. Within one generation an
/// identical structural change receives the same numbers; numbers are never
/// reused for a different structure.
class InnovationRegistry {
public:
    InnovationRegistry() = default;
    InnovationRegistry(Innovation next_innovation, NodeId next_node)
        : next_innovation_(next_innovation), next_node_(next_node) {}

    Innovation edge(NodeId origin, NodeId terminal);
    /// Hidden node that splits the gene with this innovation.
    NodeId split_node(Innovation gene);
    /// A node id never handed out before.
    NodeId fresh_node() { return next_node_++; }
    /// Forgets this generation's structures; counters keep increasing.
    void new_generation();

    Innovation next_innovation() const { return next_innovation_; }
    NodeId next_node() const { return next_node_; }

private:
    std::map<std::pair<NodeId, NodeId>, Innovation> edges_;
    std::map<Innovation, NodeId> splits_;
    Innovation next_innovation_ = 1;
    NodeId next_node_ = 0;
};

struct Niche {
    int id = 0;
    Genome representative;
    std::vector<GenomeId> members;
    double size_target = 0.0;  // unrounded
};

struct Population {
    std::vector<Genome> genomes;
    std::vector<Niche> niches;
    int generation = 0;
    InnovationRegistry registry;
    Rng rng;
    GenomeId next_genome_id = 1;
    int next_niche_id = 1;

    const Genome& genome(GenomeId id) const;
    int niche_of(GenomeId id) const;
};

enum class Mode { Multi, Single };

/// Candidate evaluation: returns (F, G) for a genome in a given generation.
/// Must be thread-safe when EvoParams::threads > 1.
using Evaluator = std::function<Objectives(const Genome&, int generation)>;

// ---- distance and speciation -------------------------------------------

/// c1*E/N + c2*J/N + c3*W, where E and J count excess and disjoint genes,
/// W sums |weight difference| over matching genes and N is the larger gene
/// count (1 when both genomes have fewer than 20 genes).
double distance(const Genome& a, const Genome& b, const SpeciationParams& p);

/// Places every genome in the first niche whose representative lies within
/// the threshold, founding a new niche otherwise. Empty niches are dropped
/// and each surviving niche draws its next representative from its members.
void speciate(Population& pop, const SpeciationParams& p);

// ---- ranking -------------------------------------------------------------

/// Pareto rank (1 = non-dominated) of each point, both objectives maximized.
std::vector<int> nondominated_sort(std::span<const Objectives> points);

/// Crowding distance of each point of one front; boundary points get +inf.
std::vector<double> crowding_distance(std::span<const Objectives> front);

/// Sets rank and crowding on every genome. Multi: Pareto rank with
/// per-front crowding. Single: 1 + number of genomes with strictly larger F,
/// crowding 0.
void assign_ranks(std::vector<Genome>& genomes, Mode mode);

/// Strict "a is fitter than b": lower rank, then larger crowding, then
/// larger F, then smaller id.
bool fitter(const Genome& a, const Genome& b);

// ---- niche sizing ----------------------------------------------------------

/// Rank-derived scalar fitness: 1/rank scaled by (1 + c/(1+c)) for finite
/// crowding c, or doubled for infinite crowding.
double rank_fitness(int rank, double crowding);

/// Desired niche sizes from shared fitness, summing to pop_size. Also stores
/// each niche's unrounded target. Niche order matches pop.niches.
std::vector<double> niche_size_targets(Population& pop, int pop_size);

/// Integer apportionment of `total` proportional to `weights` by largest
/// remainders; ties go to the lower index.
std::vector<int> largest_remainder(std::span<const double> weights, int total);

/// Rounded niche size targets summing to pop_size.
std::vector<int> resize_niches(Population& pop, int pop_size);

// ---- selection -------------------------------------------------------------

/// Two binary tournaments (with replacement) over `pool`; returns indices.
std::pair<std::size_t, std::size_t> select_parents_intra(std::span<const Genome> pool, Rng& rng);

/// Two independent draws with probability proportional to 1/rank.
/// Throws ConfigError on an empty list.
std::pair<std::size_t, std::size_t> select_parents_global(std::span<const Genome> champions, Rng& rng);

// ---- variation ---------------------------------------------------------------

/// Matching genes come from either parent with equal odds; excess and
/// disjoint genes come from the better-ranked parent (a random one on equal
/// ranks). Inherited genes that would close a cycle are disabled.
Genome crossover(const Genome& a, const Genome& b, Rng& rng);

/// Splits the gene at `gene_index`: the gene is disabled and replaced by
/// origin->new (weight 1) and new->terminal (old weight).
void add_node(Genome& g, std::size_t gene_index, InnovationRegistry& registry);

/// Adds an enabled origin->terminal gene. Returns false (and leaves g
/// unchanged) when the nodes are already connected, the terminal is an
/// input or bias, or the edge would close a cycle.
bool add_edge(Genome& g, NodeId origin, NodeId terminal, double weight, InnovationRegistry& registry);

/// Per-gene weight perturbation and node insertion, then edge addition over
/// min(|genes|, 20) sampled node pairs.
Genome mutate(const Genome& g, InnovationRegistry& registry, const EvoParams& params, Rng& rng);

// ---- generation loop -------------------------------------------------------

struct GenerationRecord {
    int generation = 0;
    Mode mode = Mode::Single;
    double best_f = 0.0;
    double mean_f = 0.0;
    double best_g = 0.0;
    double mean_g = 0.0;
    int n_niches = 0;
    double max_niche_frac = 0.0;
    std::vector<std::pair<int, int>> niche_sizes;  // (niche id, member count)
    int target_sum = 0;
};

struct ParetoPoint {
    int generation = 0;
    GenomeId genome_id = 0;
    double f = 0.0;
    double g = 0.0;
    double complexity = 0.0;
};

struct RunRecord {
    std::vector<GenerationRecord> generations;
    std::vector<ParetoPoint> pareto;  // rank-1 front of every multi-objective generation
    Population final_population;
    std::vector<std::string> diagnostics;
    std::uint64_t evaluations = 0;  // evaluator calls
    int stage1_generations = 0;     // dual-stage only

    const Genome& champion() const;
};

/// Generation zero: pop_size minimal genomes with independent weights,
/// speciated.
Population initial_population(const EvoParams& params, const SpeciationParams& sp, int n_inputs, int n_outputs,
                              std::uint64_t seed);

/// Evaluates every genome (a throwing evaluator scores (0, 0) and is
/// logged to `diagnostics`). Returns the number of evaluator calls.
std::uint64_t evaluate_population(Population& pop, const Evaluator& evaluator, int threads,
                                  std::vector<std::string>* diagnostics = nullptr);

/// Replaces the evaluated, ranked population with the next generation:
/// elites, per-niche offspring, one champion-offspring round, re-speciation.
void reproduce(Population& pop, const EvoParams& params, const SpeciationParams& sp);

/// Evaluate, rank, record, reproduce. Returns the record of the evaluated
/// population (before reproduction).
GenerationRecord evolve_generation(Population& pop, const EvoParams& params, const SpeciationParams& sp, Mode mode,
                                   const Evaluator& evaluator, RunRecord& record);

/// Evaluates and ranks the current population without reproducing and
/// appends its record.
GenerationRecord finish_generation(Population& pop, const EvoParams& params, Mode mode, const Evaluator& evaluator,
                                   RunRecord& record);

/// Evaluates max_generations single-objective generations (at least the
/// initial population when max_generations is 0).
RunRecord run_single_stage(const EvoParams& params, const SpeciationParams& sp, int n_inputs, int n_outputs,
                           const Evaluator& evaluator, std::uint64_t seed);

/// ceil(max_generations / 2) multi-objective generations, then the best
/// half by F seeds the single-objective remainder. Evaluates exactly as many
/// populations as run_single_stage.
RunRecord run_dual_stage(const EvoParams& params, const SpeciationParams& sp, int n_inputs, int n_outputs,
                         const Evaluator& evaluator, std::uint64_t seed);

// CSV writers.
void write_metrics_csv(std::ostream& out, const RunRecord& record);
void write_niche_csv(std::ostream& out, const RunRecord& record);
void write_pareto_csv(std::ostream& out, std::span<const ParetoPoint> points);

}  // namespace mentor
