#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mentor/rng.hpp"

namespace mentor {

using NodeId = int;
using Innovation = std::int64_t;
using GenomeId = std::uint64_t;

enum class NodeRole { Input, Bias, Output, Hidden };

struct NodeSpec {
    NodeId id = 0;
    NodeRole role = NodeRole::Hidden;

    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

/// One directed, weighted connection.
struct Gene {
    Innovation innovation = 0;
    NodeId origin = 0;
    NodeId terminal = 0;
    double weight = 0.0;
    bool enabled = true;

    friend bool operator==(const Gene&, const Gene&) = default;
};

/// Cached objective values, both maximized.
struct Objectives {
    double performance = 0.0;  // F
    double experience = 0.0;   // G

    friend bool operator==(const Objectives&, const Objectives&) = default;
};

// Node ids are laid out as: inputs [0, n_inputs), bias n_inputs, outputs
// [n_inputs + 1, n_inputs + 1 + n_outputs), hidden nodes above that.
struct Genome {
    GenomeId id = 0;
    int n_inputs = 0;
    int n_outputs = 0;
    std::vector<Gene> genes;  // kept sorted by innovation
    std::vector<NodeSpec> nodes;

    std::optional<Objectives> objectives;
    std::optional<int> rank;
    std::optional<double> crowding;

    NodeId bias_id() const { return n_inputs; }
    NodeId output_id(int k) const { return n_inputs + 1 + k; }
    NodeId first_hidden_id() const { return n_inputs + 1 + n_outputs; }

    int hidden_count() const;
    int enabled_gene_count() const;
    bool has_node(NodeId id) const;
    const Gene* find_gene(Innovation innovation) const;
    // Any gene, enabled or not, from origin to terminal.
    bool connected(NodeId origin, NodeId terminal) const;
    Innovation max_innovation() const;

    // Restores gene order by innovation and node order by id.
    void normalize();
};

/// Role of a node id under the fixed layout above.
NodeRole role_of(const Genome& g, NodeId id);

/// Fully connected inputs+bias -> outputs, weights uniform in [-1, 1].
/// Innovations are 1..(n_inputs+1)*n_outputs, input-major with the bias last.
Genome minimal_genome(int n_inputs, int n_outputs, Rng& rng);

/// Innovation number the minimal layout assigns to the (source, output) edge;
/// source index n_inputs denotes the bias.
Innovation minimal_innovation(int source_index, int output_index, int n_outputs);

/// A genome resolved into evaluation order, for repeated activation.
class Network {
public:
    /// Throws InvalidGenome when the enabled genes form a cycle.
    explicit Network(const Genome& g);
    /// Throws ShapeError on input size mismatch.
    Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd>& inputs) const;

private:
    struct Link {
        int source;  // value slot
        double weight;
    };
    struct Step {
        int slot;
        int first_link;
        int end_link;
    };
    int n_inputs_ = 0;
    int bias_id_ = 0;
    std::vector<Step> steps_;
    std::vector<Link> links_;
    std::vector<int> output_slots_;
    std::vector<int> input_slots_;  // by node id, inputs then bias
    int n_slots_ = 0;
    mutable std::vector<double> values_;  // scratch; one Network per thread
};

/// Feed-forward evaluation. Hidden and output nodes apply tanh to the
/// weighted sum of enabled incoming edges; the bias node emits 1.
/// Throws ShapeError on input size mismatch, InvalidGenome on a cycle.
Eigen::VectorXd activate(const Genome& g, const Eigen::Ref<const Eigen::VectorXd>& inputs);

/// Node evaluation order over enabled genes, or nullopt when they form a cycle.
std::optional<std::vector<NodeId>> topological_order(const Genome& g);

/// True when enabling an origin->terminal edge keeps the enabled graph acyclic.
bool edge_keeps_acyclic(const Genome& g, NodeId origin, NodeId terminal);

// Activation cost of tanh in FLOPs.
inline constexpr double kActivationFlops = 10.0;

double flops(const Genome& g);

/// FLOPs relative to the minimal network with the same input/output counts.
double complexity(const Genome& g);

enum class ViolationKind {
    Cycle,
    DanglingNode,
    DuplicateInnovation,
    SelfLoop,
    OrphanHidden,
    BadRoster,
};

struct Violation {
    ViolationKind kind;
    std::string message;
};

/// Every invariant violation found; empty means the genome is valid.
std::vector<Violation> validate(const Genome& g);

// Text format:
//   genome <id> <n_inputs> <n_outputs> <n_hidden>
//   <innovation> <origin> <terminal> <weight> <enabled>
void write_genome(std::ostream& out, const Genome& g);
Genome read_genome(std::istream& in);
void save_genome(const std::string& path, const Genome& g);
Genome load_genome(const std::string& path);

}  // namespace mentor
