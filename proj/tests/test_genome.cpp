#include <cmath>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "mentor/error.hpp"
#include "mentor/evolution.hpp"
#include "mentor/genome.hpp"
#include "oracles.hpp"

using namespace mentor;

namespace {

bool has_violation(const Genome& g, ViolationKind kind) {
    for (const auto& v : validate(g))
        if (v.kind == kind) return true;
    return false;
}

Genome single_edge(double w) {
    Rng rng(1);
    Genome g = minimal_genome(1, 1, rng);
    g.genes[0].weight = w;
    g.genes[1].weight = 0.0;
    return g;
}

}  // namespace

TEST_CASE("minimal genome gene and node counts") {
    Rng rng(3);
    const Genome a = minimal_genome(2, 1, rng);
    CHECK(a.genes.size() == 3);
    CHECK(a.nodes.size() == 4);
    CHECK(minimal_genome(11, 2, rng).genes.size() == 24);
    CHECK(minimal_genome(6, 2, rng).genes.size() == 14);
}

TEST_CASE("minimal genome layout") {
    Rng rng(4);
    const Genome g = minimal_genome(3, 2, rng);
    for (std::size_t i = 0; i < g.genes.size(); ++i) {
        const auto& gene = g.genes[i];
        CHECK(gene.innovation == static_cast<Innovation>(i + 1));
        CHECK(gene.weight >= -1.0);
        CHECK(gene.weight <= 1.0);
        CHECK(gene.enabled);
        CHECK(role_of(g, gene.terminal) == NodeRole::Output);
        CHECK(gene.innovation == minimal_innovation(gene.origin, gene.terminal - g.output_id(0), g.n_outputs));
    }
    CHECK(g.hidden_count() == 0);
    CHECK_THROWS_AS(minimal_genome(0, 1, rng), ConfigError);
}

TEST_CASE("validate accepts minimal genomes of every size up to 64") {
    Rng rng(5);
    for (int n_in = 1; n_in <= 64; n_in += 7) {
        for (int n_out = 1; n_out <= 64; n_out += 9) CHECK(validate(minimal_genome(n_in, n_out, rng)).empty());
    }
    CHECK(validate(minimal_genome(64, 64, rng)).empty());
}

TEST_CASE("validate reports cycles and dangling nodes") {
    Rng rng(6);
    Genome g = minimal_genome(2, 1, rng);
    InnovationRegistry reg(g.max_innovation() + 1, g.first_hidden_id());
    add_node(g, 0, reg);
    const NodeId h = g.first_hidden_id();
    // output -> hidden closes hidden -> output -> hidden.
    g.genes.push_back({100, g.output_id(0), h, 0.5, true});
    g.normalize();
    CHECK(has_violation(g, ViolationKind::Cycle));
    CHECK_THROWS_AS(activate(g, Eigen::VectorXd::Zero(2)), InvalidGenome);

    Genome d = minimal_genome(2, 1, rng);
    d.genes.push_back({50, 0, 77, 0.1, true});
    CHECK(has_violation(d, ViolationKind::DanglingNode));

    Genome dup = minimal_genome(2, 1, rng);
    dup.genes[1].innovation = dup.genes[0].innovation;
    CHECK(has_violation(dup, ViolationKind::DuplicateInnovation));
}

TEST_CASE("activation examples") {
    Rng rng(7);
    Genome zero = minimal_genome(1, 1, rng);
    for (auto& gene : zero.genes) gene.weight = 0.0;
    CHECK(activate(zero, Eigen::VectorXd::Constant(1, 3.7))[0] == 0.0);

    for (double w : {-1.5, 0.3, 2.0}) {
        for (double x : {-2.0, 0.25, 1.0}) {
            CHECK(activate(single_edge(w), Eigen::VectorXd::Constant(1, x))[0] == doctest::Approx(std::tanh(w * x)));
        }
    }
    CHECK_THROWS_AS(activate(zero, Eigen::VectorXd::Zero(2)), ShapeError);
}

TEST_CASE("activation matches the recursive evaluator") {
    Rng rng(8);
    for (int trial = 0; trial < 300; ++trial) {
        const Genome g = oracle::random_genome(rng);
        REQUIRE(validate(g).empty());
        Eigen::VectorXd x(g.n_inputs);
        for (int i = 0; i < g.n_inputs; ++i) x[i] = rng.uniform(-3.0, 3.0);
        const Eigen::VectorXd y = activate(g, x);
        const Eigen::VectorXd ref = oracle::RecursiveNet(g, x).outputs();
        for (int k = 0; k < g.n_outputs; ++k) {
            CHECK(std::abs(y[k] - ref[k]) <= 1e-12 * std::max(1.0, std::abs(ref[k])));
            CHECK(std::abs(y[k]) <= 1.0);
        }
        const Eigen::VectorXd again = activate(g, x);
        CHECK(std::memcmp(y.data(), again.data(), sizeof(double) * y.size()) == 0);
    }
}

TEST_CASE("complexity") {
    Rng rng(9);
    for (auto [n_in, n_out] : {std::pair{2, 1}, {11, 2}, {6, 2}, {1, 5}}) {
        Genome g = minimal_genome(n_in, n_out, rng);
        CHECK(complexity(g) == 1.0);

        const double e = static_cast<double>(g.genes.size());
        InnovationRegistry reg(g.max_innovation() + 1, g.first_hidden_id());
        Genome split = g;
        add_node(split, 0, reg);
        const double expected = (2.0 * (e - 1 + 2) + kActivationFlops * (n_out + 1)) / (2.0 * e + kActivationFlops * n_out);
        CHECK(complexity(split) == doctest::Approx(expected).epsilon(1e-15));

        Genome off = g;
        off.genes[0].enabled = false;
        CHECK(complexity(off) < complexity(g));
    }
}

TEST_CASE("genome text round trip is exact") {
    Rng rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        Genome g = oracle::random_genome(rng);
        g.id = 1000 + trial;
        std::stringstream first;
        write_genome(first, g);
        const Genome back = read_genome(first);
        CHECK(back.id == g.id);
        CHECK(back.genes == g.genes);
        CHECK(back.nodes == g.nodes);
        std::stringstream second;
        write_genome(second, back);
        CHECK(second.str() == first.str());
    }
}

TEST_CASE("genome parser rejects malformed input") {
    std::istringstream bad_header("genom 1 2 1 0\n");
    CHECK_THROWS_AS(read_genome(bad_header), ParseError);
    std::istringstream bad_gene("genome 1 2 1 0\n1 0 3 0.5\n");
    CHECK_THROWS_AS(read_genome(bad_gene), ParseError);
    std::istringstream bad_hidden("genome 1 2 1 2\n1 0 4 0.5 1\n2 4 3 0.5 1\n");
    CHECK_THROWS_AS(read_genome(bad_hidden), ParseError);
    CHECK_THROWS_AS(load_genome("/nonexistent/x.genome"), Error);
}
