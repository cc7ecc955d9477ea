#include "mentor/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "mentor/error.hpp"

namespace mentor {

void CriteriaConfig::check() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("criteria.alpha must lie in [0, 1]");
    if (max_experience_points < 2) throw ConfigError("criteria.max_experience_points must be at least 2");
}

double performance_scenario(const ScenarioResult& r) {
    if (!(r.t_total > 0.0)) throw InvalidScenario("performance_scenario: t_total must be positive");
    if (r.success) {
        const double ratio = std::clamp(r.t_remaining / r.t_total, 0.0, 1.0);
        return 1.0 + ratio;
    }
    return 1.0 / (1.0 + std::max(r.final_distance, 0.0));
}

double performance_total(std::span<const ScenarioResult> results) {
    if (results.empty()) throw ConfigError("performance_total: no scenario results");
    double total = 0.0;
    for (const auto& r : results) total += performance_scenario(r);
    return total;
}

namespace {

struct LexLess {
    const std::vector<const ExperiencePoint*>* pts;
    bool operator()(std::size_t a, std::size_t b) const {
        const auto& x = *(*pts)[a];
        const auto& y = *(*pts)[b];
        return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
    }
};

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

}  // namespace

std::vector<ExperiencePoint> experience_union(std::span<const std::vector<ExperiencePoint>> per_scenario,
                                              std::size_t cap) {
    std::vector<const ExperiencePoint*> all;
    Eigen::Index dim = -1;
    for (const auto& scenario : per_scenario) {
        for (const auto& p : scenario) {
            if (dim < 0) dim = p.size();
            if (p.size() != dim) throw ShapeError("experience_union: experience points differ in dimension");
            all.push_back(&p);
        }
    }

    std::set<std::size_t, LexLess> seen(LexLess{&all});
    std::vector<ExperiencePoint> unique;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (seen.insert(i).second) unique.push_back(*all[i]);

    if (cap == 0 || unique.size() <= cap) return unique;
    std::vector<ExperiencePoint> kept;
    kept.reserve(cap);
    const std::size_t n = unique.size();
    for (std::size_t i = 0; i < cap; ++i) kept.push_back(std::move(unique[i * n / cap]));
    return kept;
}

double mst_total_weight(std::span<const ExperiencePoint> points) {
    const std::size_t n = points.size();
    if (n < 2) return 0.0;

    const Eigen::Index dim = points.front().size();
    Eigen::MatrixXd cols(dim, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) cols.col(static_cast<Eigen::Index>(i)) = points[i];

    // Sorted by squared length; the square root is taken only for tree edges.
    struct Edge {
        double w2;
        std::uint32_t a, b;
    };
    std::vector<Edge> edges;
    edges.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const auto pi = cols.col(static_cast<Eigen::Index>(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w2 = (pi - cols.col(static_cast<Eigen::Index>(j))).squaredNorm();
            edges.push_back({w2, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        }
    }
    const auto shorter = [](const Edge& x, const Edge& y) {
        if (x.w2 != y.w2) return x.w2 < y.w2;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    };

    // Edges are consumed in sorted order, but only the prefix actually
    // reached is sorted: chunks are selected with nth_element, then sorted.
    DisjointSets components(n);
    double total = 0.0;
    std::size_t taken = 0;
    std::size_t begin = 0;
    std::size_t chunk = 4 * n;
    while (taken < n - 1 && begin < edges.size()) {
        const std::size_t end = std::min(edges.size(), begin + chunk);
        if (end < edges.size()) std::nth_element(edges.begin() + begin, edges.begin() + end, edges.end(), shorter);
        std::sort(edges.begin() + begin, edges.begin() + end, shorter);
        for (std::size_t k = begin; k < end && taken < n - 1; ++k) {
            if (components.unite(edges[k].a, edges[k].b)) {
                total += std::sqrt(edges[k].w2);
                ++taken;
            }
        }
        begin = end;
        chunk *= 2;
    }
    return total;
}

double experience_gain(std::span<const std::vector<ExperiencePoint>> per_scenario, const CriteriaConfig& cfg) {
    const auto pts = experience_union(per_scenario, cfg.max_experience_points);
    return mst_total_weight(pts);
}

void write_experience_csv(std::ostream& out, std::span<const ExperiencePoint> points) {
    const Eigen::Index dim = points.empty() ? 0 : points.front().size();
    for (Eigen::Index d = 0; d < dim; ++d) out << (d ? "," : "") << 'v' << d;
    out << '\n';
    const auto old_precision = out.precision(17);
    for (const auto& p : points) {
        for (Eigen::Index d = 0; d < p.size(); ++d) out << (d ? "," : "") << p[d];
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace mentor
