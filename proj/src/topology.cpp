#include "topobias/topology.hpp"

#include <cmath>
#include <stdexcept>

namespace topobias {

double euclidean_distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

std::vector<double> pairwise_distances(const Topology& t) {
    const std::size_t n = t.node_count();
    std::vector<double> out;
    if (n < 2) return out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t a = 0; a + 1 < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            out.push_back(euclidean_distance(t.nodes[a], t.nodes[b]));
    return out;
}

std::vector<std::size_t> neighbours(const Topology& t, std::size_t a, double r) {
    if (a >= t.node_count())
        throw std::out_of_range("neighbours: node id " + std::to_string(a) +
                                " out of range for " + std::to_string(t.node_count()) + " nodes");
    if (!(r > 0.0)) throw std::invalid_argument("neighbours: radius must be positive");
    std::vector<std::size_t> out;
    const Point& p = t.nodes[a];
    const double r2 = r * r;
    for (std::size_t b = 0; b < t.node_count(); ++b) {
        if (b == a) continue;
        const double dx = t.nodes[b].x - p.x;
        const double dy = t.nodes[b].y - p.y;
        if (dx * dx + dy * dy < r2) out.push_back(b);
    }
    return out;
}

void RadiiConfig::validate() const {
    if (radii.empty()) throw std::invalid_argument("radii: at least one radius is required");
    double prev = 0.0;
    for (double r : radii) {
        if (!(r > prev))
            throw std::invalid_argument("radii: values must be positive and strictly increasing");
        prev = r;
    }
}

void ExperimentConfig::validate() const {
    if (!(area_side > 0.0)) throw std::invalid_argument("config: area_side must be positive");
    if (nodes_per_topology < 1)
        throw std::invalid_argument("config: nodes_per_topology must be at least 1");
    if (topologies_per_generator < 1)
        throw std::invalid_argument("config: topologies_per_generator must be at least 1");
    radii.validate();
    if (!(radii.radii.back() < area_side))
        throw std::invalid_argument("config: largest radius must be smaller than area_side");
    if (quadrat_divisions < 1)
        throw std::invalid_argument("config: quadrat_divisions must be at least 1");
    if (folds < 2) throw std::invalid_argument("config: folds must be at least 2");
    if (!(quantization_step > 0.0))
        throw std::invalid_argument("config: quantization_step must be positive");
}

ValidationResult validate_topology(const Topology& t) {
    ValidationResult res;
    if (!(t.area_side > 0.0)) {
        res.violations.push_back("area_side must be positive");
        return res;
    }
    for (std::size_t i = 0; i < t.node_count(); ++i) {
        const Point& p = t.nodes[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            res.violations.push_back("node " + std::to_string(i) + ": coordinate not finite");
        else if (p.x < 0.0 || p.x > t.area_side || p.y < 0.0 || p.y > t.area_side)
            res.violations.push_back("node " + std::to_string(i) + ": coordinate outside [0, " +
                                     std::to_string(t.area_side) + "]^2");
    }
    return res;
}

}  // namespace topobias
