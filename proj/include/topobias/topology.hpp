#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace topobias {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double euclidean_distance(const Point& a, const Point& b);

// Node placement on the square [0, D] x [0, D]. Node ids are the vector
// indices. seed is absent for imported topologies.
struct Topology {
    std::string id;
    std::string generator_label;
    double area_side = 0.0;  // D
    std::vector<Point> nodes;
    std::optional<std::uint64_t> seed;

    std::size_t node_count() const { return nodes.size(); }
};

// All N(N-1)/2 distances ordered by (a, b) with a < b, a ascending first.
std::vector<double> pairwise_distances(const Topology& t);

// Ids of nodes strictly within r of node a, ascending; a itself is excluded
// even if another node coincides with it. Throws std::out_of_range for a bad
// node id and std::invalid_argument for r <= 0.
std::vector<std::size_t> neighbours(const Topology& t, std::size_t a, double r);

struct RadiiConfig {
    std::vector<double> radii;  // strictly increasing, all positive

    std::size_t count() const { return radii.size(); }
    // throws std::invalid_argument unless 0 < r_0 < r_1 < ... holds
    void validate() const;
};

// Parameters shared by extraction, bias and classification runs.
struct ExperimentConfig {
    double area_side = 1000.0;                  // D
    std::size_t nodes_per_topology = 1000;      // N
    std::size_t topologies_per_generator = 1000;
    RadiiConfig radii{{5, 10, 20, 30, 40, 60, 80, 100}};
    std::size_t quadrat_divisions = 10;         // d
    std::size_t folds = 10;                     // k
    std::uint64_t base_seed = 1;
    double quantization_step = 1.0;

    // throws std::invalid_argument on any violated invariant
    void validate() const;
};

struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Checks coordinate bounds, finiteness and a positive area side. Reports all
// violations, one message per offending node.
ValidationResult validate_topology(const Topology& t);

}  // namespace topobias
