#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "topobias/topology.hpp"

namespace topobias {

enum class FeatureGroup { internode, spatial, density, shared, clustering };

std::string to_string(FeatureGroup group);

struct FeatureDescriptor {
    std::size_t index = 0;
    FeatureGroup group = FeatureGroup::internode;
    std::string statistic;          // min | max | range | mode | mode_count | mean | std | avg
    std::optional<double> radius;   // present for the per-radius groups
    std::string name;               // "internode.std", "density.avg@20", ...
};

// Fixed slot layout of a feature vector: 7 internode-distance statistics,
// 5 quadrat-count statistics, then per-radius averages of node density,
// shared-neighbour count and clustering coefficient, radii ascending within
// each group. Total size 12 + 3 * |radii|.
class FeatureCatalogue {
public:
    static FeatureCatalogue build(const ExperimentConfig& config);
    // Rebuilds a catalogue from a features CSV header; throws
    // std::runtime_error when the names do not form the canonical layout.
    static FeatureCatalogue from_names(const std::vector<std::string>& names);

    const std::vector<FeatureDescriptor>& slots() const { return slots_; }
    const FeatureDescriptor& at(std::size_t i) const { return slots_.at(i); }
    std::size_t size() const { return slots_.size(); }
    // Identifies the slot layout, e.g. "topobias-features-v1;radii=5,10".
    // Values from catalogues with different versions must not be mixed.
    const std::string& version() const { return version_; }

private:
    std::vector<FeatureDescriptor> slots_;
    std::string version_;
};

struct FeatureVector {
    std::vector<double> values;
    std::string catalogue_version;
};

struct FeatureRow {
    std::string topology_id;
    std::string generator_label;
    std::vector<double> values;
};

struct FeatureMatrix {
    FeatureCatalogue catalogue;
    std::vector<FeatureRow> rows;
};

// (min, max, range, mode, mode count, mean, sample std) of the N(N-1)/2
// internode distances. The mode is taken over distances quantized to
// round(d / step) * step, ties resolved to the smallest quantized value;
// min/max/mean/std use the unquantized distances. Needs at least 2 nodes.
std::array<double, 7> internode_distance_features(const Topology& t, double quantization_step);

// (min, max, range, mode, mode count) of the node counts over a d x d grid
// of equal square cells; nodes on the top/right border count into the last
// cell. The mode is the count value hit by the most cells, ties resolved to
// the smallest count; mode count is how many cells hold that value.
std::array<double, 5> spatial_distribution_features(const Topology& t,
                                                    std::size_t quadrat_divisions);

// |neighbours(t, a, r)|
std::size_t node_density(const Topology& t, std::size_t a, double r);

// |neighbours(a, r) intersected with neighbours(b, r)| for distinct a, b.
std::size_t shared_neighbour_count(const Topology& t, std::size_t a, std::size_t b, double r);

// Fraction of neighbour pairs (b, c) of a with 0 < distance(b, c) < r,
// normalised by |neighbours(a, r)|; 0 for isolated nodes.
double clustering_coefficient(const Topology& t, std::size_t a, double r);

// Per-radius averages: node density over nodes, shared-neighbour count over
// node pairs, clustering coefficient over nodes. Radii order follows the
// config. shared_neighbour_features needs at least 2 nodes.
std::vector<double> density_features(const Topology& t, const RadiiConfig& radii);
std::vector<double> shared_neighbour_features(const Topology& t, const RadiiConfig& radii);
std::vector<double> clustering_features(const Topology& t, const RadiiConfig& radii);

// Full vector in catalogue order. Validates the topology first and refuses
// invalid ones with std::runtime_error.
FeatureVector extract_features(const Topology& t, const ExperimentConfig& config);

// Row per topology, input order preserved; extraction runs across topologies
// on the given worker count (0 = TOPOBIAS_THREADS or the OpenMP default).
FeatureMatrix extract_feature_matrix(const std::vector<Topology>& topologies,
                                     const ExperimentConfig& config, int threads = 0);

}  // namespace topobias
