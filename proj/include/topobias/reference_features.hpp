#pragma once

#include <array>
#include <vector>

#include "topobias/features.hpp"
#include "topobias/topology.hpp"

// Serial from-definition feature extraction. Every quantity is computed by
// direct enumeration — full scans for neighbourhoods, sorted-run counting for
// modes, std::hypot for distances — with none of the grid, bitset or
// hash-map machinery of the production path. Kept as an independent check
// and as the baseline for the benchmark; far too slow for real corpora.

namespace topobias::reference {

std::vector<double> pairwise_distances(const Topology& t);
std::vector<std::size_t> neighbours(const Topology& t, std::size_t a, double r);

std::array<double, 7> internode_distance_features(const Topology& t, double quantization_step);
std::array<double, 5> spatial_distribution_features(const Topology& t,
                                                    std::size_t quadrat_divisions);
std::vector<double> density_features(const Topology& t, const RadiiConfig& radii);
std::vector<double> shared_neighbour_features(const Topology& t, const RadiiConfig& radii);
std::vector<double> clustering_features(const Topology& t, const RadiiConfig& radii);

// Same value layout as topobias::extract_features.
std::vector<double> extract_features(const Topology& t, const ExperimentConfig& config);

}  // namespace topobias::reference
