#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "topobias/topology.hpp"

namespace topobias {

enum class GeneratorKind { uniform, heavy_tailed_grid, growth };

std::string to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& s);

struct UniformParams {};

struct HeavyTailedParams {
    std::size_t grid_divisions = 10;
    double tail_exponent = 1.2;
};

struct GrowthParams {
    double attach_bias = 0.75;
    // Defaults to area_side / 20 when absent.
    std::optional<double> attach_radius;
};

using GeneratorParams = std::variant<UniformParams, HeavyTailedParams, GrowthParams>;

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::uniform;
    std::string label;
    GeneratorParams params;
    std::uint64_t seed = 0;  // base seed echo; per-topology seeds derive from the corpus

    void validate() const;  // throws std::invalid_argument
};

// All nodes i.i.d. uniform on the square.
Topology generate_uniform(std::size_t n, double area_side, std::uint64_t seed);

// Splits the square into grid_divisions^2 cells, draws one Pareto(shape =
// tail_exponent, scale = 1) weight per cell in row-major order, then places
// each node in a weight-proportional cell, uniformly within it.
Topology generate_heavy_tailed(std::size_t n, double area_side, std::size_t grid_divisions,
                               double tail_exponent, std::uint64_t seed);

// Sequential growth. The first node is uniform. Each later node either, with
// probability attach_bias, lands uniformly in the disc of attach_radius
// around an anchor chosen with weight 1 + (anchor's neighbour count at
// attach_radius), clamped to the square, or lands uniformly in the square.
Topology generate_growth(std::size_t n, double area_side, double attach_bias,
                         double attach_radius, std::uint64_t seed);

Topology generate_topology(const GeneratorSpec& spec, std::size_t n, double area_side,
                           std::uint64_t seed);

struct ManifestEntry {
    std::string topology_id;
    std::string generator_label;
    std::optional<std::uint64_t> seed;  // absent for imported topologies
    std::string file;                   // topology CSV path, relative to the manifest
};

struct CorpusManifest {
    std::vector<GeneratorSpec> specs;
    ExperimentConfig config;
    std::vector<ManifestEntry> entries;  // generator-major, topology index ascending
};

struct Corpus {
    std::vector<Topology> topologies;  // same order as manifest.entries
    CorpusManifest manifest;
};

// config.topologies_per_generator topologies per spec, ids
// "<label>-<index, 6 digits>", per-topology seeds derived from
// config.base_seed so they are pairwise distinct across the corpus.
// Labels must be unique. Throws std::invalid_argument on bad input.
Corpus generate_corpus(const std::vector<GeneratorSpec>& specs, const ExperimentConfig& config,
                       int threads = 0);

}  // namespace topobias
