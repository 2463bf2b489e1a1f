#include "topobias/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "topobias/parallel.hpp"
#include "topobias/rng.hpp"

namespace topobias {

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::uniform: return "uniform";
        case GeneratorKind::heavy_tailed_grid: return "heavy_tailed_grid";
        case GeneratorKind::growth: return "growth";
    }
    throw std::invalid_argument("unknown generator kind");
}

GeneratorKind generator_kind_from_string(const std::string& s) {
    if (s == "uniform") return GeneratorKind::uniform;
    if (s == "heavy_tailed_grid" || s == "heavy") return GeneratorKind::heavy_tailed_grid;
    if (s == "growth") return GeneratorKind::growth;
    throw std::invalid_argument("unknown generator kind '" + s + "'");
}

void GeneratorSpec::validate() const {
    if (label.empty()) throw std::invalid_argument("generator label must not be empty");
    if (label.find(',') != std::string::npos || label.find('\n') != std::string::npos)
        throw std::invalid_argument("generator label must not contain ',' or newline");
    if (const auto* heavy = std::get_if<HeavyTailedParams>(&params)) {
        if (heavy->grid_divisions < 1)
            throw std::invalid_argument("heavy_tailed_grid: grid_divisions must be at least 1");
        if (!(heavy->tail_exponent > 0.0))
            throw std::invalid_argument("heavy_tailed_grid: tail_exponent must be positive");
    } else if (const auto* growth = std::get_if<GrowthParams>(&params)) {
        if (!(growth->attach_bias >= 0.0) || !(growth->attach_bias <= 1.0))
            throw std::invalid_argument("growth: attach_bias must lie in [0, 1]");
        if (growth->attach_radius && !(*growth->attach_radius > 0.0))
            throw std::invalid_argument("growth: attach_radius must be positive");
    }
}

namespace {

void check_gen_args(std::size_t n, double area_side) {
    if (n < 1) throw std::invalid_argument("generator: node count must be at least 1");
    if (!(area_side > 0.0)) throw std::invalid_argument("generator: area_side must be positive");
}

// weight-proportional pick; u01 < 1 keeps the cursor inside the table
std::size_t pick_weighted(const std::vector<double>& cumulative, double u01) {
    const double target = u01 * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                 cumulative.size() - 1);
}

}  // namespace

Topology generate_uniform(std::size_t n, double area_side, std::uint64_t seed) {
    check_gen_args(n, area_side);
    Topology t;
    t.id = "uniform";
    t.generator_label = "uniform";
    t.area_side = area_side;
    t.seed = seed;
    t.nodes.resize(n);
    Rng rng(seed);
    for (Point& p : t.nodes) {
        p.x = rng.uniform01() * area_side;
        p.y = rng.uniform01() * area_side;
    }
    return t;
}

Topology generate_heavy_tailed(std::size_t n, double area_side, std::size_t grid_divisions,
                               double tail_exponent, std::uint64_t seed) {
    check_gen_args(n, area_side);
    if (grid_divisions < 1)
        throw std::invalid_argument("heavy_tailed_grid: grid_divisions must be at least 1");
    if (!(tail_exponent > 0.0))
        throw std::invalid_argument("heavy_tailed_grid: tail_exponent must be positive");

    Topology t;
    t.id = "heavy_tailed_grid";
    t.generator_label = "heavy_tailed_grid";
    t.area_side = area_side;
    t.seed = seed;
    t.nodes.resize(n);

    Rng rng(seed);
    const std::size_t g = grid_divisions;
    std::vector<double> cumulative(g * g);
    double total = 0.0;
    for (double& c : cumulative) {
        total += rng.pareto(tail_exponent);
        c = total;
    }

    const double cell_w = area_side / static_cast<double>(g);
    for (Point& p : t.nodes) {
        const std::size_t cell = pick_weighted(cumulative, rng.uniform01());
        const std::size_t cx = cell % g;
        const std::size_t cy = cell / g;
        p.x = (static_cast<double>(cx) + rng.uniform01()) * cell_w;
        p.y = (static_cast<double>(cy) + rng.uniform01()) * cell_w;
    }
    return t;
}

Topology generate_growth(std::size_t n, double area_side, double attach_bias,
                         double attach_radius, std::uint64_t seed) {
    check_gen_args(n, area_side);
    if (!(attach_bias >= 0.0) || !(attach_bias <= 1.0))
        throw std::invalid_argument("growth: attach_bias must lie in [0, 1]");
    if (!(attach_radius > 0.0)) throw std::invalid_argument("growth: attach_radius must be positive");

    Topology t;
    t.id = "growth";
    t.generator_label = "growth";
    t.area_side = area_side;
    t.seed = seed;
    t.nodes.reserve(n);

    Rng rng(seed);
    const double r2 = attach_radius * attach_radius;
    std::vector<std::size_t> degree;  // neighbour count at attach_radius
    degree.reserve(n);
    std::vector<double> cumulative;

    t.nodes.push_back({rng.uniform01() * area_side, rng.uniform01() * area_side});
    degree.push_back(0);

    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t k = 1; k < n; ++k) {
        Point p;
        if (rng.uniform01() < attach_bias) {
            cumulative.resize(k);
            double total = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                total += 1.0 + static_cast<double>(degree[i]);
                cumulative[i] = total;
            }
            const Point& anchor = t.nodes[pick_weighted(cumulative, rng.uniform01())];
            // uniform over the disc: radius scales with sqrt(u)
            const double rho = attach_radius * std::sqrt(rng.uniform01());
            const double theta = two_pi * rng.uniform01();
            p.x = std::clamp(anchor.x + rho * std::cos(theta), 0.0, area_side);
            p.y = std::clamp(anchor.y + rho * std::sin(theta), 0.0, area_side);
        } else {
            p.x = rng.uniform01() * area_side;
            p.y = rng.uniform01() * area_side;
        }

        std::size_t own = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const double dx = t.nodes[i].x - p.x;
            const double dy = t.nodes[i].y - p.y;
            if (dx * dx + dy * dy < r2) {
                ++degree[i];
                ++own;
            }
        }
        t.nodes.push_back(p);
        degree.push_back(own);
    }
    return t;
}

Topology generate_topology(const GeneratorSpec& spec, std::size_t n, double area_side,
                           std::uint64_t seed) {
    spec.validate();
    Topology t;
    switch (spec.kind) {
        case GeneratorKind::uniform:
            t = generate_uniform(n, area_side, seed);
            break;
        case GeneratorKind::heavy_tailed_grid: {
            const auto& p = std::get<HeavyTailedParams>(spec.params);
            t = generate_heavy_tailed(n, area_side, p.grid_divisions, p.tail_exponent, seed);
            break;
        }
        case GeneratorKind::growth: {
            const auto& p = std::get<GrowthParams>(spec.params);
            t = generate_growth(n, area_side, p.attach_bias,
                                p.attach_radius.value_or(area_side / 20.0), seed);
            break;
        }
    }
    t.id = spec.label;
    t.generator_label = spec.label;
    return t;
}

Corpus generate_corpus(const std::vector<GeneratorSpec>& specs, const ExperimentConfig& config,
                       int threads) {
    if (specs.empty()) throw std::invalid_argument("generate_corpus: no generator specs");
    config.validate();
    std::set<std::string> labels;
    for (const GeneratorSpec& spec : specs) {
        spec.validate();
        if (!labels.insert(spec.label).second)
            throw std::invalid_argument("generate_corpus: duplicate generator label '" +
                                        spec.label + "'");
    }

    const std::size_t per_gen = config.topologies_per_generator;
    const std::size_t total = specs.size() * per_gen;

    Corpus corpus;
    corpus.manifest.specs = specs;
    corpus.manifest.config = config;
    corpus.manifest.entries.resize(total);
    corpus.topologies.resize(total);

    parallel_for_indexed(total, threads, [&](std::size_t idx) {
        const std::size_t gi = idx / per_gen;
        const std::size_t ti = idx % per_gen;
        const GeneratorSpec& spec = specs[gi];
        const std::uint64_t seed = derive_topology_seed(config.base_seed, gi, ti, per_gen);

        Topology t = generate_topology(spec, config.nodes_per_topology, config.area_side, seed);
        char suffix[24];
        std::snprintf(suffix, sizeof(suffix), "-%06zu", ti);
        t.id = spec.label + suffix;

        corpus.manifest.entries[idx] = {t.id, spec.label, seed, "topologies/" + t.id + ".csv"};
        corpus.topologies[idx] = std::move(t);
    });
    return corpus;
}

}  // namespace topobias
