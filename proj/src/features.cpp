#include "topobias/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "topobias/number_format.hpp"
#include "topobias/parallel.hpp"
#include "topobias/spatial_grid.hpp"
#include "topobias/stats.hpp"

namespace topobias {

std::string to_string(FeatureGroup group) {
    switch (group) {
        case FeatureGroup::internode: return "internode";
        case FeatureGroup::spatial: return "spatial";
        case FeatureGroup::density: return "density";
        case FeatureGroup::shared: return "shared";
        case FeatureGroup::clustering: return "clustering";
    }
    throw std::invalid_argument("unknown feature group");
}

namespace {

constexpr const char* kInternodeStats[] = {"min", "max", "range", "mode", "mode_count", "mean", "std"};
constexpr const char* kSpatialStats[] = {"min", "max", "range", "mode", "mode_count"};
constexpr const char* kVersionPrefix = "topobias-features-v1;radii=";

std::string radii_key(const std::vector<double>& radii) {
    std::string key;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (i) key += ',';
        key += format_double(radii[i]);
    }
    return key;
}

}  // namespace

FeatureCatalogue FeatureCatalogue::build(const ExperimentConfig& config) {
    config.validate();
    FeatureCatalogue cat;
    std::size_t index = 0;
    for (const char* stat : kInternodeStats)
        cat.slots_.push_back({index++, FeatureGroup::internode, stat, std::nullopt,
                              std::string("internode.") + stat});
    for (const char* stat : kSpatialStats)
        cat.slots_.push_back({index++, FeatureGroup::spatial, stat, std::nullopt,
                              std::string("spatial.") + stat});
    for (FeatureGroup group : {FeatureGroup::density, FeatureGroup::shared, FeatureGroup::clustering})
        for (double r : config.radii.radii)
            cat.slots_.push_back({index++, group, "avg", r,
                                  to_string(group) + ".avg@" + format_double(r)});
    cat.version_ = kVersionPrefix + radii_key(config.radii.radii);
    return cat;
}

FeatureCatalogue FeatureCatalogue::from_names(const std::vector<std::string>& names) {
    auto bad = [](const std::string& why) -> std::runtime_error {
        return std::runtime_error("feature catalogue: " + why);
    };

    std::size_t pos = 0;
    auto expect = [&](const std::string& name) {
        if (pos >= names.size() || names[pos] != name)
            throw bad("expected column '" + name + "' at position " + std::to_string(pos));
        ++pos;
    };
    for (const char* stat : kInternodeStats) expect(std::string("internode.") + stat);
    for (const char* stat : kSpatialStats) expect(std::string("spatial.") + stat);

    auto radius_run = [&](const std::string& prefix) {
        std::vector<double> radii;
        while (pos < names.size() && names[pos].rfind(prefix, 0) == 0) {
            double r = 0.0;
            if (!parse_double(names[pos].substr(prefix.size()), r) || !(r > 0.0))
                throw bad("invalid radius in column '" + names[pos] + "'");
            if (!radii.empty() && !(r > radii.back()))
                throw bad("radii must be strictly increasing near column '" + names[pos] + "'");
            radii.push_back(r);
            ++pos;
        }
        if (radii.empty()) throw bad("no '" + prefix + "...' columns found");
        return radii;
    };
    const std::vector<double> radii = radius_run("density.avg@");
    const std::vector<double> shared_radii = radius_run("shared.avg@");
    const std::vector<double> clustering_radii = radius_run("clustering.avg@");
    if (shared_radii != radii || clustering_radii != radii)
        throw bad("density/shared/clustering columns disagree on radii");
    if (pos != names.size()) throw bad("unexpected trailing column '" + names[pos] + "'");

    ExperimentConfig cfg;
    cfg.radii.radii = radii;
    // area side plays no role in the slot layout; pick one above the radii
    cfg.area_side = radii.back() * 2.0;
    return build(cfg);
}

std::array<double, 7> internode_distance_features(const Topology& t, double quantization_step) {
    if (t.node_count() < 2)
        throw std::invalid_argument("internode features need at least 2 nodes");
    if (!(quantization_step > 0.0))
        throw std::invalid_argument("quantization step must be positive");

    const std::vector<double> dists = pairwise_distances(t);
    double mn = dists[0], mx = dists[0];
    std::unordered_map<long long, std::size_t> quant_counts;
    for (double d : dists) {
        mn = std::min(mn, d);
        mx = std::max(mx, d);
        ++quant_counts[std::llround(d / quantization_step)];
    }

    long long mode_key = 0;
    std::size_t mode_count = 0;
    for (const auto& [key, count] : quant_counts)
        if (count > mode_count || (count == mode_count && key < mode_key)) {
            mode_key = key;
            mode_count = count;
        }

    const MomentSums m = moment_sums(dists);
    const double stddev = (dists.size() > 1) ? m.sample_std() : 0.0;
    return {mn, mx, mx - mn, static_cast<double>(mode_key) * quantization_step,
            static_cast<double>(mode_count), m.mean, stddev};
}

std::array<double, 5> spatial_distribution_features(const Topology& t,
                                                    std::size_t quadrat_divisions) {
    if (quadrat_divisions < 1)
        throw std::invalid_argument("quadrat_divisions must be at least 1");
    if (!(t.area_side > 0.0))
        throw std::invalid_argument("spatial features need a positive area side");

    const std::size_t d = quadrat_divisions;
    const double cell_w = t.area_side / static_cast<double>(d);
    std::vector<std::size_t> cells(d * d, 0);
    for (const Point& p : t.nodes) {
        const std::size_t cx = std::min(d - 1, static_cast<std::size_t>(std::max(0.0, p.x) / cell_w));
        const std::size_t cy = std::min(d - 1, static_cast<std::size_t>(std::max(0.0, p.y) / cell_w));
        ++cells[cy * d + cx];
    }

    std::size_t mn = cells[0], mx = cells[0];
    std::unordered_map<std::size_t, std::size_t> count_freq;
    for (std::size_t c : cells) {
        mn = std::min(mn, c);
        mx = std::max(mx, c);
        ++count_freq[c];
    }
    std::size_t mode_value = 0, mode_cells = 0;
    for (const auto& [value, freq] : count_freq)
        if (freq > mode_cells || (freq == mode_cells && value < mode_value)) {
            mode_value = value;
            mode_cells = freq;
        }

    return {static_cast<double>(mn), static_cast<double>(mx), static_cast<double>(mx - mn),
            static_cast<double>(mode_value), static_cast<double>(mode_cells)};
}

std::size_t node_density(const Topology& t, std::size_t a, double r) {
    return neighbours(t, a, r).size();
}

std::size_t shared_neighbour_count(const Topology& t, std::size_t a, std::size_t b, double r) {
    if (a == b) throw std::invalid_argument("shared_neighbour_count: nodes must be distinct");
    const std::vector<std::size_t> na = neighbours(t, a, r);
    const std::vector<std::size_t> nb = neighbours(t, b, r);
    std::size_t count = 0, i = 0, j = 0;
    while (i < na.size() && j < nb.size()) {
        if (na[i] < nb[j]) ++i;
        else if (nb[j] < na[i]) ++j;
        else { ++count; ++i; ++j; }
    }
    return count;
}

double clustering_coefficient(const Topology& t, std::size_t a, double r) {
    const std::vector<std::size_t> neigh = neighbours(t, a, r);
    if (neigh.empty()) return 0.0;
    const double r2 = r * r;
    std::size_t links = 0;
    for (std::size_t i = 0; i + 1 < neigh.size(); ++i) {
        const Point& b = t.nodes[neigh[i]];
        for (std::size_t j = i + 1; j < neigh.size(); ++j) {
            const Point& c = t.nodes[neigh[j]];
            const double dx = b.x - c.x;
            const double dy = b.y - c.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 > 0.0 && d2 < r2) ++links;
        }
    }
    return static_cast<double>(links) / static_cast<double>(neigh.size());
}

namespace {

// Neighbour id lists for every node at one radius, via a bucket grid.
// List order is bucket-major, which no consumer below depends on.
std::vector<std::vector<std::uint32_t>> neighbour_lists(const Topology& t, double r) {
    std::vector<std::vector<std::uint32_t>> lists(t.node_count());
    const UniformGrid grid(t.nodes, t.area_side, r);
    for (std::size_t a = 0; a < t.node_count(); ++a) grid.gather_within(a, r, lists[a]);
    return lists;
}

double density_avg(const std::vector<std::vector<std::uint32_t>>& lists) {
    std::size_t total = 0;
    for (const auto& l : lists) total += l.size();
    return static_cast<double>(total) / static_cast<double>(lists.size());
}

// Average shared-neighbour count over node pairs, via bitset intersections.
double shared_avg(const std::vector<std::vector<std::uint32_t>>& lists) {
    const std::size_t n = lists.size();
    const std::size_t words = (n + 63) / 64;
    std::vector<std::uint64_t> masks(n * words, 0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::uint32_t j : lists[a]) masks[a * words + j / 64] |= 1ull << (j % 64);

    std::uint64_t total = 0;
    for (std::size_t a = 0; a + 1 < n; ++a) {
        if (lists[a].empty()) continue;
        const std::uint64_t* row_a = masks.data() + a * words;
        for (std::size_t b = a + 1; b < n; ++b) {
            if (lists[b].empty()) continue;
            const std::uint64_t* row_b = masks.data() + b * words;
            std::uint64_t isect = 0;
            for (std::size_t w = 0; w < words; ++w)
                isect += static_cast<std::uint64_t>(std::popcount(row_a[w] & row_b[w]));
            total += isect;
        }
    }
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return static_cast<double>(total) / pairs;
}

double clustering_avg(const Topology& t, const std::vector<std::vector<std::uint32_t>>& lists,
                      double r) {
    const double r2 = r * r;
    double sum = 0.0;
    for (const auto& neigh : lists) {
        if (neigh.empty()) continue;
        std::size_t links = 0;
        for (std::size_t i = 0; i + 1 < neigh.size(); ++i) {
            const Point& b = t.nodes[neigh[i]];
            for (std::size_t j = i + 1; j < neigh.size(); ++j) {
                const Point& c = t.nodes[neigh[j]];
                const double dx = b.x - c.x;
                const double dy = b.y - c.y;
                const double d2 = dx * dx + dy * dy;
                if (d2 > 0.0 && d2 < r2) ++links;
            }
        }
        sum += static_cast<double>(links) / static_cast<double>(neigh.size());
    }
    return sum / static_cast<double>(t.node_count());
}

}  // namespace

std::vector<double> density_features(const Topology& t, const RadiiConfig& radii) {
    radii.validate();
    if (t.node_count() < 1) throw std::invalid_argument("density features need at least 1 node");
    std::vector<double> out;
    out.reserve(radii.count());
    for (double r : radii.radii) out.push_back(density_avg(neighbour_lists(t, r)));
    return out;
}

std::vector<double> shared_neighbour_features(const Topology& t, const RadiiConfig& radii) {
    radii.validate();
    if (t.node_count() < 2)
        throw std::invalid_argument("shared-neighbour features need at least 2 nodes");
    std::vector<double> out;
    out.reserve(radii.count());
    for (double r : radii.radii) out.push_back(shared_avg(neighbour_lists(t, r)));
    return out;
}

std::vector<double> clustering_features(const Topology& t, const RadiiConfig& radii) {
    radii.validate();
    if (t.node_count() < 1)
        throw std::invalid_argument("clustering features need at least 1 node");
    std::vector<double> out;
    out.reserve(radii.count());
    for (double r : radii.radii) out.push_back(clustering_avg(t, neighbour_lists(t, r), r));
    return out;
}

FeatureVector extract_features(const Topology& t, const ExperimentConfig& config) {
    config.validate();
    const ValidationResult v = validate_topology(t);
    if (!v.ok())
        throw std::runtime_error("extract_features: invalid topology '" + t.id + "': " +
                                 v.violations.front());
    if (t.node_count() < 2)
        throw std::runtime_error("extract_features: topology '" + t.id + "' has fewer than 2 nodes");

    FeatureVector fv;
    fv.catalogue_version = kVersionPrefix + radii_key(config.radii.radii);
    fv.values.reserve(12 + 3 * config.radii.count());

    const auto internode = internode_distance_features(t, config.quantization_step);
    fv.values.insert(fv.values.end(), internode.begin(), internode.end());
    const auto spatial = spatial_distribution_features(t, config.quadrat_divisions);
    fv.values.insert(fv.values.end(), spatial.begin(), spatial.end());

    // one neighbourhood pass per radius feeds all three per-radius groups
    std::vector<double> density, shared, clustering;
    for (double r : config.radii.radii) {
        const auto lists = neighbour_lists(t, r);
        density.push_back(density_avg(lists));
        shared.push_back(shared_avg(lists));
        clustering.push_back(clustering_avg(t, lists, r));
    }
    fv.values.insert(fv.values.end(), density.begin(), density.end());
    fv.values.insert(fv.values.end(), shared.begin(), shared.end());
    fv.values.insert(fv.values.end(), clustering.begin(), clustering.end());
    return fv;
}

FeatureMatrix extract_feature_matrix(const std::vector<Topology>& topologies,
                                     const ExperimentConfig& config, int threads) {
    FeatureMatrix m;
    m.catalogue = FeatureCatalogue::build(config);
    m.rows.resize(topologies.size());
    parallel_for_indexed(topologies.size(), threads, [&](std::size_t i) {
        FeatureVector fv = extract_features(topologies[i], config);
        m.rows[i] = {topologies[i].id, topologies[i].generator_label, std::move(fv.values)};
    });
    return m;
}

}  // namespace topobias
