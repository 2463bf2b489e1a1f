#include "topobias/reference_features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topobias::reference {

namespace {

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// (count, value) of the most frequent element; ties go to the smaller value
template <typename T>
std::pair<std::size_t, T> mode_of_sorted(std::vector<T> values) {
    std::sort(values.begin(), values.end());
    std::size_t best_count = 0, run = 0;
    T best_value = values.front();
    for (std::size_t i = 0; i < values.size(); ++i) {
        run = (i > 0 && values[i] == values[i - 1]) ? run + 1 : 1;
        if (run > best_count) {
            best_count = run;
            best_value = values[i];
        }
    }
    return {best_count, best_value};
}

}  // namespace

std::vector<double> pairwise_distances(const Topology& t) {
    std::vector<double> out;
    for (std::size_t a = 0; a + 1 < t.node_count(); ++a)
        for (std::size_t b = a + 1; b < t.node_count(); ++b)
            out.push_back(dist(t.nodes[a], t.nodes[b]));
    return out;
}

std::vector<std::size_t> neighbours(const Topology& t, std::size_t a, double r) {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < t.node_count(); ++b)
        if (b != a && dist(t.nodes[a], t.nodes[b]) < r) out.push_back(b);
    return out;
}

std::array<double, 7> internode_distance_features(const Topology& t, double quantization_step) {
    const std::vector<double> d = reference::pairwise_distances(t);
    if (d.empty()) throw std::invalid_argument("reference: need at least 2 nodes");

    std::vector<long long> quantized;
    quantized.reserve(d.size());
    for (double v : d) quantized.push_back(std::llround(v / quantization_step));
    const auto [mode_count, mode_key] = mode_of_sorted(std::move(quantized));

    const double mn = *std::min_element(d.begin(), d.end());
    const double mx = *std::max_element(d.begin(), d.end());
    double sum = 0.0;
    for (double v : d) sum += v;
    const double mean = sum / static_cast<double>(d.size());
    double ssd = 0.0;
    for (double v : d) ssd += (v - mean) * (v - mean);
    const double stddev =
        (d.size() > 1) ? std::sqrt(ssd / static_cast<double>(d.size() - 1)) : 0.0;

    return {mn, mx, mx - mn, static_cast<double>(mode_key) * quantization_step,
            static_cast<double>(mode_count), mean, stddev};
}

std::array<double, 5> spatial_distribution_features(const Topology& t,
                                                    std::size_t quadrat_divisions) {
    const std::size_t d = quadrat_divisions;
    const double w = t.area_side / static_cast<double>(d);
    std::vector<std::size_t> counts;
    counts.reserve(d * d);
    for (std::size_t cy = 0; cy < d; ++cy) {
        for (std::size_t cx = 0; cx < d; ++cx) {
            std::size_t c = 0;
            for (const Point& p : t.nodes) {
                std::size_t px = static_cast<std::size_t>(std::max(0.0, p.x) / w);
                std::size_t py = static_cast<std::size_t>(std::max(0.0, p.y) / w);
                px = std::min(px, d - 1);
                py = std::min(py, d - 1);
                if (px == cx && py == cy) ++c;
            }
            counts.push_back(c);
        }
    }
    const std::size_t mn = *std::min_element(counts.begin(), counts.end());
    const std::size_t mx = *std::max_element(counts.begin(), counts.end());
    const auto [mode_cells, mode_value] = mode_of_sorted(counts);
    return {static_cast<double>(mn), static_cast<double>(mx), static_cast<double>(mx - mn),
            static_cast<double>(mode_value), static_cast<double>(mode_cells)};
}

std::vector<double> density_features(const Topology& t, const RadiiConfig& radii) {
    std::vector<double> out;
    for (double r : radii.radii) {
        std::size_t total = 0;
        for (std::size_t a = 0; a < t.node_count(); ++a) total += reference::neighbours(t, a, r).size();
        out.push_back(static_cast<double>(total) / static_cast<double>(t.node_count()));
    }
    return out;
}

std::vector<double> shared_neighbour_features(const Topology& t, const RadiiConfig& radii) {
    const std::size_t n = t.node_count();
    if (n < 2) throw std::invalid_argument("reference: need at least 2 nodes");
    std::vector<double> out;
    for (double r : radii.radii) {
        std::vector<std::vector<std::size_t>> neigh(n);
        for (std::size_t a = 0; a < n; ++a) neigh[a] = reference::neighbours(t, a, r);
        std::size_t total = 0;
        for (std::size_t a = 0; a + 1 < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                std::size_t i = 0, j = 0;
                while (i < neigh[a].size() && j < neigh[b].size()) {
                    if (neigh[a][i] < neigh[b][j]) ++i;
                    else if (neigh[b][j] < neigh[a][i]) ++j;
                    else { ++total; ++i; ++j; }
                }
            }
        }
        out.push_back(static_cast<double>(total) /
                      (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0));
    }
    return out;
}

std::vector<double> clustering_features(const Topology& t, const RadiiConfig& radii) {
    std::vector<double> out;
    for (double r : radii.radii) {
        double sum = 0.0;
        for (std::size_t a = 0; a < t.node_count(); ++a) {
            const std::vector<std::size_t> neigh = reference::neighbours(t, a, r);
            if (neigh.empty()) continue;
            std::size_t links = 0;
            for (std::size_t i = 0; i + 1 < neigh.size(); ++i)
                for (std::size_t j = i + 1; j < neigh.size(); ++j) {
                    const double d = dist(t.nodes[neigh[i]], t.nodes[neigh[j]]);
                    if (d > 0.0 && d < r) ++links;
                }
            sum += static_cast<double>(links) / static_cast<double>(neigh.size());
        }
        out.push_back(sum / static_cast<double>(t.node_count()));
    }
    return out;
}

std::vector<double> extract_features(const Topology& t, const ExperimentConfig& config) {
    std::vector<double> out;
    const auto internode = reference::internode_distance_features(t, config.quantization_step);
    out.insert(out.end(), internode.begin(), internode.end());
    const auto spatial = reference::spatial_distribution_features(t, config.quadrat_divisions);
    out.insert(out.end(), spatial.begin(), spatial.end());
    for (const auto& block : {reference::density_features(t, config.radii),
                              reference::shared_neighbour_features(t, config.radii),
                              reference::clustering_features(t, config.radii)})
        out.insert(out.end(), block.begin(), block.end());
    return out;
}

}  // namespace topobias::reference
