#include "topobias/bias.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "topobias/parallel.hpp"
#include "topobias/stats.hpp"

namespace topobias {

double pooled_std(std::span<const double> sub, std::span<const double> all) {
    if (sub.size() < 2 || all.size() < 2)
        throw std::invalid_argument("pooled_std: both samples need at least 2 values");
    const MomentSums ms = moment_sums(sub);
    const MomentSums ma = moment_sums(all);
    const double df = static_cast<double>(sub.size() + all.size() - 2);
    // ssd == (n - 1) * sample variance, so the weighted sum is just ssd + ssd
    return std::sqrt((ms.ssd + ma.ssd) / df);
}

double hedges_g(std::span<const double> sub, std::span<const double> all) {
    const double sp = pooled_std(sub, all);
    const MomentSums ms = moment_sums(sub);
    const MomentSums ma = moment_sums(all);
    if (sp == 0.0) {
        if (ms.mean == ma.mean) return 0.0;
        throw std::runtime_error("hedges_g: zero pooled spread with differing means");
    }
    return (ma.mean - ms.mean) / sp;
}

double combine_bias_index(std::span<const double> per_feature_g) {
    double sum = 0.0;
    for (double g : per_feature_g) sum += g * g;
    return std::sqrt(sum);
}

Population population_all(const FeatureMatrix& m) {
    Population p;
    p.catalogue = &m.catalogue;
    std::map<std::string, bool> seen;
    for (const FeatureRow& row : m.rows) {
        p.rows.push_back(&row);
        seen.emplace(row.generator_label, true);
    }
    for (const auto& [label, _] : seen) p.labels.push_back(label);
    return p;
}

Population population_of(const FeatureMatrix& m, std::vector<std::string> labels) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    Population p;
    p.catalogue = &m.catalogue;
    p.labels = labels;
    std::map<std::string, std::size_t> hits;
    for (const std::string& l : labels) hits[l] = 0;
    for (const FeatureRow& row : m.rows) {
        const auto it = hits.find(row.generator_label);
        if (it == hits.end()) continue;
        ++it->second;
        p.rows.push_back(&row);
    }
    for (const auto& [label, count] : hits)
        if (count == 0)
            throw std::invalid_argument("population_of: no rows for generator '" + label + "'");
    return p;
}

BiasResult bias_index(const Population& sub, const Population& all) {
    if (!sub.catalogue || !all.catalogue)
        throw std::invalid_argument("bias_index: populations lack a catalogue");
    if (sub.catalogue->version() != all.catalogue->version())
        throw std::invalid_argument("bias_index: catalogue versions differ ('" +
                                    sub.catalogue->version() + "' vs '" +
                                    all.catalogue->version() + "')");
    if (sub.rows.size() < 2 || all.rows.size() < 2)
        throw std::invalid_argument("bias_index: both populations need at least 2 rows");

    const std::size_t features = sub.catalogue->size();
    BiasResult res;
    res.per_feature_g.resize(features);

    std::vector<double> sub_col(sub.rows.size());
    std::vector<double> all_col(all.rows.size());
    for (std::size_t k = 0; k < features; ++k) {
        for (std::size_t i = 0; i < sub.rows.size(); ++i) sub_col[i] = sub.rows[i]->values[k];
        for (std::size_t i = 0; i < all.rows.size(); ++i) all_col[i] = all.rows[i]->values[k];
        try {
            res.per_feature_g[k] = hedges_g(sub_col, all_col);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("bias_index: degenerate feature '" +
                                     sub.catalogue->at(k).name +
                                     "': zero pooled spread with differing means");
        }
    }
    res.index = combine_bias_index(res.per_feature_g);
    return res;
}

namespace {

// all (size choose subset_size) index combinations, lexicographic
std::vector<std::vector<std::size_t>> combinations(std::size_t size, std::size_t subset_size) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(subset_size);
    for (std::size_t i = 0; i < subset_size; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        std::size_t i = subset_size;
        while (i > 0) {
            --i;
            if (cur[i] + (subset_size - i) < size) break;
            if (i == 0) return out;
        }
        ++cur[i];
        for (std::size_t j = i + 1; j < subset_size; ++j) cur[j] = cur[j - 1] + 1;
    }
}

}  // namespace

BiasReport rank_generator_subsets(const FeatureMatrix& m, std::size_t subset_size, int threads) {
    const Population all = population_all(m);
    if (subset_size < 1 || subset_size >= all.labels.size())
        throw std::invalid_argument("rank_generator_subsets: subset size must lie in [1, " +
                                    std::to_string(all.labels.size()) + ")");
    std::map<std::string, std::size_t> rows_per_label;
    for (const FeatureRow& row : m.rows) ++rows_per_label[row.generator_label];
    for (const auto& [label, count] : rows_per_label)
        if (count < 2)
            throw std::invalid_argument("rank_generator_subsets: generator '" + label +
                                        "' has fewer than 2 rows");

    const auto combos = combinations(all.labels.size(), subset_size);
    BiasReport report;
    report.catalogue_version = m.catalogue.version();
    for (const FeatureDescriptor& d : m.catalogue.slots()) report.feature_names.push_back(d.name);
    report.subset_size = subset_size;
    report.entries.resize(combos.size());

    parallel_for_indexed(combos.size(), threads, [&](std::size_t c) {
        std::vector<std::string> labels;
        labels.reserve(subset_size);
        for (std::size_t i : combos[c]) labels.push_back(all.labels[i]);
        const Population sub = population_of(m, labels);
        BiasResult res = bias_index(sub, all);
        report.entries[c] = {std::move(labels), std::move(res.per_feature_g), res.index, 0};
    });

    std::sort(report.entries.begin(), report.entries.end(),
              [](const BiasEntry& a, const BiasEntry& b) {
                  if (a.index != b.index) return a.index < b.index;
                  return a.labels < b.labels;
              });
    for (std::size_t i = 0; i < report.entries.size(); ++i) report.entries[i].rank = i + 1;
    return report;
}

}  // namespace topobias
