#pragma once

#include <span>
#include <string>
#include <vector>

#include "topobias/features.hpp"

namespace topobias {

// Pooled standard deviation of two samples, sample variances with n - 1:
// sqrt(((n_all - 1) s_all^2 + (n_sub - 1) s_sub^2) / (n_all + n_sub - 2)).
// Both samples need at least 2 values.
double pooled_std(std::span<const double> sub, std::span<const double> all);

// Hedges' g of a sub-population against the full population for one feature:
// (mean(all) - mean(sub)) / pooled_std. A zero pooled_std with equal means
// gives 0 (the feature is constant everywhere); with differing means the
// feature is degenerate and this throws std::runtime_error.
double hedges_g(std::span<const double> sub, std::span<const double> all);

// Euclidean norm over per-feature effect sizes.
double combine_bias_index(std::span<const double> per_feature_g);

// A set of feature rows under one catalogue. Rows point into the matrix the
// population was built from, which must outlive it.
struct Population {
    std::vector<std::string> labels;  // sorted, unique
    std::vector<const FeatureRow*> rows;
    const FeatureCatalogue* catalogue = nullptr;
};

Population population_all(const FeatureMatrix& m);
// Rows whose generator label is in `labels`; throws on unknown labels.
Population population_of(const FeatureMatrix& m, std::vector<std::string> labels);

struct BiasResult {
    std::vector<double> per_feature_g;
    double index = 0.0;
};

// Per-feature Hedges' g plus their norm. `sub` must consist of rows of
// `all` (same matrix, same catalogue); sub rows stay counted in `all`.
BiasResult bias_index(const Population& sub, const Population& all);

struct BiasEntry {
    std::vector<std::string> labels;
    std::vector<double> per_feature_g;
    double index = 0.0;
    std::size_t rank = 0;  // 1-based, ascending index
};

struct BiasReport {
    std::string catalogue_version;
    std::vector<std::string> feature_names;
    std::size_t subset_size = 0;
    std::vector<BiasEntry> entries;  // ascending by index; ties by labels
};

// Evaluates every subset_size-element subset of the generator labels against
// the whole matrix and ranks them ascending (lowest index = most
// representative). Requires 1 <= subset_size < number of labels and at least
// 2 rows per label.
BiasReport rank_generator_subsets(const FeatureMatrix& m, std::size_t subset_size,
                                  int threads = 0);

}  // namespace topobias
