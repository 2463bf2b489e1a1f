#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "topobias/features.hpp"

namespace topobias {

enum class NbKind { gaussian, bernoulli, multinomial };

std::string to_string(NbKind kind);
NbKind nb_kind_from_string(const std::string& s);

// Labelled feature rows with a fixed, sorted class order.
struct GroundTruth {
    FeatureCatalogue catalogue;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> row_class;  // index into classes, per row
    std::vector<std::string> classes;    // sorted, unique

    static GroundTruth from_matrix(const FeatureMatrix& m);
    // Rows of two classes only; throws on unknown or equal labels.
    GroundTruth restricted_to(const std::string& a, const std::string& b) const;
    std::size_t feature_count() const { return catalogue.size(); }
};

// Naive Bayes over a subset of feature slots. Likelihoods per kind:
//  - gaussian:    per-class normal, maximum-likelihood variance smoothed by
//                 1e-9 times the largest overall feature variance
//  - bernoulli:   feature > median-over-training-rows, add-one smoothing
//  - multinomial: min-max scaled into 16 bins over the training rows,
//                 clamped at prediction time, add-one smoothing
struct NaiveBayesModel {
    NbKind kind = NbKind::gaussian;
    std::vector<std::string> classes;  // sorted; score ties resolve to the first
    std::vector<double> log_prior;
    std::vector<std::size_t> active;  // catalogue indices in ascending order
    std::size_t feature_count = 0;
    std::string catalogue_version;

    std::vector<std::vector<double>> mean, variance;   // gaussian, [class][active]
    std::vector<double> threshold;                     // bernoulli, [active]
    std::vector<std::vector<double>> log_on, log_off;  // bernoulli, [class][active]
    std::size_t bins = 16;                             // multinomial
    std::vector<double> bin_lo, bin_width;             // multinomial, [active]
    std::vector<std::vector<double>> log_bin;          // multinomial, [class][active * bins]
};

// Trains on the given rows using the given feature slots (ascending, no
// duplicates). At least 2 classes must be present, each with at least 2
// training rows; throws std::invalid_argument otherwise.
NaiveBayesModel train_naive_bayes(NbKind kind, const GroundTruth& gt,
                                  std::span<const std::size_t> train_rows,
                                  std::span<const std::size_t> active_features);

struct Prediction {
    std::string label;
    std::vector<double> log_scores;  // aligned with model.classes
};

// `values` must span the full catalogue width; the model reads its active
// slots. The FeatureVector overload also checks the catalogue version.
Prediction predict(const NaiveBayesModel& model, std::span<const double> values);
Prediction predict(const NaiveBayesModel& model, const FeatureVector& v);

// Fold id per row: row order is shuffled by the seed, then each class is
// dealt round-robin over k folds, so per-class fold sizes differ by at most
// one. Requires k >= 2 and at least k rows per class.
std::vector<std::size_t> stratified_folds(const GroundTruth& gt, std::size_t k,
                                          std::uint64_t seed);

struct ClassificationReport {
    NbKind kind = NbKind::gaussian;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::optional<std::pair<std::string, std::string>> pair;
    std::vector<std::string> classes;
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;  // mean of the per-fold accuracies
    std::vector<std::vector<std::size_t>> confusion;  // [true class][predicted class]
    std::string catalogue_version;
};

// k-fold cross-validation over all features. Folds are evaluated
// independently (parallel across folds); the confusion matrix aggregates all
// test predictions.
ClassificationReport kfold_cross_validate(const GroundTruth& gt, std::size_t k, NbKind kind,
                                          std::uint64_t seed, int threads = 0);

// Same run restricted to two classes when `pair` is given.
ClassificationReport confusion_and_pairwise(const GroundTruth& gt, std::size_t k, NbKind kind,
                                            std::uint64_t seed,
                                            std::optional<std::pair<std::string, std::string>> pair,
                                            int threads = 0);

enum class FssMode { cross_validated, single_fold };

struct FssOptions {
    FssMode mode = FssMode::cross_validated;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::size_t fold = 0;          // scored fold in single_fold mode
    std::size_t max_features = 0;  // 0 = up to the full catalogue
    bool full_trace = false;       // keep recording greedy steps past the stop point
};

struct FssStep {
    std::size_t feature;                  // slot added at this step
    std::vector<std::size_t> feature_set; // selection so far, in selection order
    double accuracy;
};

struct FssTrace {
    NbKind kind = NbKind::gaussian;
    FssOptions options;
    std::string catalogue_version;
    std::vector<FssStep> steps;
    // Steps [0, converged_steps) each strictly improved on the previous
    // accuracy; later steps exist only under full_trace and document the
    // plateau past the stop point.
    std::size_t converged_steps = 0;
    std::string stop_reason;  // "no improvement" | "max features"
};

// Greedy forward selection: each round scores every remaining feature via
// the chosen evaluation (candidates in parallel) and adds the best one,
// smallest slot index on ties. Stops at the first round whose best addition
// does not strictly improve accuracy, or at max_features.
FssTrace forward_sequential_selection(const GroundTruth& gt, NbKind kind, const FssOptions& opts,
                                      int threads = 0);

}  // namespace topobias
