#include "topobias/classify.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>
#include <stdexcept>

#include "topobias/parallel.hpp"
#include "topobias/rng.hpp"
#include "topobias/stats.hpp"

namespace topobias {

std::string to_string(NbKind kind) {
    switch (kind) {
        case NbKind::gaussian: return "gaussian";
        case NbKind::bernoulli: return "bernoulli";
        case NbKind::multinomial: return "multinomial";
    }
    throw std::invalid_argument("unknown naive-bayes kind");
}

NbKind nb_kind_from_string(const std::string& s) {
    if (s == "gaussian") return NbKind::gaussian;
    if (s == "bernoulli") return NbKind::bernoulli;
    if (s == "multinomial") return NbKind::multinomial;
    throw std::invalid_argument("unknown naive-bayes kind '" + s + "'");
}

GroundTruth GroundTruth::from_matrix(const FeatureMatrix& m) {
    GroundTruth gt;
    gt.catalogue = m.catalogue;
    std::map<std::string, std::size_t> class_ids;
    for (const FeatureRow& row : m.rows) class_ids.emplace(row.generator_label, 0);
    std::size_t next = 0;
    for (auto& [label, id] : class_ids) {
        id = next++;
        gt.classes.push_back(label);
    }
    gt.rows.reserve(m.rows.size());
    gt.row_class.reserve(m.rows.size());
    for (const FeatureRow& row : m.rows) {
        if (row.values.size() != gt.catalogue.size())
            throw std::invalid_argument("ground truth: row '" + row.topology_id +
                                        "' does not match the catalogue width");
        gt.rows.push_back(row.values);
        gt.row_class.push_back(class_ids[row.generator_label]);
    }
    return gt;
}

GroundTruth GroundTruth::restricted_to(const std::string& a, const std::string& b) const {
    if (a == b) throw std::invalid_argument("pair restriction needs two distinct classes");
    for (const std::string& label : {a, b})
        if (!std::binary_search(classes.begin(), classes.end(), label))
            throw std::invalid_argument("unknown class '" + label + "'");

    GroundTruth out;
    out.catalogue = catalogue;
    out.classes = {std::min(a, b), std::max(a, b)};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string& label = classes[row_class[i]];
        if (label != a && label != b) continue;
        out.rows.push_back(rows[i]);
        out.row_class.push_back(label == out.classes[0] ? 0 : 1);
    }
    return out;
}

namespace {

std::vector<double> column(const GroundTruth& gt, std::span<const std::size_t> row_ids,
                           std::size_t feature) {
    std::vector<double> v;
    v.reserve(row_ids.size());
    for (std::size_t r : row_ids) v.push_back(gt.rows[r][feature]);
    return v;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::size_t multinomial_bin(double x, double lo, double width, std::size_t bins) {
    if (width <= 0.0) return 0;
    const double t = std::floor((x - lo) / width);
    if (t < 0.0) return 0;  // clamp values outside the training range
    const std::size_t b = static_cast<std::size_t>(t);
    return std::min(b, bins - 1);
}

}  // namespace

NaiveBayesModel train_naive_bayes(NbKind kind, const GroundTruth& gt,
                                  std::span<const std::size_t> train_rows,
                                  std::span<const std::size_t> active_features) {
    if (active_features.empty())
        throw std::invalid_argument("train_naive_bayes: empty active feature set");
    for (std::size_t i = 0; i < active_features.size(); ++i) {
        if (active_features[i] >= gt.feature_count())
            throw std::invalid_argument("train_naive_bayes: feature index out of range");
        if (i > 0 && active_features[i] <= active_features[i - 1])
            throw std::invalid_argument(
                "train_naive_bayes: active features must be ascending and unique");
    }

    std::vector<std::vector<std::size_t>> rows_by_class(gt.classes.size());
    for (std::size_t r : train_rows) {
        if (r >= gt.rows.size())
            throw std::invalid_argument("train_naive_bayes: row index out of range");
        rows_by_class[gt.row_class[r]].push_back(r);
    }

    NaiveBayesModel model;
    model.kind = kind;
    model.active.assign(active_features.begin(), active_features.end());
    model.feature_count = gt.feature_count();
    model.catalogue_version = gt.catalogue.version();

    std::vector<std::span<const std::size_t>> class_rows;
    for (std::size_t c = 0; c < gt.classes.size(); ++c) {
        if (rows_by_class[c].empty()) continue;
        if (rows_by_class[c].size() < 2)
            throw std::invalid_argument("train_naive_bayes: class '" + gt.classes[c] +
                                        "' has fewer than 2 training rows");
        model.classes.push_back(gt.classes[c]);
        class_rows.emplace_back(rows_by_class[c]);
    }
    if (model.classes.size() < 2)
        throw std::invalid_argument("train_naive_bayes: need at least 2 classes present");

    const double n_train = static_cast<double>(train_rows.size());
    for (const auto& rows : class_rows)
        model.log_prior.push_back(std::log(static_cast<double>(rows.size()) / n_train));

    const std::size_t n_classes = model.classes.size();
    const std::size_t n_active = model.active.size();

    switch (kind) {
        case NbKind::gaussian: {
            // smoothing scale from the largest overall feature variance
            double max_var = 0.0;
            for (std::size_t f : model.active)
                max_var = std::max(max_var, moment_sums(column(gt, train_rows, f)).population_variance());
            const double eps = 1e-9 * max_var;

            model.mean.assign(n_classes, std::vector<double>(n_active));
            model.variance.assign(n_classes, std::vector<double>(n_active));
            for (std::size_t c = 0; c < n_classes; ++c)
                for (std::size_t k = 0; k < n_active; ++k) {
                    const MomentSums m = moment_sums(column(gt, class_rows[c], model.active[k]));
                    model.mean[c][k] = m.mean;
                    model.variance[c][k] = std::max(m.population_variance() + eps, DBL_MIN);
                }
            break;
        }
        case NbKind::bernoulli: {
            model.threshold.resize(n_active);
            for (std::size_t k = 0; k < n_active; ++k)
                model.threshold[k] = median_of(column(gt, train_rows, model.active[k]));

            model.log_on.assign(n_classes, std::vector<double>(n_active));
            model.log_off.assign(n_classes, std::vector<double>(n_active));
            for (std::size_t c = 0; c < n_classes; ++c) {
                const double denom = static_cast<double>(class_rows[c].size() + 2);
                for (std::size_t k = 0; k < n_active; ++k) {
                    std::size_t on = 0;
                    for (std::size_t r : class_rows[c])
                        if (gt.rows[r][model.active[k]] > model.threshold[k]) ++on;
                    model.log_on[c][k] = std::log(static_cast<double>(on + 1) / denom);
                    model.log_off[c][k] =
                        std::log(static_cast<double>(class_rows[c].size() - on + 1) / denom);
                }
            }
            break;
        }
        case NbKind::multinomial: {
            model.bin_lo.resize(n_active);
            model.bin_width.resize(n_active);
            for (std::size_t k = 0; k < n_active; ++k) {
                const std::vector<double> col = column(gt, train_rows, model.active[k]);
                const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
                model.bin_lo[k] = *lo;
                model.bin_width[k] = (*hi - *lo) / static_cast<double>(model.bins);
            }
            model.log_bin.assign(n_classes, std::vector<double>(n_active * model.bins));
            for (std::size_t c = 0; c < n_classes; ++c) {
                const double denom = static_cast<double>(class_rows[c].size() + model.bins);
                for (std::size_t k = 0; k < n_active; ++k) {
                    std::vector<std::size_t> counts(model.bins, 0);
                    for (std::size_t r : class_rows[c])
                        ++counts[multinomial_bin(gt.rows[r][model.active[k]], model.bin_lo[k],
                                                 model.bin_width[k], model.bins)];
                    for (std::size_t b = 0; b < model.bins; ++b)
                        model.log_bin[c][k * model.bins + b] =
                            std::log(static_cast<double>(counts[b] + 1) / denom);
                }
            }
            break;
        }
    }
    return model;
}

Prediction predict(const NaiveBayesModel& model, std::span<const double> values) {
    if (values.size() != model.feature_count)
        throw std::invalid_argument("predict: expected " + std::to_string(model.feature_count) +
                                    " values, got " + std::to_string(values.size()));
    constexpr double log_two_pi = 1.8378770664093454835606594728112;

    Prediction pred;
    pred.log_scores.resize(model.classes.size());
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        double score = model.log_prior[c];
        for (std::size_t k = 0; k < model.active.size(); ++k) {
            const double x = values[model.active[k]];
            switch (model.kind) {
                case NbKind::gaussian: {
                    const double var = model.variance[c][k];
                    const double d = x - model.mean[c][k];
                    score += -0.5 * (log_two_pi + std::log(var) + d * d / var);
                    break;
                }
                case NbKind::bernoulli:
                    score += (x > model.threshold[k]) ? model.log_on[c][k] : model.log_off[c][k];
                    break;
                case NbKind::multinomial:
                    score += model.log_bin[c][k * model.bins +
                                              multinomial_bin(x, model.bin_lo[k],
                                                              model.bin_width[k], model.bins)];
                    break;
            }
        }
        pred.log_scores[c] = score;
    }

    std::size_t best = 0;
    for (std::size_t c = 1; c < pred.log_scores.size(); ++c)
        if (pred.log_scores[c] > pred.log_scores[best]) best = c;  // ties keep the first class
    pred.label = model.classes[best];
    return pred;
}

Prediction predict(const NaiveBayesModel& model, const FeatureVector& v) {
    if (v.catalogue_version != model.catalogue_version)
        throw std::invalid_argument("predict: catalogue version mismatch ('" +
                                    v.catalogue_version + "' vs '" + model.catalogue_version +
                                    "')");
    return predict(model, v.values);
}

std::vector<std::size_t> stratified_folds(const GroundTruth& gt, std::size_t k,
                                          std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_folds: need at least 2 folds");
    std::vector<std::size_t> per_class(gt.classes.size(), 0);
    for (std::size_t c : gt.row_class) ++per_class[c];
    for (std::size_t c = 0; c < gt.classes.size(); ++c)
        if (per_class[c] < k)
            throw std::invalid_argument("stratified_folds: class '" + gt.classes[c] + "' has " +
                                        std::to_string(per_class[c]) + " rows, fewer than " +
                                        std::to_string(k) + " folds");

    std::vector<std::size_t> order(gt.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    shuffle_deterministic(order, rng);

    std::vector<std::size_t> fold_of(gt.rows.size(), 0);
    std::vector<std::size_t> cursor(gt.classes.size(), 0);
    for (std::size_t r : order) fold_of[r] = cursor[gt.row_class[r]]++ % k;
    return fold_of;
}

namespace {

struct FoldEval {
    double accuracy = 0.0;
    std::vector<std::vector<std::size_t>> confusion;
};

FoldEval eval_fold(const GroundTruth& gt, const std::vector<std::size_t>& fold_of,
                   std::size_t test_fold, NbKind kind, std::span<const std::size_t> active) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t r = 0; r < gt.rows.size(); ++r)
        (fold_of[r] == test_fold ? test_rows : train_rows).push_back(r);

    const NaiveBayesModel model = train_naive_bayes(kind, gt, train_rows, active);
    std::vector<std::size_t> model_to_gt(model.classes.size());
    for (std::size_t c = 0; c < model.classes.size(); ++c)
        model_to_gt[c] = static_cast<std::size_t>(
            std::lower_bound(gt.classes.begin(), gt.classes.end(), model.classes[c]) -
            gt.classes.begin());

    FoldEval ev;
    ev.confusion.assign(gt.classes.size(), std::vector<std::size_t>(gt.classes.size(), 0));
    std::size_t correct = 0;
    for (std::size_t r : test_rows) {
        const Prediction p = predict(model, gt.rows[r]);
        std::size_t best = 0;
        for (std::size_t c = 1; c < p.log_scores.size(); ++c)
            if (p.log_scores[c] > p.log_scores[best]) best = c;
        const std::size_t predicted = model_to_gt[best];
        ++ev.confusion[gt.row_class[r]][predicted];
        if (predicted == gt.row_class[r]) ++correct;
    }
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(test_rows.size());
    return ev;
}

std::vector<std::size_t> all_features(const GroundTruth& gt) {
    std::vector<std::size_t> v(gt.feature_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
    return v;
}

}  // namespace

ClassificationReport kfold_cross_validate(const GroundTruth& gt, std::size_t k, NbKind kind,
                                          std::uint64_t seed, int threads) {
    const std::vector<std::size_t> fold_of = stratified_folds(gt, k, seed);
    const std::vector<std::size_t> active = all_features(gt);

    std::vector<FoldEval> evals(k);
    parallel_for_indexed(k, threads,
                         [&](std::size_t l) { evals[l] = eval_fold(gt, fold_of, l, kind, active); });

    ClassificationReport report;
    report.kind = kind;
    report.folds = k;
    report.seed = seed;
    report.classes = gt.classes;
    report.catalogue_version = gt.catalogue.version();
    report.confusion.assign(gt.classes.size(), std::vector<std::size_t>(gt.classes.size(), 0));
    double sum = 0.0;
    for (const FoldEval& ev : evals) {
        report.fold_accuracy.push_back(ev.accuracy);
        sum += ev.accuracy;
        for (std::size_t i = 0; i < report.confusion.size(); ++i)
            for (std::size_t j = 0; j < report.confusion.size(); ++j)
                report.confusion[i][j] += ev.confusion[i][j];
    }
    report.mean_accuracy = sum / static_cast<double>(k);
    return report;
}

ClassificationReport confusion_and_pairwise(const GroundTruth& gt, std::size_t k, NbKind kind,
                                            std::uint64_t seed,
                                            std::optional<std::pair<std::string, std::string>> pair,
                                            int threads) {
    if (!pair) return kfold_cross_validate(gt, k, kind, seed, threads);
    const GroundTruth sub = gt.restricted_to(pair->first, pair->second);
    ClassificationReport report = kfold_cross_validate(sub, k, kind, seed, threads);
    report.pair = {sub.classes[0], sub.classes[1]};
    return report;
}

FssTrace forward_sequential_selection(const GroundTruth& gt, NbKind kind, const FssOptions& opts,
                                      int threads) {
    if (gt.rows.empty()) throw std::invalid_argument("forward selection: empty ground truth");
    const std::size_t total = gt.feature_count();
    const std::size_t max_features = (opts.max_features == 0) ? total : opts.max_features;
    if (max_features > total)
        throw std::invalid_argument("forward selection: max_features exceeds the catalogue size");

    const std::vector<std::size_t> fold_of = stratified_folds(gt, opts.folds, opts.seed);
    if (opts.mode == FssMode::single_fold && opts.fold >= opts.folds)
        throw std::invalid_argument("forward selection: scored fold out of range");

    auto evaluate = [&](std::span<const std::size_t> active) {
        if (opts.mode == FssMode::single_fold)
            return eval_fold(gt, fold_of, opts.fold, kind, active).accuracy;
        double sum = 0.0;
        for (std::size_t l = 0; l < opts.folds; ++l)
            sum += eval_fold(gt, fold_of, l, kind, active).accuracy;
        return sum / static_cast<double>(opts.folds);
    };

    FssTrace trace;
    trace.kind = kind;
    trace.options = opts;
    trace.options.max_features = max_features;
    trace.catalogue_version = gt.catalogue.version();

    std::vector<std::size_t> selected_sorted, selection_seq;
    std::vector<char> in_set(total, 0);
    double best_so_far = -1.0;
    bool stopped = false;

    while (selection_seq.size() < max_features) {
        std::vector<std::size_t> candidates;
        for (std::size_t f = 0; f < total; ++f)
            if (!in_set[f]) candidates.push_back(f);

        std::vector<double> accs(candidates.size());
        parallel_for_indexed(candidates.size(), threads, [&](std::size_t ci) {
            std::vector<std::size_t> active = selected_sorted;
            active.insert(std::upper_bound(active.begin(), active.end(), candidates[ci]),
                          candidates[ci]);
            accs[ci] = evaluate(active);
        });

        std::size_t best_ci = 0;
        for (std::size_t ci = 1; ci < accs.size(); ++ci)
            if (accs[ci] > accs[best_ci]) best_ci = ci;  // candidates ascend, ties keep smallest

        if (!stopped) {
            if (accs[best_ci] > best_so_far) {
                best_so_far = accs[best_ci];
            } else {
                stopped = true;
                trace.converged_steps = trace.steps.size();
                trace.stop_reason = "no improvement";
                if (!opts.full_trace) break;
            }
        }

        const std::size_t feature = candidates[best_ci];
        in_set[feature] = 1;
        selected_sorted.insert(
            std::upper_bound(selected_sorted.begin(), selected_sorted.end(), feature), feature);
        selection_seq.push_back(feature);
        trace.steps.push_back({feature, selection_seq, accs[best_ci]});
    }

    if (!stopped) {
        trace.converged_steps = trace.steps.size();
        trace.stop_reason = "max features";
    }
    return trace;
}

}  // namespace topobias
