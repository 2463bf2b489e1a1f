#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "doctest.h"
#include "topobias/classify.hpp"
#include "topobias/rng.hpp"

using namespace topobias;

namespace {

// 15-slot catalogue (single radius); values come from the fill callback
FeatureMatrix make_matrix(const std::vector<std::string>& labels,
                          const std::function<double(std::size_t, std::size_t)>& fill) {
    ExperimentConfig cfg;
    cfg.radii.radii = {5.0};
    FeatureMatrix m;
    m.catalogue = FeatureCatalogue::build(cfg);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        FeatureRow row;
        row.topology_id = labels[r] + "-" + std::to_string(r);
        row.generator_label = labels[r];
        for (std::size_t i = 0; i < m.catalogue.size(); ++i) row.values.push_back(fill(r, i));
        m.rows.push_back(std::move(row));
    }
    return m;
}

std::vector<std::size_t> iota_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    return rows;
}

// noise matrix: both classes sample the same distribution
FeatureMatrix noise_matrix(std::size_t per_class, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < 2 * per_class; ++i)
        labels.push_back(i % 2 == 0 ? "left" : "right");
    return make_matrix(labels, [&](std::size_t, std::size_t) { return rng.uniform01(); });
}

}  // namespace

TEST_CASE("ground truth classes are sorted and rows indexed") {
    const FeatureMatrix m = make_matrix({"b", "a", "c", "a"},
                                        [](std::size_t r, std::size_t) { return double(r); });
    const GroundTruth gt = GroundTruth::from_matrix(m);
    CHECK((gt.classes == std::vector<std::string>{"a", "b", "c"}));
    CHECK((gt.row_class == std::vector<std::size_t>{1, 0, 2, 0}));
    CHECK(gt.feature_count() == 15);
    REQUIRE(gt.rows.size() == 4);
    CHECK(gt.rows[2][0] == 2.0);

    const GroundTruth pair = gt.restricted_to("c", "a");
    CHECK((pair.classes == std::vector<std::string>{"a", "c"}));
    CHECK(pair.rows.size() == 3);
    CHECK_THROWS_AS((void)gt.restricted_to("a", "a"), std::invalid_argument);
    CHECK_THROWS_AS((void)gt.restricted_to("a", "zz"), std::invalid_argument);
}

TEST_CASE("gaussian naive bayes separates an obvious split") {
    Rng rng(5);
    const std::vector<std::string> labels = {"a", "a", "a", "a", "b", "b", "b", "b"};
    const FeatureMatrix m = make_matrix(labels, [&](std::size_t r, std::size_t i) {
        if (i == 0) return (r < 4) ? rng.uniform01() : 10.0 + rng.uniform01();
        return rng.uniform01();  // all other slots are noise
    });
    const GroundTruth gt = GroundTruth::from_matrix(m);
    const std::vector<std::size_t> active = {0};
    const NaiveBayesModel model =
        train_naive_bayes(NbKind::gaussian, gt, iota_rows(8), active);

    std::vector<double> probe(15, 0.5);
    probe[0] = 0.4;
    CHECK(predict(model, probe).label == "a");
    probe[0] = 10.6;
    CHECK(predict(model, probe).label == "b");

    const Prediction p = predict(model, probe);
    REQUIRE(p.log_scores.size() == 2);
    CHECK(std::isfinite(p.log_scores[0]));
    CHECK(p.log_scores[1] > p.log_scores[0]);
}

TEST_CASE("prediction ties resolve to the first class in sorted order") {
    // both classes carry identical training data, so scores tie exactly
    const std::vector<std::string> labels = {"y", "y", "x", "x"};
    const FeatureMatrix m = make_matrix(labels, [](std::size_t r, std::size_t) {
        return (r % 2 == 0) ? 0.0 : 1.0;  // same two rows per class
    });
    const GroundTruth gt = GroundTruth::from_matrix(m);
    for (NbKind kind : {NbKind::gaussian, NbKind::bernoulli, NbKind::multinomial}) {
        const NaiveBayesModel model =
            train_naive_bayes(kind, gt, iota_rows(4), std::vector<std::size_t>{0});
        const Prediction p = predict(model, std::vector<double>(15, 0.5));
        CHECK(p.log_scores[0] == p.log_scores[1]);
        CHECK(p.label == "x");
    }
}

TEST_CASE("priors follow class frequencies") {
    const std::vector<std::string> labels = {"a", "a", "a", "a", "a", "a", "b", "b"};
    Rng rng(3);
    const FeatureMatrix m =
        make_matrix(labels, [&](std::size_t, std::size_t) { return rng.uniform01(); });
    const GroundTruth gt = GroundTruth::from_matrix(m);
    const NaiveBayesModel model =
        train_naive_bayes(NbKind::gaussian, gt, iota_rows(8), std::vector<std::size_t>{0});
    REQUIRE(model.log_prior.size() == 2);
    CHECK(model.log_prior[0] == doctest::Approx(std::log(6.0 / 8.0)).epsilon(1e-12));
    CHECK(model.log_prior[1] == doctest::Approx(std::log(2.0 / 8.0)).epsilon(1e-12));
}

TEST_CASE("bernoulli parameters use the median threshold and add-one smoothing") {
    const std::vector<std::string> labels = {"a", "a", "a", "a", "b", "b", "b", "b"};
    const FeatureMatrix m = make_matrix(labels, [](std::size_t r, std::size_t i) {
        if (i != 0) return 0.5;
        return (r < 4) ? 1.0 + double(r) : 11.0 + double(r - 4);  // 1..4 vs 11..14
    });
    const GroundTruth gt = GroundTruth::from_matrix(m);
    const NaiveBayesModel model =
        train_naive_bayes(NbKind::bernoulli, gt, iota_rows(8), std::vector<std::size_t>{0});

    CHECK(model.threshold[0] == doctest::Approx(7.5).epsilon(1e-12));  // (4 + 11) / 2
    // class a: 0 of 4 above the threshold -> (0+1)/(4+2); class b: 4 of 4
    CHECK(model.log_on[0][0] == doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-12));
    CHECK(model.log_off[0][0] == doctest::Approx(std::log(5.0 / 6.0)).epsilon(1e-12));
    CHECK(model.log_on[1][0] == doctest::Approx(std::log(5.0 / 6.0)).epsilon(1e-12));
    CHECK(model.log_off[1][0] == doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-12));

    std::vector<double> probe(15, 0.5);
    probe[0] = 100.0;
    CHECK(predict(model, probe).label == "b");
    probe[0] = -100.0;
    CHECK(predict(model, probe).label == "a");
}

TEST_CASE("multinomial bins are min-max scaled and clamp out-of-range probes") {
    const std::vector<std::string> labels = {"a", "a", "a", "a", "b", "b", "b", "b"};
    const FeatureMatrix m = make_matrix(labels, [](std::size_t r, std::size_t i) {
        if (i != 0) return 0.25;
        return (r < 4) ? double(r) : 12.0 + double(r - 4);  // 0..3 vs 12..15
    });
    const GroundTruth gt = GroundTruth::from_matrix(m);
    const NaiveBayesModel model =
        train_naive_bayes(NbKind::multinomial, gt, iota_rows(8), std::vector<std::size_t>{0});

    CHECK(model.bin_lo[0] == doctest::Approx(0.0));
    CHECK(model.bin_width[0] == doctest::Approx(15.0 / 16.0).epsilon(1e-12));
    // class a fills bins 0..3 with one row each: log((1+1)/(4+16)) for bin 0
    CHECK(model.log_bin[0][0] == doctest::Approx(std::log(2.0 / 20.0)).epsilon(1e-12));
    // bin 15 holds no a-rows: log(1/20)
    CHECK(model.log_bin[0][15] == doctest::Approx(std::log(1.0 / 20.0)).epsilon(1e-12));

    // probes beyond the training range clamp instead of throwing
    std::vector<double> probe(15, 0.25);
    probe[0] = 1e9;
    CHECK(predict(model, probe).label == "b");
    probe[0] = -1e9;
    CHECK(predict(model, probe).label == "a");
}

TEST_CASE("training validates its inputs") {
    Rng rng(4);
    const FeatureMatrix one_class =
        make_matrix({"a", "a", "a"}, [&](std::size_t, std::size_t) { return rng.uniform01(); });
    const GroundTruth gt1 = GroundTruth::from_matrix(one_class);
    CHECK_THROWS_AS(
        (void)train_naive_bayes(NbKind::gaussian, gt1, iota_rows(3), std::vector<std::size_t>{0}),
        std::invalid_argument);

    const FeatureMatrix thin = make_matrix({"a", "a", "b"}, [&](std::size_t, std::size_t) {
        return rng.uniform01();
    });
    const GroundTruth gt2 = GroundTruth::from_matrix(thin);
    CHECK_THROWS_AS(
        (void)train_naive_bayes(NbKind::gaussian, gt2, iota_rows(3), std::vector<std::size_t>{0}),
        std::invalid_argument);

    const FeatureMatrix ok = noise_matrix(3, 9);
    const GroundTruth gt3 = GroundTruth::from_matrix(ok);
    CHECK_THROWS_AS((void)train_naive_bayes(NbKind::gaussian, gt3, iota_rows(6),
                                            std::vector<std::size_t>{0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)train_naive_bayes(NbKind::gaussian, gt3, iota_rows(6),
                                            std::vector<std::size_t>{99}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)train_naive_bayes(NbKind::gaussian, gt3, iota_rows(6),
                                            std::vector<std::size_t>{}),
                    std::invalid_argument);
}

TEST_CASE("prediction checks the catalogue version") {
    const FeatureMatrix m = noise_matrix(3, 21);
    const GroundTruth gt = GroundTruth::from_matrix(m);
    const NaiveBayesModel model =
        train_naive_bayes(NbKind::gaussian, gt, iota_rows(6), std::vector<std::size_t>{0});

    FeatureVector v;
    v.values.assign(15, 0.5);
    v.catalogue_version = model.catalogue_version;
    CHECK_NOTHROW((void)predict(model, v));
    v.catalogue_version = "topobias-features-v1;radii=7";
    CHECK_THROWS_AS((void)predict(model, v), std::invalid_argument);
}

TEST_CASE("stratified folds balance every class") {
    std::vector<std::string> labels;
    for (int i = 0; i < 10; ++i) labels.push_back("a");
    for (int i = 0; i < 7; ++i) labels.push_back("b");
    Rng rng(6);
    const FeatureMatrix m =
        make_matrix(labels, [&](std::size_t, std::size_t) { return rng.uniform01(); });
    const GroundTruth gt = GroundTruth::from_matrix(m);

    const std::vector<std::size_t> folds = stratified_folds(gt, 4, 123);
    REQUIRE(folds.size() == 17);
    // per-class fold sizes differ by at most one
    for (std::size_t cls = 0; cls < 2; ++cls) {
        std::vector<std::size_t> counts(4, 0);
        for (std::size_t r = 0; r < folds.size(); ++r) {
            REQUIRE(folds[r] < 4);
            if (gt.row_class[r] == cls) ++counts[folds[r]];
        }
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        CHECK(*hi - *lo <= 1);
    }

    CHECK((stratified_folds(gt, 4, 123) == folds));      // same seed, same plan
    CHECK((stratified_folds(gt, 4, 124) != folds));      // different seed differs
    CHECK_THROWS_AS((void)stratified_folds(gt, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)stratified_folds(gt, 8, 1), std::invalid_argument);  // b has 7 rows
}

TEST_CASE("cross-validation is perfect on separated classes") {
    Rng rng(8);
    std::vector<std::string> labels;
    for (int i = 0; i < 30; ++i) labels.push_back(i % 2 == 0 ? "near" : "far");
    const FeatureMatrix m = make_matrix(labels, [&](std::size_t r, std::size_t i) {
        const double base = (r % 2 == 0) ? 0.0 : 50.0;
        return base + rng.uniform01() + double(i);
    });
    const GroundTruth gt = GroundTruth::from_matrix(m);

    for (NbKind kind : {NbKind::gaussian, NbKind::bernoulli, NbKind::multinomial}) {
        const ClassificationReport report = kfold_cross_validate(gt, 5, kind, 42, 2);
        CHECK(report.mean_accuracy == doctest::Approx(1.0));
        REQUIRE(report.fold_accuracy.size() == 5);
        for (double acc : report.fold_accuracy) CHECK(acc == doctest::Approx(1.0));
        REQUIRE(report.confusion.size() == 2);
        CHECK(report.confusion[0][0] == 15);
        CHECK(report.confusion[0][1] == 0);
        CHECK(report.confusion[1][0] == 0);
        CHECK(report.confusion[1][1] == 15);
    }
}

TEST_CASE("report accuracy is the mean of fold accuracies; confusion rows add up") {
    const FeatureMatrix m = noise_matrix(20, 31);
    const GroundTruth gt = GroundTruth::from_matrix(m);
    const ClassificationReport report = kfold_cross_validate(gt, 4, NbKind::gaussian, 7, 2);

    double mean = 0.0;
    for (double a : report.fold_accuracy) mean += a;
    mean /= static_cast<double>(report.fold_accuracy.size());
    CHECK(report.mean_accuracy == doctest::Approx(mean).epsilon(1e-12));

    std::size_t total = 0;
    for (std::size_t c = 0; c < report.confusion.size(); ++c) {
        std::size_t row_sum = 0;
        for (std::size_t p = 0; p < report.confusion[c].size(); ++p)
            row_sum += report.confusion[c][p];
        CHECK(row_sum == 20);  // every row of the class was tested exactly once
        total += row_sum;
    }
    CHECK(total == 40);

    // the fold plan is seed-deterministic, so the whole report is too
    const ClassificationReport again = kfold_cross_validate(gt, 4, NbKind::gaussian, 7, 1);
    CHECK((again.fold_accuracy == report.fold_accuracy));
    CHECK((again.confusion == report.confusion));
}

TEST_CASE("indistinguishable classes score near chance over many fold seeds") {
    // same distribution for both classes: accuracy has mean 1/2; over 20
    // seeds the mean of means stays within 3 analytic standard errors
    const FeatureMatrix m = noise_matrix(30, 77);
    const GroundTruth gt = GroundTruth::from_matrix(m);

    double sum = 0.0;
    const int runs = 20;
    for (int s = 0; s < runs; ++s)
        sum += kfold_cross_validate(gt, 5, NbKind::gaussian, 1000 + s, 2).mean_accuracy;
    const double mean = sum / runs;
    const double se = 3.0 * std::sqrt(0.25 / 60.0) / std::sqrt(double(runs));
    CHECK(std::fabs(mean - 0.5) <= se);
}

TEST_CASE("pairwise restriction reports only the two classes") {
    Rng rng(12);
    std::vector<std::string> labels;
    for (int i = 0; i < 36; ++i) labels.push_back(i % 3 == 0 ? "a" : (i % 3 == 1 ? "b" : "c"));
    const FeatureMatrix m = make_matrix(labels, [&](std::size_t r, std::size_t i) {
        if (i == 2) return double(r % 3) * 40.0 + rng.uniform01();  // separates all three
        return rng.uniform01();
    });
    const GroundTruth gt = GroundTruth::from_matrix(m);

    const ClassificationReport full = confusion_and_pairwise(gt, 4, NbKind::gaussian, 5,
                                                             std::nullopt, 2);
    CHECK(full.classes.size() == 3);
    CHECK_FALSE(full.pair.has_value());

    const ClassificationReport pair = confusion_and_pairwise(
        gt, 4, NbKind::gaussian, 5, std::make_pair(std::string("a"), std::string("c")), 2);
    REQUIRE(pair.pair.has_value());
    CHECK((pair.classes == std::vector<std::string>{"a", "c"}));
    REQUIRE(pair.confusion.size() == 2);
    CHECK(pair.mean_accuracy == doctest::Approx(1.0));
}

TEST_CASE("forward selection finds a planted perfect feature first") {
    Rng rng(13);
    std::vector<std::string> labels;
    for (int i = 0; i < 40; ++i) labels.push_back(i % 2 == 0 ? "a" : "b");
    const FeatureMatrix m = make_matrix(labels, [&](std::size_t r, std::size_t i) {
        if (i == 7) return (r % 2 == 0) ? rng.uniform01() : 100.0 + rng.uniform01();
        return rng.uniform01();
    });
    const GroundTruth gt = GroundTruth::from_matrix(m);

    FssOptions opts;
    opts.folds = 5;
    opts.seed = 3;
    const FssTrace trace = forward_sequential_selection(gt, NbKind::gaussian, opts, 2);

    REQUIRE(trace.steps.size() == 1);
    CHECK(trace.steps[0].feature == 7);
    CHECK(trace.steps[0].accuracy == doctest::Approx(1.0));
    CHECK((trace.steps[0].feature_set == std::vector<std::size_t>{7}));
    CHECK(trace.converged_steps == 1);
    CHECK(trace.stop_reason == "no improvement");
}

TEST_CASE("forward selection improves strictly, then stops; max_features caps it") {
    // slot 2 fully separates {a} from {b, c}; slot 9 separates b from c
    Rng rng(14);
    std::vector<std::string> labels;
    for (int i = 0; i < 36; ++i) labels.push_back(i % 3 == 0 ? "a" : (i % 3 == 1 ? "b" : "c"));
    const FeatureMatrix m = make_matrix(labels, [&](std::size_t r, std::size_t i) {
        if (i == 2) return (r % 3 == 0) ? rng.uniform01() : 60.0 + rng.uniform01();
        if (i == 9) return (r % 3 == 1) ? rng.uniform01() : 60.0 + rng.uniform01();
        return rng.uniform01();
    });
    const GroundTruth gt = GroundTruth::from_matrix(m);

    FssOptions opts;
    opts.folds = 4;
    opts.seed = 9;
    const FssTrace trace = forward_sequential_selection(gt, NbKind::gaussian, opts, 2);
    REQUIRE(trace.steps.size() >= 2);
    for (std::size_t s = 1; s < trace.converged_steps; ++s)
        CHECK(trace.steps[s].accuracy > trace.steps[s - 1].accuracy);
    const std::set<std::size_t> picked(trace.steps[0].feature_set.begin(),
                                       trace.steps[0].feature_set.end());
    CHECK((trace.steps[0].feature == 2 || trace.steps[0].feature == 9));
    CHECK(trace.steps[trace.converged_steps - 1].accuracy == doctest::Approx(1.0));

    FssOptions capped = opts;
    capped.max_features = 1;
    const FssTrace short_trace = forward_sequential_selection(gt, NbKind::gaussian, capped, 2);
    CHECK(short_trace.steps.size() == 1);
    CHECK(short_trace.stop_reason == "max features");
    CHECK(short_trace.steps[0].feature == trace.steps[0].feature);
}

TEST_CASE("a duplicated informative column is never worth adding") {
    Rng rng(15);
    std::vector<std::string> labels;
    for (int i = 0; i < 30; ++i) labels.push_back(i % 2 == 0 ? "a" : "b");
    FeatureMatrix m = make_matrix(labels, [&](std::size_t r, std::size_t i) {
        if (i == 3) return (r % 2 == 0) ? rng.uniform01() : 80.0 + rng.uniform01();
        return rng.uniform01();
    });
    for (FeatureRow& row : m.rows) row.values[5] = row.values[3];  // exact duplicate
    const GroundTruth gt = GroundTruth::from_matrix(m);

    FssOptions opts;
    opts.folds = 5;
    opts.seed = 2;
    const FssTrace trace = forward_sequential_selection(gt, NbKind::gaussian, opts, 2);
    // ties resolve to the smaller slot: 3 wins over its copy at 5
    CHECK(trace.steps[0].feature == 3);
    CHECK(trace.converged_steps == 1);
    CHECK(trace.stop_reason == "no improvement");
}

TEST_CASE("full trace keeps recording the plateau without moving the stop point") {
    Rng rng(16);
    std::vector<std::string> labels;
    for (int i = 0; i < 24; ++i) labels.push_back(i % 2 == 0 ? "a" : "b");
    const FeatureMatrix m = make_matrix(labels, [&](std::size_t r, std::size_t i) {
        if (i == 0) return (r % 2 == 0) ? rng.uniform01() : 50.0 + rng.uniform01();
        return rng.uniform01();
    });
    const GroundTruth gt = GroundTruth::from_matrix(m);

    FssOptions opts;
    opts.folds = 4;
    opts.seed = 5;
    opts.max_features = 4;
    const FssTrace stopped = forward_sequential_selection(gt, NbKind::gaussian, opts, 2);

    FssOptions full = opts;
    full.full_trace = true;
    const FssTrace traced = forward_sequential_selection(gt, NbKind::gaussian, full, 2);

    CHECK(traced.converged_steps == stopped.converged_steps);
    CHECK(traced.stop_reason == stopped.stop_reason);
    REQUIRE(traced.steps.size() == 4);  // recorded up to max_features
    CHECK(traced.steps.size() > stopped.steps.size());
    for (std::size_t s = 0; s < stopped.steps.size(); ++s)
        CHECK(traced.steps[s].feature == stopped.steps[s].feature);
    // plateau steps never beat the converged accuracy
    const double best = stopped.steps[stopped.converged_steps - 1].accuracy;
    for (std::size_t s = stopped.converged_steps; s < traced.steps.size(); ++s)
        CHECK(traced.steps[s].accuracy <= best + 1e-12);
}

TEST_CASE("single-fold selection mode scores the chosen fold") {
    // 60 rows put 15 test rows into the scored fold, enough that no noise
    // column can tie the planted separator at accuracy 1.0
    Rng rng(17);
    std::vector<std::string> labels;
    for (int i = 0; i < 60; ++i) labels.push_back(i % 2 == 0 ? "a" : "b");
    const FeatureMatrix m = make_matrix(labels, [&](std::size_t r, std::size_t i) {
        if (i == 1) return (r % 2 == 0) ? rng.uniform01() : 30.0 + rng.uniform01();
        return rng.uniform01();
    });
    const GroundTruth gt = GroundTruth::from_matrix(m);

    FssOptions opts;
    opts.mode = FssMode::single_fold;
    opts.folds = 4;
    opts.fold = 2;
    opts.seed = 11;
    const FssTrace trace = forward_sequential_selection(gt, NbKind::gaussian, opts, 2);
    CHECK(trace.steps[0].feature == 1);
    CHECK(trace.steps[0].accuracy == doctest::Approx(1.0));

    FssOptions bad = opts;
    bad.fold = 99;
    CHECK_THROWS_AS((void)forward_sequential_selection(gt, NbKind::gaussian, bad, 2),
                    std::invalid_argument);
}

TEST_CASE("nb kind names round-trip") {
    CHECK(nb_kind_from_string("gaussian") == NbKind::gaussian);
    CHECK(nb_kind_from_string("bernoulli") == NbKind::bernoulli);
    CHECK(nb_kind_from_string("multinomial") == NbKind::multinomial);
    CHECK(to_string(NbKind::gaussian) == "gaussian");
    CHECK_THROWS_AS((void)nb_kind_from_string("svm"), std::invalid_argument);
}
