#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "topobias/bias.hpp"
#include "topobias/generators.hpp"
#include "topobias/rng.hpp"

using namespace topobias;

namespace {

// 15-slot catalogue (single radius) with hand-filled rows
FeatureMatrix synthetic_matrix() {
    ExperimentConfig cfg;
    cfg.radii.radii = {5.0};
    FeatureMatrix m;
    m.catalogue = FeatureCatalogue::build(cfg);

    Rng rng(77);
    const std::vector<std::string> labels = {"a", "a", "a", "b", "b", "b", "c", "c", "c"};
    for (std::size_t r = 0; r < labels.size(); ++r) {
        FeatureRow row;
        row.topology_id = labels[r] + "-" + std::to_string(r);
        row.generator_label = labels[r];
        for (std::size_t i = 0; i < m.catalogue.size(); ++i)
            row.values.push_back(rng.uniform01() * 10.0 +
                                 (labels[r] == "c" ? 3.0 : 0.0));  // c is offset
        m.rows.push_back(std::move(row));
    }
    return m;
}

std::vector<double> column(const Population& p, std::size_t i) {
    std::vector<double> out;
    for (const FeatureRow* row : p.rows) out.push_back(row->values[i]);
    return out;
}

}  // namespace

TEST_CASE("pooled standard deviation of the worked samples is sqrt(2)") {
    const std::vector<double> sub = {1, 2, 3};
    const std::vector<double> all = {1, 2, 3, 4, 5};
    CHECK(pooled_std(sub, all) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS((void)pooled_std(std::vector<double>{1.0}, all), std::invalid_argument);
}

TEST_CASE("hedges g of the worked samples is 1/sqrt(2)") {
    const std::vector<double> sub = {1, 2, 3};
    const std::vector<double> all = {1, 2, 3, 4, 5};
    CHECK(hedges_g(sub, all) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    // direction: a sub-population with a larger mean gives a negative g
    const std::vector<double> high = {4, 5};
    CHECK(hedges_g(high, all) < 0.0);
}

TEST_CASE("combined bias index is the euclidean norm, 3-4-5 exactly") {
    const std::vector<double> g = {3.0, 4.0};
    CHECK(combine_bias_index(g) == 5.0);
    CHECK(combine_bias_index(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("constant features count zero bias, conflicting constants are degenerate") {
    const std::vector<double> flat_sub = {2.0, 2.0};
    const std::vector<double> flat_all = {2.0, 2.0, 2.0, 2.0};
    CHECK(hedges_g(flat_sub, flat_all) == 0.0);

    const std::vector<double> other = {3.0, 3.0, 3.0};
    CHECK_THROWS_AS((void)hedges_g(flat_sub, other), std::runtime_error);
}

TEST_CASE("sub-population equal to the whole has zero bias index") {
    const FeatureMatrix m = synthetic_matrix();
    const Population all = population_all(m);
    const BiasResult r = bias_index(all, all);
    for (double g : r.per_feature_g) CHECK(g == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.index == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("bias index matches per-column hedges g") {
    const FeatureMatrix m = synthetic_matrix();
    const Population all = population_all(m);
    const Population sub = population_of(m, {"a", "b"});
    const BiasResult r = bias_index(sub, all);
    REQUIRE(r.per_feature_g.size() == m.catalogue.size());

    double norm2 = 0.0;
    for (std::size_t i = 0; i < m.catalogue.size(); ++i) {
        const double expected = hedges_g(column(sub, i), column(all, i));
        CHECK(r.per_feature_g[i] == doctest::Approx(expected).epsilon(1e-12));
        norm2 += expected * expected;
    }
    CHECK(r.index == doctest::Approx(std::sqrt(norm2)).epsilon(1e-12));

    // the "c" rows are offset, so excluding them must leave visible bias
    CHECK(r.index > 0.5);

    CHECK_THROWS_AS((void)population_of(m, {"a", "nope"}), std::invalid_argument);
}

TEST_CASE("bias index is invariant under affine feature maps and row order") {
    const FeatureMatrix m = synthetic_matrix();
    const BiasResult base = bias_index(population_of(m, {"a"}), population_all(m));

    FeatureMatrix scaled = m;
    for (FeatureRow& row : scaled.rows) {
        row.values[2] = row.values[2] * 3.5 + 7.0;
        row.values[9] = row.values[9] * 0.01 - 2.0;
    }
    const BiasResult after = bias_index(population_of(scaled, {"a"}), population_all(scaled));
    for (std::size_t i = 0; i < base.per_feature_g.size(); ++i)
        CHECK(after.per_feature_g[i] == doctest::Approx(base.per_feature_g[i]).epsilon(1e-9));
    CHECK(after.index == doctest::Approx(base.index).epsilon(1e-9));

    FeatureMatrix shuffled = m;
    std::reverse(shuffled.rows.begin(), shuffled.rows.end());
    const BiasResult reordered =
        bias_index(population_of(shuffled, {"a"}), population_all(shuffled));
    CHECK(reordered.index == doctest::Approx(base.index).epsilon(1e-9));
}

TEST_CASE("a negated feature flips g but keeps the index") {
    const FeatureMatrix m = synthetic_matrix();
    const BiasResult base = bias_index(population_of(m, {"b"}), population_all(m));

    FeatureMatrix negated = m;
    for (FeatureRow& row : negated.rows) row.values[4] = -row.values[4];
    const BiasResult after = bias_index(population_of(negated, {"b"}), population_all(negated));
    CHECK(after.per_feature_g[4] == doctest::Approx(-base.per_feature_g[4]).epsilon(1e-9));
    CHECK(after.index == doctest::Approx(base.index).epsilon(1e-9));
}

TEST_CASE("subset ranking is ascending with 1-based ranks and sorted labels") {
    const FeatureMatrix m = synthetic_matrix();
    const BiasReport report = rank_generator_subsets(m, 2, 2);
    CHECK(report.subset_size == 2);
    CHECK(report.catalogue_version == m.catalogue.version());
    CHECK(report.feature_names.size() == m.catalogue.size());
    REQUIRE(report.entries.size() == 3);  // C(3,2)

    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const BiasEntry& e = report.entries[i];
        CHECK(e.rank == i + 1);
        REQUIRE(e.labels.size() == 2);
        CHECK(std::is_sorted(e.labels.begin(), e.labels.end()));
        CHECK(e.per_feature_g.size() == m.catalogue.size());
        if (i > 0) CHECK(e.index >= report.entries[i - 1].index);
        // every entry must equal a directly computed bias index
        const BiasResult direct = bias_index(population_of(m, e.labels), population_all(m));
        CHECK(e.index == doctest::Approx(direct.index).epsilon(1e-12));
    }

    // "c" is the offset population: the most representative pair contains it
    CHECK((report.entries[0].labels == std::vector<std::string>{"a", "c"} ||
           report.entries[0].labels == std::vector<std::string>{"b", "c"}));

    CHECK_THROWS_AS((void)rank_generator_subsets(m, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)rank_generator_subsets(m, 3, 1), std::invalid_argument);
}

TEST_CASE("ranking requires at least two rows per generator") {
    FeatureMatrix m = synthetic_matrix();
    m.rows.pop_back();
    m.rows.pop_back();  // "c" keeps a single row
    CHECK_THROWS_AS((void)rank_generator_subsets(m, 1, 1), std::invalid_argument);
}

TEST_CASE("a duplicated generator ranks worse than mixed pairs") {
    // u1 and u2 sample the same distribution; g is genuinely different.
    // A pair made of the two duplicates misses everything g contributes, so
    // both mixed pairs must carry a lower bias index.
    ExperimentConfig cfg;
    cfg.area_side = 400.0;
    cfg.nodes_per_topology = 50;
    cfg.topologies_per_generator = 25;
    cfg.radii.radii = {10, 25, 60};
    cfg.quadrat_divisions = 4;
    cfg.folds = 2;
    cfg.base_seed = 11;

    std::vector<GeneratorSpec> specs(3);
    specs[0] = {GeneratorKind::uniform, "u1", UniformParams{}, 0};
    specs[1] = {GeneratorKind::uniform, "u2", UniformParams{}, 0};
    specs[2] = {GeneratorKind::growth, "g", GrowthParams{0.9, 20.0}, 0};

    const Corpus corpus = generate_corpus(specs, cfg, 2);
    const FeatureMatrix m = extract_feature_matrix(corpus.topologies, cfg, 2);

    const BiasReport report = rank_generator_subsets(m, 2, 2);
    REQUIRE(report.entries.size() == 3);

    double dup_index = -1.0;
    std::vector<double> mixed;
    for (const BiasEntry& e : report.entries) {
        if ((e.labels == std::vector<std::string>{"u1", "u2"}))
            dup_index = e.index;
        else
            mixed.push_back(e.index);
    }
    REQUIRE(dup_index >= 0.0);
    REQUIRE(mixed.size() == 2);
    CHECK(mixed[0] < dup_index);
    CHECK(mixed[1] < dup_index);
    CHECK((report.entries.back().labels == std::vector<std::string>{"u1", "u2"}));
}
