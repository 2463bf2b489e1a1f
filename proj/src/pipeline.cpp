#include "topobias/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "topobias/matrix_io.hpp"
#include "topobias/parallel.hpp"
#include "topobias/topology_io.hpp"

namespace topobias {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw std::runtime_error(std::string(where) + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                known = true;
                break;
            }
        if (!known)
            throw std::runtime_error(std::string(where) + ": unknown key '" + item.key() + "'");
    }
}

std::string fss_mode_to_string(FssMode mode) {
    return mode == FssMode::cross_validated ? "cross_validated" : "single_fold";
}

FssMode fss_mode_from_string(const std::string& s) {
    if (s == "cross_validated") return FssMode::cross_validated;
    if (s == "single_fold") return FssMode::single_fold;
    throw std::runtime_error("unknown fss mode '" + s + "'");
}

json experiment_to_json(const ExperimentConfig& e) {
    return json{{"area_side", e.area_side},
                {"nodes_per_topology", e.nodes_per_topology},
                {"topologies_per_generator", e.topologies_per_generator},
                {"radii", e.radii.radii},
                {"quadrat_divisions", e.quadrat_divisions},
                {"folds", e.folds},
                {"base_seed", e.base_seed},
                {"quantization_step", e.quantization_step}};
}

ExperimentConfig experiment_from_json(const json& j) {
    check_keys(j, "experiment",
               {"area_side", "nodes_per_topology", "topologies_per_generator", "radii",
                "quadrat_divisions", "folds", "base_seed", "quantization_step"});
    ExperimentConfig e;
    if (j.contains("area_side")) j.at("area_side").get_to(e.area_side);
    if (j.contains("nodes_per_topology")) j.at("nodes_per_topology").get_to(e.nodes_per_topology);
    if (j.contains("topologies_per_generator"))
        j.at("topologies_per_generator").get_to(e.topologies_per_generator);
    if (j.contains("radii")) j.at("radii").get_to(e.radii.radii);
    if (j.contains("quadrat_divisions")) j.at("quadrat_divisions").get_to(e.quadrat_divisions);
    if (j.contains("folds")) j.at("folds").get_to(e.folds);
    if (j.contains("base_seed")) j.at("base_seed").get_to(e.base_seed);
    if (j.contains("quantization_step")) j.at("quantization_step").get_to(e.quantization_step);
    e.validate();
    return e;
}

json spec_to_json(const GeneratorSpec& spec) {
    json j{{"kind", to_string(spec.kind)}, {"label", spec.label}, {"seed", spec.seed}};
    if (const auto* heavy = std::get_if<HeavyTailedParams>(&spec.params)) {
        j["grid_divisions"] = heavy->grid_divisions;
        j["tail_exponent"] = heavy->tail_exponent;
    } else if (const auto* growth = std::get_if<GrowthParams>(&spec.params)) {
        j["attach_bias"] = growth->attach_bias;
        if (growth->attach_radius) j["attach_radius"] = *growth->attach_radius;
    }
    return j;
}

GeneratorSpec spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::runtime_error("generator spec: missing 'kind'");
    GeneratorSpec spec;
    spec.kind = generator_kind_from_string(j.at("kind").get<std::string>());
    spec.label = j.contains("label") ? j.at("label").get<std::string>() : to_string(spec.kind);
    if (j.contains("seed")) j.at("seed").get_to(spec.seed);

    switch (spec.kind) {
        case GeneratorKind::uniform:
            check_keys(j, "generator spec", {"kind", "label", "seed"});
            spec.params = UniformParams{};
            break;
        case GeneratorKind::heavy_tailed_grid: {
            check_keys(j, "generator spec",
                       {"kind", "label", "seed", "grid_divisions", "tail_exponent"});
            HeavyTailedParams p;
            if (j.contains("grid_divisions")) j.at("grid_divisions").get_to(p.grid_divisions);
            if (j.contains("tail_exponent")) j.at("tail_exponent").get_to(p.tail_exponent);
            spec.params = p;
            break;
        }
        case GeneratorKind::growth: {
            check_keys(j, "generator spec",
                       {"kind", "label", "seed", "attach_bias", "attach_radius"});
            GrowthParams p;
            if (j.contains("attach_bias")) j.at("attach_bias").get_to(p.attach_bias);
            if (j.contains("attach_radius")) p.attach_radius = j.at("attach_radius").get<double>();
            spec.params = p;
            break;
        }
    }
    spec.validate();
    return spec;
}

json meta_json(const std::string& catalogue_version, const json& config_echo) {
    return json{{"tool", kToolName},
                {"tool_version", kToolVersion},
                {"catalogue_version", catalogue_version},
                {"config", config_echo}};
}

std::string fmt3(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

const json& require(const json& j, const char* key, const char* where) {
    if (!j.contains(key))
        throw std::runtime_error(std::string("summary: ") + where + " lacks '" + key + "'");
    return j.at(key);
}

void progress(const char* stage, const std::string& detail) {
    std::fprintf(stderr, "[%s] %s: %s\n", kToolName, stage, detail.c_str());
}

[[noreturn]] void stage_fail(const char* stage, const std::exception& e) {
    throw std::runtime_error("stage " + std::string(stage) + ": " + e.what());
}

std::filesystem::path out_path(const RunConfig& cfg, const char* name) {
    return std::filesystem::path(cfg.out_dir) / name;
}

void require_file(const std::filesystem::path& p, const char* stage) {
    if (!std::filesystem::exists(p))
        throw std::runtime_error(std::string(stage) + " needs " + p.string() +
                                 ", which does not exist; run the producing stage first");
}

}  // namespace

json config_to_json(const RunConfig& cfg) {
    json gens = json::array();
    for (const GeneratorSpec& spec : cfg.generators) gens.push_back(spec_to_json(spec));
    json kinds = json::array();
    for (NbKind k : cfg.classify.kinds) kinds.push_back(to_string(k));
    return json{{"experiment", experiment_to_json(cfg.experiment)},
                {"generators", gens},
                {"out_dir", cfg.out_dir},
                {"threads", cfg.threads},
                {"classify", {{"kinds", kinds}, {"seed", cfg.classify.seed}}},
                {"fss",
                 {{"kind", to_string(cfg.fss.kind)},
                  {"mode", fss_mode_to_string(cfg.fss.mode)},
                  {"fold", cfg.fss.fold},
                  {"max_features", cfg.fss.max_features},
                  {"full_trace", cfg.fss.full_trace},
                  {"seed", cfg.fss.seed}}}};
}

RunConfig config_from_json(const json& j) {
    check_keys(j, "config", {"experiment", "generators", "out_dir", "threads", "classify", "fss"});
    RunConfig cfg;
    if (j.contains("experiment")) cfg.experiment = experiment_from_json(j.at("experiment"));
    if (j.contains("generators")) {
        cfg.generators.clear();
        for (const json& g : j.at("generators")) cfg.generators.push_back(spec_from_json(g));
    }
    if (j.contains("out_dir")) j.at("out_dir").get_to(cfg.out_dir);
    if (j.contains("threads")) j.at("threads").get_to(cfg.threads);
    if (j.contains("classify")) {
        const json& c = j.at("classify");
        check_keys(c, "classify", {"kinds", "seed"});
        if (c.contains("kinds")) {
            cfg.classify.kinds.clear();
            for (const json& k : c.at("kinds"))
                cfg.classify.kinds.push_back(nb_kind_from_string(k.get<std::string>()));
            if (cfg.classify.kinds.empty())
                throw std::runtime_error("classify: 'kinds' must not be empty");
        }
        if (c.contains("seed")) c.at("seed").get_to(cfg.classify.seed);
    } else {
        cfg.classify.seed = cfg.experiment.base_seed;
    }
    cfg.fss.seed = cfg.classify.seed;
    if (j.contains("fss")) {
        const json& f = j.at("fss");
        check_keys(f, "fss", {"kind", "mode", "fold", "max_features", "full_trace", "seed"});
        if (f.contains("kind")) cfg.fss.kind = nb_kind_from_string(f.at("kind").get<std::string>());
        if (f.contains("mode")) cfg.fss.mode = fss_mode_from_string(f.at("mode").get<std::string>());
        if (f.contains("fold")) f.at("fold").get_to(cfg.fss.fold);
        if (f.contains("max_features")) f.at("max_features").get_to(cfg.fss.max_features);
        if (f.contains("full_trace")) f.at("full_trace").get_to(cfg.fss.full_trace);
        if (f.contains("seed")) f.at("seed").get_to(cfg.fss.seed);
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return config_from_json(read_json_file(path));
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    return j;
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

json manifest_to_json(const CorpusManifest& manifest) {
    json specs = json::array();
    for (const GeneratorSpec& spec : manifest.specs) specs.push_back(spec_to_json(spec));
    json entries = json::array();
    for (const ManifestEntry& e : manifest.entries) {
        json row{{"id", e.topology_id}, {"generator", e.generator_label}, {"file", e.file}};
        row["seed"] = e.seed ? json(*e.seed) : json(nullptr);
        entries.push_back(std::move(row));
    }
    return json{{"format", "topobias-manifest-v1"},
                {"tool_version", kToolVersion},
                {"experiment", experiment_to_json(manifest.config)},
                {"generators", specs},
                {"entries", entries}};
}

CorpusManifest manifest_from_json(const json& j) {
    check_keys(j, "manifest", {"format", "tool_version", "experiment", "generators", "entries"});
    if (!j.contains("format") || j.at("format") != "topobias-manifest-v1")
        throw std::runtime_error("manifest: missing or unsupported 'format'");
    CorpusManifest m;
    m.config = experiment_from_json(require(j, "experiment", "manifest"));
    for (const json& g : require(j, "generators", "manifest")) m.specs.push_back(spec_from_json(g));
    for (const json& e : require(j, "entries", "manifest")) {
        check_keys(e, "manifest entry", {"id", "generator", "seed", "file"});
        ManifestEntry entry;
        e.at("id").get_to(entry.topology_id);
        e.at("generator").get_to(entry.generator_label);
        e.at("file").get_to(entry.file);
        if (e.contains("seed") && !e.at("seed").is_null())
            entry.seed = e.at("seed").get<std::uint64_t>();
        m.entries.push_back(std::move(entry));
    }
    return m;
}

json bias_report_json(const std::vector<BiasReport>& groups, const json& config_echo) {
    if (groups.empty()) throw std::invalid_argument("bias report: no subset groups");
    for (const BiasReport& g : groups)
        if (g.catalogue_version != groups.front().catalogue_version)
            throw std::invalid_argument("bias report: catalogue versions differ between groups");

    json out{{"meta", meta_json(groups.front().catalogue_version, config_echo)},
             {"feature_names", groups.front().feature_names},
             {"groups", json::array()}};
    for (const BiasReport& g : groups) {
        json entries = json::array();
        for (const BiasEntry& e : g.entries)
            entries.push_back(json{{"rank", e.rank},
                                   {"generators", e.labels},
                                   {"bias_index", e.index},
                                   {"per_feature_g", e.per_feature_g}});
        out["groups"].push_back(json{{"subset_size", g.subset_size}, {"entries", entries}});
    }
    return out;
}

json classification_report_json(const std::vector<ClassificationReport>& reports,
                                const json& config_echo) {
    if (reports.empty()) throw std::invalid_argument("classification report: no runs");
    for (const ClassificationReport& r : reports)
        if (r.catalogue_version != reports.front().catalogue_version)
            throw std::invalid_argument("classification report: catalogue versions differ");

    json out{{"meta", meta_json(reports.front().catalogue_version, config_echo)},
             {"reports", json::array()}};
    for (const ClassificationReport& r : reports) {
        json per_class = json::array();
        for (std::size_t i = 0; i < r.classes.size(); ++i) {
            std::size_t row_total = 0, errors = 0;
            for (std::size_t p = 0; p < r.classes.size(); ++p) {
                row_total += r.confusion[i][p];
                if (p != i) errors += r.confusion[i][p];
            }
            json shares = json::object();
            for (std::size_t p = 0; p < r.classes.size(); ++p)
                if (p != i && r.confusion[i][p] > 0)
                    shares[r.classes[p]] =
                        static_cast<double>(r.confusion[i][p]) / static_cast<double>(errors);
            per_class.push_back(json{
                {"class", r.classes[i]},
                {"error_rate",
                 row_total ? static_cast<double>(errors) / static_cast<double>(row_total) : 0.0},
                {"misclassified_as", shares}});
        }
        json entry{{"kind", to_string(r.kind)},
                   {"folds", r.folds},
                   {"seed", r.seed},
                   {"classes", r.classes},
                   {"fold_accuracies", r.fold_accuracy},
                   {"mean_accuracy", r.mean_accuracy},
                   {"confusion", r.confusion},
                   {"per_class", per_class}};
        if (r.pair) entry["pair"] = json::array({r.pair->first, r.pair->second});
        out["reports"].push_back(std::move(entry));
    }
    return out;
}

json fss_report_json(const FssTrace& trace, const std::vector<std::string>& feature_names,
                     const json& config_echo) {
    json steps = json::array();
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const FssStep& s = trace.steps[i];
        json names = json::array();
        for (std::size_t f : s.feature_set) names.push_back(feature_names.at(f));
        steps.push_back(json{{"step", i + 1},
                             {"feature_index", s.feature},
                             {"feature_name", feature_names.at(s.feature)},
                             {"accuracy", s.accuracy},
                             {"feature_set", s.feature_set},
                             {"feature_names", names}});
    }
    return json{{"meta", meta_json(trace.catalogue_version, config_echo)},
                {"kind", to_string(trace.kind)},
                {"mode", fss_mode_to_string(trace.options.mode)},
                {"folds", trace.options.folds},
                {"seed", trace.options.seed},
                {"fold", trace.options.fold},
                {"max_features", trace.options.max_features},
                {"full_trace", trace.options.full_trace},
                {"steps", steps},
                {"converged_steps", trace.converged_steps},
                {"stop_reason", trace.stop_reason}};
}

std::string emit_summary(const std::optional<json>& bias, const std::optional<json>& classification,
                         const std::optional<json>& fss) {
    std::string md = "# topobias summary\n";

    md += "\n## Generator subsets by bias index\n\n";
    if (bias) {
        md += "| Rank | Generators | Bias index |\n|---|---|---|\n";
        for (const json& group : require(*bias, "groups", "bias report")) {
            for (const json& e : require(group, "entries", "bias group")) {
                std::string labels;
                for (const json& l : require(e, "generators", "bias entry")) {
                    if (!labels.empty()) labels += " + ";
                    labels += l.get<std::string>();
                }
                md += "| " + std::to_string(require(e, "rank", "bias entry").get<std::size_t>()) +
                      " | " + labels + " | " +
                      fmt3(require(e, "bias_index", "bias entry").get<double>()) + " |\n";
            }
        }
    } else {
        md += "Not run.\n";
    }

    md += "\n## Classification accuracy\n\n";
    if (classification) {
        md += "| Model | Folds | Mean accuracy |\n|---|---|---|\n";
        for (const json& r : require(*classification, "reports", "classification report")) {
            std::string model = require(r, "kind", "classification run").get<std::string>();
            if (r.contains("pair"))
                model += " (" + r.at("pair")[0].get<std::string>() + " vs " +
                         r.at("pair")[1].get<std::string>() + ")";
            md += "| " + model + " | " +
                  std::to_string(require(r, "folds", "classification run").get<std::size_t>()) +
                  " | " + fmt3(require(r, "mean_accuracy", "classification run").get<double>()) +
                  " |\n";
        }
    } else {
        md += "Not run.\n";
    }

    md += "\n## Forward feature selection\n\n";
    if (fss) {
        md += "| Step | Feature | Accuracy |\n|---|---|---|\n";
        for (const json& s : require(*fss, "steps", "fss report"))
            md += "| " + std::to_string(require(s, "step", "fss step").get<std::size_t>()) + " | " +
                  require(s, "feature_name", "fss step").get<std::string>() + " | " +
                  fmt3(require(s, "accuracy", "fss step").get<double>()) + " |\n";
        md += "\nStopped after " +
              std::to_string(require(*fss, "converged_steps", "fss report").get<std::size_t>()) +
              " features: " + require(*fss, "stop_reason", "fss report").get<std::string>() + ".\n";
    } else {
        md += "Not run.\n";
    }

    md += "\n## Confusion matrix\n\n";
    if (classification) {
        const json& reports = classification->at("reports");
        if (reports.empty()) throw std::runtime_error("summary: classification report is empty");
        const json& first = reports[0];
        const auto classes = require(first, "classes", "classification run");
        md += "Model: " + first.at("kind").get<std::string>() + ", counts over all test folds.\n\n";
        md += "| True \\ Predicted |";
        for (const json& c : classes) md += " " + c.get<std::string>() + " |";
        md += "\n|---|";
        for (std::size_t i = 0; i < classes.size(); ++i) md += "---|";
        md += "\n";
        const json& confusion = require(first, "confusion", "classification run");
        for (std::size_t i = 0; i < classes.size(); ++i) {
            md += "| " + classes[i].get<std::string>() + " |";
            for (std::size_t j2 = 0; j2 < classes.size(); ++j2)
                md += " " + std::to_string(confusion[i][j2].get<std::size_t>()) + " |";
            md += "\n";
        }
    } else {
        md += "Not run.\n";
    }
    return md;
}

void stage_gen(const RunConfig& cfg) {
    try {
        std::vector<GeneratorSpec> specs = cfg.generators;
        for (GeneratorSpec& spec : specs) spec.seed = cfg.experiment.base_seed;
        Corpus corpus = generate_corpus(specs, cfg.experiment, cfg.threads);

        const std::filesystem::path out(cfg.out_dir);
        std::filesystem::create_directories(out / "topologies");
        parallel_for_indexed(corpus.topologies.size(), cfg.threads, [&](std::size_t i) {
            write_topology_csv(corpus.topologies[i], out / corpus.manifest.entries[i].file);
        });
        write_json_file(manifest_to_json(corpus.manifest), out / "manifest.json");
        progress("gen", std::to_string(corpus.topologies.size()) + " topologies -> " +
                            (out / "topologies").string());
    } catch (const std::exception& e) {
        stage_fail("gen", e);
    }
}

FeatureMatrix extract_from_manifest(const std::filesystem::path& dir,
                                    const ExperimentConfig& experiment, int threads) {
    const std::filesystem::path manifest_path = dir / "manifest.json";
    require_file(manifest_path, "extract");
    const CorpusManifest manifest = manifest_from_json(read_json_file(manifest_path));
    if (manifest.entries.empty()) throw std::runtime_error("manifest lists no topologies");

    std::vector<Topology> topologies(manifest.entries.size());
    parallel_for_indexed(manifest.entries.size(), threads, [&](std::size_t i) {
        const ManifestEntry& e = manifest.entries[i];
        Topology t = read_topology_csv(dir / e.file);
        t.id = e.topology_id;
        t.generator_label = e.generator_label;
        t.seed = e.seed;
        topologies[i] = std::move(t);
    });
    return extract_feature_matrix(topologies, experiment, threads);
}

void stage_extract(const RunConfig& cfg) {
    try {
        const FeatureMatrix m = extract_from_manifest(cfg.out_dir, cfg.experiment, cfg.threads);
        write_features_csv(m, out_path(cfg, "features.csv"));
        progress("extract", std::to_string(m.rows.size()) + " rows x " +
                                std::to_string(m.catalogue.size()) + " features -> " +
                                out_path(cfg, "features.csv").string());
    } catch (const std::exception& e) {
        stage_fail("extract", e);
    }
}

void stage_bias(const RunConfig& cfg) {
    try {
        require_file(out_path(cfg, "features.csv"), "bias");
        const FeatureMatrix m = read_features_csv(out_path(cfg, "features.csv"));
        const Population all = population_all(m);
        if (all.labels.size() < 2)
            throw std::runtime_error("need at least 2 generator labels, found " +
                                     std::to_string(all.labels.size()));
        std::vector<BiasReport> groups;
        for (std::size_t p = 1; p < all.labels.size(); ++p)
            groups.push_back(rank_generator_subsets(m, p, cfg.threads));
        write_json_file(bias_report_json(groups, config_to_json(cfg)),
                        out_path(cfg, "bias_report.json"));
        progress("bias", std::to_string(groups.size()) + " subset sizes -> " +
                             out_path(cfg, "bias_report.json").string());
    } catch (const std::exception& e) {
        stage_fail("bias", e);
    }
}

void stage_classify(const RunConfig& cfg) {
    try {
        require_file(out_path(cfg, "features.csv"), "classify");
        const FeatureMatrix m = read_features_csv(out_path(cfg, "features.csv"));
        const GroundTruth gt = GroundTruth::from_matrix(m);
        std::vector<ClassificationReport> reports;
        for (NbKind kind : cfg.classify.kinds)
            reports.push_back(confusion_and_pairwise(gt, cfg.experiment.folds, kind,
                                                     cfg.classify.seed, std::nullopt, cfg.threads));
        write_json_file(classification_report_json(reports, config_to_json(cfg)),
                        out_path(cfg, "classification_report.json"));
        std::string kinds;
        for (const ClassificationReport& r : reports) {
            if (!kinds.empty()) kinds += ", ";
            kinds += to_string(r.kind) + " " + fmt3(r.mean_accuracy);
        }
        progress("classify", kinds + " -> " + out_path(cfg, "classification_report.json").string());
    } catch (const std::exception& e) {
        stage_fail("classify", e);
    }
}

void stage_fss(const RunConfig& cfg) {
    try {
        require_file(out_path(cfg, "features.csv"), "fss");
        const FeatureMatrix m = read_features_csv(out_path(cfg, "features.csv"));
        const GroundTruth gt = GroundTruth::from_matrix(m);

        FssOptions opts;
        opts.mode = cfg.fss.mode;
        opts.folds = cfg.experiment.folds;
        opts.seed = cfg.fss.seed;
        opts.fold = cfg.fss.fold;
        opts.max_features = cfg.fss.max_features;
        opts.full_trace = cfg.fss.full_trace;
        const FssTrace trace = forward_sequential_selection(gt, cfg.fss.kind, opts, cfg.threads);

        std::vector<std::string> names;
        for (const FeatureDescriptor& d : m.catalogue.slots()) names.push_back(d.name);
        write_json_file(fss_report_json(trace, names, config_to_json(cfg)),
                        out_path(cfg, "fss.json"));
        progress("fss", std::to_string(trace.steps.size()) + " steps, stop: " + trace.stop_reason +
                            " -> " + out_path(cfg, "fss.json").string());
    } catch (const std::exception& e) {
        stage_fail("fss", e);
    }
}

void stage_report(const RunConfig& cfg) {
    try {
        auto maybe = [&](const char* name) -> std::optional<json> {
            const std::filesystem::path p = out_path(cfg, name);
            if (!std::filesystem::exists(p)) return std::nullopt;
            return read_json_file(p);
        };
        const std::string md = emit_summary(maybe("bias_report.json"),
                                            maybe("classification_report.json"),
                                            maybe("fss.json"));
        std::ofstream out(out_path(cfg, "summary.md"), std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + out_path(cfg, "summary.md").string());
        out << md;
        if (!out) throw std::runtime_error("write failed for " + out_path(cfg, "summary.md").string());
        progress("report", out_path(cfg, "summary.md").string());
    } catch (const std::exception& e) {
        stage_fail("report", e);
    }
}

void run_pipeline(const RunConfig& cfg) {
    cfg.experiment.validate();
    stage_gen(cfg);
    stage_extract(cfg);
    stage_bias(cfg);
    stage_classify(cfg);
    stage_fss(cfg);
    stage_report(cfg);
}

}  // namespace topobias
