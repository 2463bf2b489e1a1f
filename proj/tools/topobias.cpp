// Command-line front end: generate or import topology corpora, extract
// feature matrices, rank generator subsets by bias index, and measure
// generator distinguishability with naive-Bayes cross-validation and forward
// feature selection. Results go to files; progress goes to stderr.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "topobias/classify.hpp"
#include "topobias/matrix_io.hpp"
#include "topobias/pipeline.hpp"
#include "topobias/topology_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace topobias;

namespace {

GeneratorSpec parse_generator_token(const std::string& token, std::size_t heavy_grid,
                                    double heavy_tail, double growth_bias,
                                    std::optional<double> growth_radius) {
    GeneratorSpec spec;
    const std::size_t eq = token.find('=');
    const std::string kind_token = (eq == std::string::npos) ? token : token.substr(eq + 1);
    spec.label = (eq == std::string::npos) ? token : token.substr(0, eq);
    spec.kind = generator_kind_from_string(kind_token);
    switch (spec.kind) {
        case GeneratorKind::uniform:
            spec.params = UniformParams{};
            break;
        case GeneratorKind::heavy_tailed_grid:
            spec.params = HeavyTailedParams{heavy_grid, heavy_tail};
            break;
        case GeneratorKind::growth:
            spec.params = GrowthParams{growth_bias, growth_radius};
            break;
    }
    spec.validate();
    return spec;
}

fs::path sibling(const std::string& features_path, const char* name) {
    return fs::path(features_path).parent_path() / name;
}

struct ExperimentFlags {
    double area = 1000.0;
    std::size_t nodes = 1000;
    std::size_t per_gen = 1000;
    std::vector<double> radii = {5, 10, 20, 30, 40, 60, 80, 100};
    std::size_t quadrats = 10;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    double step = 1.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--area", area, "Area side length D");
        cmd->add_option("--nodes", nodes, "Nodes per topology");
        cmd->add_option("--per-gen", per_gen, "Topologies per generator");
        cmd->add_option("--radii", radii, "Neighbourhood radii, ascending")->delimiter(',');
        cmd->add_option("--quadrats", quadrats, "Quadrat grid divisions per axis");
        cmd->add_option("--folds", folds, "Cross-validation folds");
        cmd->add_option("--seed", seed, "Base seed");
        cmd->add_option("--step", step, "Internode distance quantization step");
    }

    ExperimentConfig to_config() const {
        ExperimentConfig e;
        e.area_side = area;
        e.nodes_per_topology = nodes;
        e.topologies_per_generator = per_gen;
        e.radii.radii = radii;
        e.quadrat_divisions = quadrats;
        e.folds = folds;
        e.base_seed = seed;
        e.quantization_step = step;
        e.validate();
        return e;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"topobias: placement-topology generation, feature bias and distinguishability"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "Generate a topology corpus with a manifest");
    std::string gen_out;
    std::vector<std::string> gen_generators = {"uniform", "heavy_tailed_grid", "growth"};
    ExperimentFlags gen_flags;
    std::size_t heavy_grid = 10;
    double heavy_tail = 1.2;
    double growth_bias = 0.75;
    double growth_radius = -1.0;  // <= 0: area/20
    int gen_threads = 0;
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--generators", gen_generators,
                    "Comma-separated generator tokens: KIND or LABEL=KIND "
                    "(kinds: uniform, heavy_tailed_grid/heavy, growth)")
        ->delimiter(',');
    gen_flags.add_to(gen);
    gen->add_option("--heavy-grid", heavy_grid, "heavy_tailed_grid: grid divisions per axis");
    gen->add_option("--heavy-tail", heavy_tail, "heavy_tailed_grid: Pareto tail exponent");
    gen->add_option("--growth-bias", growth_bias, "growth: attachment probability");
    gen->add_option("--growth-radius", growth_radius, "growth: attachment radius (default D/20)");
    gen->add_option("--threads", gen_threads, "Worker threads (0 = auto)");
    gen->callback([&] {
        RunConfig cfg;
        cfg.experiment = gen_flags.to_config();
        cfg.out_dir = gen_out;
        cfg.threads = gen_threads;
        const std::optional<double> gr =
            growth_radius > 0.0 ? std::optional<double>(growth_radius) : std::nullopt;
        for (const std::string& token : gen_generators)
            cfg.generators.push_back(
                parse_generator_token(token, heavy_grid, heavy_tail, growth_bias, gr));
        stage_gen(cfg);
    });

    // ---- import ----
    auto* import = app.add_subcommand("import", "Import topology files into a corpus directory");
    std::string import_out, import_label;
    std::vector<std::string> import_files;
    bool import_headerless = false;
    ExperimentFlags import_flags;
    import->add_option("--out", import_out, "Corpus directory (manifest is created or extended)")
        ->required();
    import->add_option("--in", import_files, "Topology files to import")->required();
    import->add_option("--label", import_label, "Generator label for the imported topologies")
        ->required();
    import->add_flag("--headerless", import_headerless,
                     "Inputs are bare x,y rows instead of the topology CSV format");
    import_flags.add_to(import);
    import->callback([&] {
        const fs::path out(import_out);
        const fs::path manifest_path = out / "manifest.json";
        CorpusManifest manifest;
        if (fs::exists(manifest_path)) {
            manifest = manifest_from_json(read_json_file(manifest_path));
            if (manifest.config.area_side != import_flags.area)
                throw std::runtime_error("import: manifest has D=" +
                                         std::to_string(manifest.config.area_side) +
                                         " but --area is " + std::to_string(import_flags.area));
        } else {
            manifest.config = import_flags.to_config();
        }

        std::set<std::string> ids;
        std::size_t label_count = 0;
        for (const ManifestEntry& e : manifest.entries) {
            ids.insert(e.topology_id);
            if (e.generator_label == import_label) ++label_count;
        }

        fs::create_directories(out / "topologies");
        for (const std::string& file : import_files) {
            Topology t = import_topology(file, import_flags.area, import_label, import_headerless);
            char suffix[24];
            std::snprintf(suffix, sizeof(suffix), "-%06zu", label_count++);
            t.id = import_label + suffix;
            if (!ids.insert(t.id).second)
                throw std::runtime_error("import: duplicate topology id '" + t.id + "'");
            const std::string rel = "topologies/" + t.id + ".csv";
            write_topology_csv(t, out / rel);
            manifest.entries.push_back({t.id, import_label, std::nullopt, rel});
        }
        write_json_file(manifest_to_json(manifest), manifest_path);
        std::fprintf(stderr, "[%s] import: %zu topologies as '%s' -> %s\n", kToolName,
                     import_files.size(), import_label.c_str(), manifest_path.string().c_str());
    });

    // ---- extract ----
    auto* extract = app.add_subcommand("extract", "Extract the feature matrix of a corpus");
    std::string extract_in, extract_config, extract_out;
    int extract_threads = 0;
    extract->add_option("--in", extract_in, "Corpus directory with manifest.json")->required();
    extract->add_option("--config", extract_config,
                        "Run-config JSON; its experiment section overrides the manifest's");
    extract->add_option("--out", extract_out, "Output CSV (default <in>/features.csv)");
    extract->add_option("--threads", extract_threads, "Worker threads (0 = auto)");
    extract->callback([&] {
        ExperimentConfig experiment;
        if (!extract_config.empty()) {
            experiment = load_run_config(extract_config).experiment;
        } else {
            experiment = manifest_from_json(read_json_file(fs::path(extract_in) / "manifest.json"))
                             .config;
        }
        const FeatureMatrix m = extract_from_manifest(extract_in, experiment, extract_threads);
        const fs::path out = extract_out.empty() ? fs::path(extract_in) / "features.csv"
                                                 : fs::path(extract_out);
        write_features_csv(m, out);
        std::fprintf(stderr, "[%s] extract: %zu rows x %zu features -> %s\n", kToolName,
                     m.rows.size(), m.catalogue.size(), out.string().c_str());
    });

    // ---- bias ----
    auto* bias = app.add_subcommand("bias", "Rank generator subsets of one size by bias index");
    std::string bias_features, bias_out;
    std::size_t bias_subset_size = 1;
    int bias_threads = 0;
    bias->add_option("--features", bias_features, "Feature matrix CSV")->required();
    bias->add_option("--subset-size", bias_subset_size, "Generators per subset")->required();
    bias->add_option("--out", bias_out, "Output JSON (default bias_report.json next to the CSV)");
    bias->add_option("--threads", bias_threads, "Worker threads (0 = auto)");
    bias->callback([&] {
        const FeatureMatrix m = read_features_csv(bias_features);
        const BiasReport report = rank_generator_subsets(m, bias_subset_size, bias_threads);
        const json echo{{"command", "bias"},
                        {"features", bias_features},
                        {"subset_size", bias_subset_size}};
        const fs::path out =
            bias_out.empty() ? sibling(bias_features, "bias_report.json") : fs::path(bias_out);
        write_json_file(bias_report_json({report}, echo), out);
        std::fprintf(stderr, "[%s] bias: %zu subsets of size %zu -> %s\n", kToolName,
                     report.entries.size(), bias_subset_size, out.string().c_str());
    });

    // ---- rank ----
    auto* rank = app.add_subcommand("rank", "Rank generator subsets of every size by bias index");
    std::string rank_features, rank_out;
    int rank_threads = 0;
    rank->add_option("--features", rank_features, "Feature matrix CSV")->required();
    rank->add_option("--out", rank_out, "Output JSON (default bias_report.json next to the CSV)");
    rank->add_option("--threads", rank_threads, "Worker threads (0 = auto)");
    rank->callback([&] {
        const FeatureMatrix m = read_features_csv(rank_features);
        const Population all = population_all(m);
        if (all.labels.size() < 2)
            throw std::runtime_error("rank: need at least 2 generator labels");
        std::vector<BiasReport> groups;
        for (std::size_t p = 1; p < all.labels.size(); ++p)
            groups.push_back(rank_generator_subsets(m, p, rank_threads));
        const json echo{{"command", "rank"}, {"features", rank_features}};
        const fs::path out =
            rank_out.empty() ? sibling(rank_features, "bias_report.json") : fs::path(rank_out);
        write_json_file(bias_report_json(groups, echo), out);
        std::fprintf(stderr, "[%s] rank: subset sizes 1..%zu -> %s\n", kToolName,
                     all.labels.size() - 1, out.string().c_str());
    });

    // ---- classify ----
    auto* classify = app.add_subcommand("classify",
                                        "k-fold naive-Bayes cross-validation over the generators");
    std::string cls_features, cls_out, cls_kind = "gaussian", cls_pair;
    std::size_t cls_folds = 10;
    std::uint64_t cls_seed = 1;
    int cls_threads = 0;
    classify->add_option("--features", cls_features, "Feature matrix CSV")->required();
    classify->add_option("--kind", cls_kind, "gaussian | bernoulli | multinomial");
    classify->add_option("--folds", cls_folds, "Cross-validation folds");
    classify->add_option("--seed", cls_seed, "Fold shuffle seed");
    classify->add_option("--pair", cls_pair, "Restrict to two classes, e.g. uniform,growth");
    classify->add_option("--out", cls_out,
                         "Output JSON (default classification_report.json next to the CSV)");
    classify->add_option("--threads", cls_threads, "Worker threads (0 = auto)");
    classify->callback([&] {
        const FeatureMatrix m = read_features_csv(cls_features);
        const GroundTruth gt = GroundTruth::from_matrix(m);
        std::optional<std::pair<std::string, std::string>> pair;
        if (!cls_pair.empty()) {
            const std::size_t comma = cls_pair.find(',');
            if (comma == std::string::npos)
                throw std::runtime_error("classify: --pair wants LABEL,LABEL");
            pair = {cls_pair.substr(0, comma), cls_pair.substr(comma + 1)};
        }
        const ClassificationReport report = confusion_and_pairwise(
            gt, cls_folds, nb_kind_from_string(cls_kind), cls_seed, pair, cls_threads);
        json echo{{"command", "classify"}, {"features", cls_features}, {"kind", cls_kind},
                  {"folds", cls_folds},    {"seed", cls_seed}};
        if (pair) echo["pair"] = json::array({pair->first, pair->second});
        const fs::path out = cls_out.empty() ? sibling(cls_features, "classification_report.json")
                                             : fs::path(cls_out);
        write_json_file(classification_report_json({report}, echo), out);
        std::fprintf(stderr, "[%s] classify: %s mean accuracy %.4f -> %s\n", kToolName,
                     cls_kind.c_str(), report.mean_accuracy, out.string().c_str());
    });

    // ---- fss ----
    auto* fss = app.add_subcommand("fss", "Greedy forward feature selection");
    std::string fss_features, fss_out, fss_kind = "gaussian", fss_mode = "cv";
    std::size_t fss_folds = 10, fss_fold = 0, fss_max = 0;
    std::uint64_t fss_seed = 1;
    bool fss_full = false;
    int fss_threads = 0;
    fss->add_option("--features", fss_features, "Feature matrix CSV")->required();
    fss->add_option("--kind", fss_kind, "gaussian | bernoulli | multinomial");
    fss->add_option("--mode", fss_mode, "cv (mean over folds) | fold (score one fold)");
    fss->add_option("--folds", fss_folds, "Cross-validation folds");
    fss->add_option("--seed", fss_seed, "Fold shuffle seed");
    fss->add_option("--fold", fss_fold, "Scored fold in fold mode");
    fss->add_option("--max-features", fss_max, "Selection cap (0 = full catalogue)");
    fss->add_flag("--full-trace", fss_full, "Keep recording steps past the stop point");
    fss->add_option("--out", fss_out, "Output JSON (default fss.json next to the CSV)");
    fss->add_option("--threads", fss_threads, "Worker threads (0 = auto)");
    fss->callback([&] {
        const FeatureMatrix m = read_features_csv(fss_features);
        const GroundTruth gt = GroundTruth::from_matrix(m);
        FssOptions opts;
        if (fss_mode == "cv" || fss_mode == "cross_validated")
            opts.mode = FssMode::cross_validated;
        else if (fss_mode == "fold" || fss_mode == "single_fold")
            opts.mode = FssMode::single_fold;
        else
            throw std::runtime_error("fss: unknown mode '" + fss_mode + "'");
        opts.folds = fss_folds;
        opts.seed = fss_seed;
        opts.fold = fss_fold;
        opts.max_features = fss_max;
        opts.full_trace = fss_full;
        const FssTrace trace =
            forward_sequential_selection(gt, nb_kind_from_string(fss_kind), opts, fss_threads);
        std::vector<std::string> names;
        for (const FeatureDescriptor& d : m.catalogue.slots()) names.push_back(d.name);
        const json echo{{"command", "fss"},     {"features", fss_features},
                        {"kind", fss_kind},     {"mode", fss_mode},
                        {"folds", fss_folds},   {"seed", fss_seed},
                        {"fold", fss_fold},     {"max_features", fss_max},
                        {"full_trace", fss_full}};
        const fs::path out =
            fss_out.empty() ? sibling(fss_features, "fss.json") : fs::path(fss_out);
        write_json_file(fss_report_json(trace, names, echo), out);
        std::fprintf(stderr, "[%s] fss: %zu steps, stop: %s -> %s\n", kToolName,
                     trace.steps.size(), trace.stop_reason.c_str(), out.string().c_str());
    });

    // ---- report ----
    auto* report = app.add_subcommand("report", "Render summary.md from the report JSON files");
    std::string report_dir, report_out;
    report->add_option("--dir", report_dir, "Directory holding the report JSON files")->required();
    report->add_option("--out", report_out, "Output file (default <dir>/summary.md)");
    report->callback([&] {
        RunConfig cfg;
        cfg.out_dir = report_dir;
        stage_report(cfg);
        if (!report_out.empty() && fs::path(report_out) != fs::path(report_dir) / "summary.md")
            fs::copy_file(fs::path(report_dir) / "summary.md", report_out,
                          fs::copy_options::overwrite_existing);
    });

    // ---- pipeline ----
    auto* pipeline = app.add_subcommand("pipeline", "Run gen, extract, bias, classify, fss, report");
    std::string pipe_config, pipe_out;
    int pipe_threads = -1;
    pipeline->add_option("--config", pipe_config, "Run-config JSON")->required();
    pipeline->add_option("--out", pipe_out, "Override the configured output directory");
    pipeline->add_option("--threads", pipe_threads, "Override the configured worker count");
    pipeline->callback([&] {
        RunConfig cfg = load_run_config(pipe_config);
        if (!pipe_out.empty()) cfg.out_dir = pipe_out;
        if (pipe_threads >= 0) cfg.threads = pipe_threads;
        run_pipeline(cfg);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", kToolName, e.what());
        return 1;
    }
    return 0;
}
