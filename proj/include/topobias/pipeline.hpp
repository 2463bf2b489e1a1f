#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "topobias/bias.hpp"
#include "topobias/classify.hpp"
#include "topobias/generators.hpp"

namespace topobias {

inline constexpr const char* kToolName = "topobias";
inline constexpr const char* kToolVersion = "0.1.0";

struct ClassifyConfig {
    std::vector<NbKind> kinds = {NbKind::gaussian, NbKind::bernoulli, NbKind::multinomial};
    std::uint64_t seed = 1;
};

struct FssConfig {
    NbKind kind = NbKind::gaussian;
    FssMode mode = FssMode::cross_validated;
    std::size_t fold = 0;
    std::size_t max_features = 0;  // 0 = full catalogue
    bool full_trace = false;
    std::uint64_t seed = 1;
};

// Everything a full run needs; serialises losslessly to and from JSON.
// Unknown or ill-typed keys are rejected.
struct RunConfig {
    ExperimentConfig experiment;
    std::vector<GeneratorSpec> generators;
    std::string out_dir = "out";
    int threads = 0;  // 0 = TOPOBIAS_THREADS or the OpenMP default
    ClassifyConfig classify;
    FssConfig fss;
};

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

nlohmann::json manifest_to_json(const CorpusManifest& manifest);
CorpusManifest manifest_from_json(const nlohmann::json& j);

// Reads every topology listed in dir/manifest.json (paths relative to dir)
// and extracts the feature matrix under the given experiment parameters.
FeatureMatrix extract_from_manifest(const std::filesystem::path& dir,
                                    const ExperimentConfig& experiment, int threads);

// Report payloads. Every report carries a "meta" object with the tool
// version, the catalogue version and a verbatim echo of the configuration
// (or CLI parameters) that produced it. Reports carry no timestamps, so a
// rerun of the same inputs is byte-identical.
nlohmann::json bias_report_json(const std::vector<BiasReport>& groups,
                                const nlohmann::json& config_echo);
nlohmann::json classification_report_json(const std::vector<ClassificationReport>& reports,
                                          const nlohmann::json& config_echo);
nlohmann::json fss_report_json(const FssTrace& trace, const std::vector<std::string>& feature_names,
                               const nlohmann::json& config_echo);

// Markdown digest of the three reports: generator ranking, accuracy per
// model, the selection trace and the confusion matrix of the first
// classification report, numbers with three decimals. A missing report
// renders as "Not run." in its section.
std::string emit_summary(const std::optional<nlohmann::json>& bias,
                         const std::optional<nlohmann::json>& classification,
                         const std::optional<nlohmann::json>& fss);

// Stages write into cfg.out_dir: gen -> manifest.json + topologies/*.csv,
// extract -> features.csv, bias -> bias_report.json, classify ->
// classification_report.json, fss -> fss.json, report -> summary.md. Each
// stage reads its inputs back from the directory, so a pipeline run equals
// running the stages one by one. Failures rethrow as std::runtime_error
// prefixed with the stage name.
void stage_gen(const RunConfig& cfg);
void stage_extract(const RunConfig& cfg);
void stage_bias(const RunConfig& cfg);
void stage_classify(const RunConfig& cfg);
void stage_fss(const RunConfig& cfg);
void stage_report(const RunConfig& cfg);

void run_pipeline(const RunConfig& cfg);

}  // namespace topobias
