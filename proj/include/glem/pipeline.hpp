#pragma once

#include "glem/corpus.hpp"
#include "glem/embedspace.hpp"
#include "glem/phylo.hpp"
#include "glem/refdist.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace glem {

/// End-to-end pipeline configuration, parsed from the sectioned key=value
/// config format. Defaults mirror the study setup; `glem config init` dumps
/// them with comments.
struct PipelineConfig {
    // [inputs]
    std::string embeddings;
    std::string metadata;
    std::string wordlists; // optional

    // [filter]
    std::size_t min_per_language = 20;
    std::size_t max_per_language = 1000;

    // [silhouette]
    bool silhouette_enabled = true;
    double drop_fraction = 0.10;
    SilhouetteMetric silhouette_metric = SilhouetteMetric::Cosine;

    // [lda]
    Eigen::Index lda_components = 0; // 0 = all (K - 1)
    double lda_ridge = -1.0;         // < 0 = default
    int gender_components = 5;       // 0 disables the gender KS report

    // [distances]
    Eigen::Index dims_used = 0; // 0 = all
    bool normalize_before_truncation = false;
    SynonymRule synonym_rule = SynonymRule::Min;
    LexicalVariant lexical_variant = LexicalVariant::Ldnd;

    // [stats]
    bool regression_enabled = true;
    std::size_t outlier_count = 100;
    bool curve_enabled = true;
    int curve_from = 2;
    int curve_to = 100;
    int curve_step = 1;
    std::vector<int> neighbor_ks = {1, 2, 4, 8, 16, 32};

    // [phylo]
    bool tree_enabled = true;
    bool network_enabled = true;
    bool consensus_enabled = false;
    int consensus_samples = 50;
    int consensus_trees = 20;
    bool robustness_enabled = false;
    std::vector<int> robustness_sizes = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    int robustness_replicates = 10;

    // [emit]
    bool heatmap_enabled = true;
    bool map_edges_enabled = true;
    double map_percentile = 0.05;
    bool scatter_enabled = true;
    double loess_span = 0.2;

    // [run]
    std::uint64_t seed = 42;
    int threads = 0; // 0 = hardware
    EmbeddingFormat artifact_format = EmbeddingFormat::Binary;
};

PipelineConfig parse_pipeline_config(const std::string& path);
std::string default_config_text();

struct PipelineOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<EmbeddingFormat> artifact_format;
};

struct PipelineResult {
    std::string out_dir;
    std::vector<std::string> artifacts; // paths written, manifest last
};

/// Runs ingest, filter, silhouette, LDA, centroids, distances, stats and
/// phylo stages per config and writes every artifact plus the run manifest
/// into out_dir.
PipelineResult run_pipeline(const PipelineConfig& config, const std::string& out_dir);

PipelineResult run_pipeline_file(const std::string& config_path,
                                 const PipelineOverrides& overrides);

/// Manifest helper shared by the pipeline and the standalone subcommands:
/// records command, config snapshot, input digests, seed, version, timestamp.
void write_run_manifest(const std::string& path, const std::string& command,
                        const std::map<std::string, std::string>& config_snapshot,
                        const std::vector<std::string>& input_paths,
                        std::uint64_t seed);

const char* tool_version() noexcept;

} // namespace glem
