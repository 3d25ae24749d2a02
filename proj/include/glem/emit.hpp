#pragma once

#include "glem/phylo.hpp"
#include "glem/stats.hpp"
#include "glem/types.hpp"

#include <string>
#include <vector>

namespace glem {

/// GeoJSON FeatureCollection: one LineString feature per language pair whose
/// distance is at or below the nearest-rank percentile threshold, carrying
/// distance, weight = 1 - d/threshold and a family tag; languages without any
/// edge become labeled Point features. Coordinates are (lon, lat).
void emit_map_edges(const DistanceMatrix& m, const MetaTable& meta,
                    double percentile, const std::string& geojson_path);

/// Heatmap SVG with rows/columns grouped by family, subfamily, then ISO, plus
/// the reordered matrix as CSV.
void emit_heatmap(const DistanceMatrix& m, const MetaTable& meta,
                  const std::string& svg_path, const std::string& csv_path);

/// Scatter of language centroids on the first two projected dimensions,
/// colored by family, labeled by ISO.
void emit_scatter(const std::vector<LanguageEmbedding>& centroids, const MetaTable& meta,
                  const std::string& svg_path);

/// Cumulative-dimension curve as TSV (exact values) and SVG.
void emit_cumulative_curve(const CumulativeCurve& curve, const std::string& tsv_path,
                           const std::string& svg_path);

/// Robustness curve as TSV and SVG. When loess_span > 0 a smoothed column is
/// added to the TSV and drawn in the SVG; smoothing never alters raw values.
void emit_robustness_curve(const RobustnessCurve& curve, const std::string& tsv_path,
                           const std::string& svg_path, double loess_span);

void write_neighbor_profile_tsv(const NeighborProfile& profile, const std::string& path);
void write_pair_table_tsv(const PairTable& table, const std::string& path);
void write_regression(const RegressionFit& fit, const PairTable& table,
                      const std::string& tsv_path, const std::string& json_path);
void write_outliers_tsv(const OutlierReport& report, const std::string& path);
void write_silhouette_tsv(const EmbeddingSet& set, const std::vector<double>& scores,
                          const std::vector<std::uint8_t>& kept, const std::string& path);
void write_centroids_tsv(const std::vector<LanguageEmbedding>& centroids,
                         const std::string& path);
void write_gender_ks_tsv(const std::vector<KsResult>& results, const std::string& path);

} // namespace glem
