#pragma once

#include "glem/stats.hpp"
#include "glem/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace glem {

/// Principal components of the sample covariance, strongest first.
/// Throws InsufficientRank when n_components exceeds the covariance rank.
Projection fit_pca(const EmbeddingSet& set, Eigen::Index n_components);

struct LdaOptions {
    /// 0 keeps every available discriminant (K - 1 for K languages).
    Eigen::Index n_components = 0;
    /// Ridge added to the within-class scatter. Negative selects the default
    /// 1e-6 * trace(Sw) / dim; exactly 0 requests no regularization and fails
    /// with SingularScatter when Sw is not positive definite.
    double ridge = -1.0;
};

/// Linear discriminant analysis with language labels as classes: solves the
/// generalized symmetric eigenproblem Sb v = lambda (Sw + ridge I) v.
/// Eigenvalues are the Fisher criterion values, non-increasing; basis columns
/// are renormalized to unit Euclidean norm.
Projection fit_lda(const EmbeddingSet& set, const LdaOptions& options = {});

/// Applies (x - mean) * basis to every row; records are carried unchanged.
EmbeddingSet project(const EmbeddingSet& set, const Projection& proj);

enum class SilhouetteMetric : std::uint8_t { Cosine, Euclidean };

struct SilhouetteResult {
    EmbeddingSet filtered;
    std::vector<double> scores; // per input row
    std::vector<std::uint8_t> kept; // per input row
};

/// Per-utterance silhouette s = (b - a) / max(a, b) against language clusters,
/// then removal of floor(drop_fraction * count) lowest-scoring utterances per
/// language, ties broken by utterance id.
SilhouetteResult silhouette_filter(const EmbeddingSet& set, double drop_fraction,
                                   SilhouetteMetric metric = SilhouetteMetric::Cosine,
                                   int threads = 1);

/// Arithmetic mean embedding per language, one entry per language, sorted by ISO.
std::vector<LanguageEmbedding> language_centroids(const EmbeddingSet& set);

/// Cosine distances 1 - dot(u, v) between L2-normalized language embeddings
/// truncated to their first dims_used coordinates (0 = all). Normalization
/// happens after truncation unless normalize_before_truncation is set.
DistanceMatrix cosine_distance_matrix(const std::vector<LanguageEmbedding>& embeddings,
                                      Eigen::Index dims_used = 0,
                                      bool normalize_before_truncation = false);

struct NeighborProfile {
    std::vector<std::string> isos; // ordered by mean distance at k = 1, ascending
    std::vector<int> ks;
    MatrixD means; // isos.size() x ks.size()
};

/// Mean distance to the k nearest other languages, for each requested k.
NeighborProfile neighbor_profile(const DistanceMatrix& m, const std::vector<int>& ks);

/// Two-sample KS statistics of male vs female values for each of the first
/// n_components projected coordinates.
std::vector<KsResult> gender_component_test(const EmbeddingSet& set,
                                            const Projection& proj,
                                            Eigen::Index n_components);

} // namespace glem
