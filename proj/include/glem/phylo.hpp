#pragma once

#include "glem/embedspace.hpp"
#include "glem/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace glem {

/// One agglomeration step. Node ids follow the usual convention: 0..n-1 are
/// leaves in label order, n + t is the cluster created by merge t.
struct Merge {
    int left = 0;
    int right = 0;
    double height = 0.0; // half the average-linkage distance (cophenetic level / 2)
    int size = 0;        // leaves under the created cluster
};

struct Dendrogram {
    std::vector<std::string> labels;
    std::vector<Merge> merges; // exactly labels.size() - 1 entries

    std::size_t leaf_count() const { return labels.size(); }

    /// Leaf index sets for every internal node, in merge order.
    std::vector<std::vector<int>> internal_clusters() const;

    void validate() const; // merge count, height monotonicity
};

/// UPGMA: repeatedly merges the pair of clusters with the smallest
/// average-linkage distance; ties go to the smallest label-sorted pair.
Dendrogram upgma(const DistanceMatrix& m);

/// Tree-induced distances: entry(a, b) = 2 x height of the lowest merge
/// containing both.
DistanceMatrix cophenetic(const Dendrogram& d);

/// A split is stored as the taxon side not containing taxa[circular_order[0]],
/// as sorted taxon indices; it is contiguous in the circular order.
struct Split {
    std::vector<int> side;
    double weight = 0.0;
};

struct SplitSystem {
    std::vector<std::string> taxa;
    std::vector<int> circular_order; // permutation of 0..n-1
    std::vector<Split> splits;
    bool nnls_converged = true;
    double fit_residual2 = 0.0; // squared distance-fit residual of the weights

    /// Distance matrix induced by the weighted splits (same label order as taxa).
    DistanceMatrix induced_metric() const;

    void validate() const;
};

struct NeighborNetOptions {
    double min_weight = 1e-9;     // splits below this weight are dropped
    int max_iterations = 4000;    // NNLS outer iteration cap
    double kkt_tolerance = 1e-10; // relative gradient tolerance
    bool allow_stalled = false;   // return best-so-far instead of throwing
};

/// NeighborNet: agglomerative circular ordering (net-divergence-adjusted
/// selection with 3-way reductions), then non-negative least squares over all
/// splits compatible with the order. Throws NnlsStalled when the weight fit
/// hits the iteration cap, unless allow_stalled is set, in which case the
/// best-so-far system is returned with nnls_converged = false.
SplitSystem neighbor_net(const DistanceMatrix& m, const NeighborNetOptions& options = {});

struct ConsensusTree {
    Dendrogram reference;
    std::vector<double> support; // per merge, percentage in (0, 100]
};

/// Support of each reference merge = percentage of input trees containing a
/// cluster with the identical leaf set. All trees must share the leaf set.
ConsensusTree consensus(const std::vector<Dendrogram>& trees, const Dendrogram& reference);

struct RobustnessCurve {
    std::vector<std::string> isos;
    std::vector<int> sizes;
    MatrixD per_language;           // isos.size() x sizes.size(), mean replicate correlation
    std::vector<double> mean;       // per size, across languages
    std::vector<double> stddev;     // per size, across languages
    std::vector<std::string> excluded; // languages lacking sizes.max * replicates samples
};

struct SubsampleExperimentOptions {
    LdaOptions lda;
    int threads = 1;
};

/// Stability of embedding distances vs sample size: for each size n the
/// languages' samples are partitioned into `replicates` disjoint seeded sets,
/// an LDA pipeline is refit per replicate, and each language's distance
/// vectors are correlated across replicate pairs.
RobustnessCurve robustness_experiment(const EmbeddingSet& set, const std::vector<int>& sizes,
                                      int replicates, std::uint64_t seed,
                                      const SubsampleExperimentOptions& options = {});

struct ConsensusExperimentResult {
    ConsensusTree tree;
    std::vector<std::string> excluded;
};

/// Builds n_trees UPGMA trees from disjoint seeded subsamples (full pipeline
/// refit per subsample) and scores them against the full-data UPGMA tree.
ConsensusExperimentResult consensus_experiment(const EmbeddingSet& set, int n_per_language,
                                               int n_trees, std::uint64_t seed,
                                               const SubsampleExperimentOptions& options = {});

} // namespace glem
