#include "glem/phylo.hpp"

#include "glem/error.hpp"
#include "glem/parallel.hpp"
#include "glem/rng.hpp"
#include "detail/hash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace glem {

std::vector<std::vector<int>> Dendrogram::internal_clusters() const {
    const int n = static_cast<int>(labels.size());
    std::vector<std::vector<int>> clusters(merges.size());
    for (std::size_t t = 0; t < merges.size(); ++t) {
        auto collect = [&](int node) {
            if (node < n)
                clusters[t].push_back(node);
            else {
                const auto& sub = clusters[static_cast<std::size_t>(node - n)];
                clusters[t].insert(clusters[t].end(), sub.begin(), sub.end());
            }
        };
        collect(merges[t].left);
        collect(merges[t].right);
        std::sort(clusters[t].begin(), clusters[t].end());
    }
    return clusters;
}

void Dendrogram::validate() const {
    require(labels.size() >= 2, Status::InsufficientData, "dendrogram needs at least 2 leaves");
    require(merges.size() == labels.size() - 1, Status::NumericFailure,
            "dendrogram must have exactly n - 1 merges");
    const int n = static_cast<int>(labels.size());
    std::vector<double> height(static_cast<std::size_t>(2 * n - 1), 0.0);
    for (std::size_t t = 0; t < merges.size(); ++t) {
        const Merge& m = merges[t];
        const int id = n + static_cast<int>(t);
        require(m.left >= 0 && m.left < id && m.right >= 0 && m.right < id,
                Status::NumericFailure, "merge references an invalid node");
        require(m.height + 1e-12 >= height[static_cast<std::size_t>(m.left)] &&
                    m.height + 1e-12 >= height[static_cast<std::size_t>(m.right)],
                Status::NumericFailure, "merge heights decrease toward the root");
        height[static_cast<std::size_t>(id)] = m.height;
    }
}

Dendrogram upgma(const DistanceMatrix& input) {
    const std::size_t n = input.size();
    require(n >= 2, Status::InsufficientData, "UPGMA needs at least 2 leaves");
    input.validate();

    Dendrogram tree;
    tree.labels = input.labels;

    struct Cluster {
        int node;     // dendrogram node id
        int size;     // leaf count
        int min_leaf; // smallest leaf index, for deterministic tie-breaking
        bool active;
    };
    std::vector<Cluster> clusters;
    clusters.reserve(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i)
        clusters.push_back({static_cast<int>(i), 1, static_cast<int>(i), true});

    // Working distances between cluster slots; average linkage is maintained
    // incrementally via the size-weighted update.
    std::vector<std::vector<double>> dist(2 * n - 1, std::vector<double>(2 * n - 1, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = input.at(i, j);

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i)
        active.push_back(i);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        std::pair<int, int> best_key{0, 0};
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                const std::size_t i = active[a];
                const std::size_t j = active[b];
                const double d = dist[i][j];
                std::pair<int, int> key{std::min(clusters[i].min_leaf, clusters[j].min_leaf),
                                        std::max(clusters[i].min_leaf, clusters[j].min_leaf)};
                if (d < best || (d == best && key < best_key)) {
                    best = d;
                    bi = i;
                    bj = j;
                    best_key = key;
                }
            }

        // Child order: smaller min leaf on the left.
        std::size_t left = bi, right = bj;
        if (clusters[right].min_leaf < clusters[left].min_leaf)
            std::swap(left, right);

        Merge merge;
        merge.left = clusters[left].node;
        merge.right = clusters[right].node;
        merge.height = best / 2.0;
        merge.size = clusters[left].size + clusters[right].size;
        tree.merges.push_back(merge);

        const std::size_t slot = clusters.size();
        clusters.push_back({static_cast<int>(n + step), merge.size,
                            std::min(clusters[left].min_leaf, clusters[right].min_leaf), true});
        const double wl = static_cast<double>(clusters[left].size);
        const double wr = static_cast<double>(clusters[right].size);
        for (std::size_t other : active) {
            if (other == bi || other == bj)
                continue;
            const double d = (wl * dist[left][other] + wr * dist[right][other]) / (wl + wr);
            dist[slot][other] = dist[other][slot] = d;
        }
        clusters[bi].active = clusters[bj].active = false;
        active.erase(std::remove(active.begin(), active.end(), bi), active.end());
        active.erase(std::remove(active.begin(), active.end(), bj), active.end());
        active.push_back(slot);
    }
    return tree;
}

DistanceMatrix cophenetic(const Dendrogram& d) {
    d.validate();
    const int n = static_cast<int>(d.labels.size());
    DistanceMatrix m(d.labels, DistanceKind::Embedding);

    std::vector<std::vector<int>> members(static_cast<std::size_t>(2 * n - 1));
    for (int i = 0; i < n; ++i)
        members[static_cast<std::size_t>(i)] = {i};
    for (std::size_t t = 0; t < d.merges.size(); ++t) {
        const Merge& merge = d.merges[t];
        const auto& left = members[static_cast<std::size_t>(merge.left)];
        const auto& right = members[static_cast<std::size_t>(merge.right)];
        for (int a : left)
            for (int b : right)
                m.set(static_cast<std::size_t>(a), static_cast<std::size_t>(b), 2.0 * merge.height);
        auto& joined = members[static_cast<std::size_t>(n + static_cast<int>(t))];
        joined = left;
        joined.insert(joined.end(), right.begin(), right.end());
    }
    return m;
}

ConsensusTree consensus(const std::vector<Dendrogram>& trees, const Dendrogram& reference) {
    require(!trees.empty(), Status::InsufficientData, "no trees to summarize");
    const std::set<std::string> ref_leaves(reference.labels.begin(), reference.labels.end());
    for (const Dendrogram& t : trees) {
        const std::set<std::string> leaves(t.labels.begin(), t.labels.end());
        require(leaves == ref_leaves, Status::LabelMismatch,
                "consensus trees must share the reference leaf set");
    }

    auto label_clusters = [](const Dendrogram& t) {
        std::set<std::vector<std::string>> out;
        for (const auto& cluster : t.internal_clusters()) {
            std::vector<std::string> names;
            names.reserve(cluster.size());
            for (int leaf : cluster)
                names.push_back(t.labels[static_cast<std::size_t>(leaf)]);
            std::sort(names.begin(), names.end());
            out.insert(std::move(names));
        }
        return out;
    };

    std::vector<std::set<std::vector<std::string>>> tree_clusters;
    tree_clusters.reserve(trees.size());
    for (const Dendrogram& t : trees)
        tree_clusters.push_back(label_clusters(t));

    ConsensusTree result;
    result.reference = reference;
    for (const auto& cluster : reference.internal_clusters()) {
        std::vector<std::string> names;
        names.reserve(cluster.size());
        for (int leaf : cluster)
            names.push_back(reference.labels[static_cast<std::size_t>(leaf)]);
        std::sort(names.begin(), names.end());
        std::size_t count = 0;
        for (const auto& clusters : tree_clusters)
            if (clusters.count(names))
                ++count;
        result.support.push_back(100.0 * static_cast<double>(count) /
                                 static_cast<double>(trees.size()));
    }
    return result;
}

namespace {

/// Full embedding pipeline over a subsample: LDA refit, centroids, cosine
/// distances on every available dimension.
DistanceMatrix subsample_distances(const EmbeddingSet& subset, const LdaOptions& lda) {
    const Projection proj = fit_lda(subset, lda);
    const EmbeddingSet projected = project(subset, proj);
    return cosine_distance_matrix(language_centroids(projected));
}

EmbeddingSet take_rows(const EmbeddingSet& set, const std::vector<Eigen::Index>& rows) {
    EmbeddingSet out;
    out.matrix.resize(static_cast<Eigen::Index>(rows.size()), set.dim());
    out.records.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.matrix.row(static_cast<Eigen::Index>(i)) = set.matrix.row(rows[i]);
        out.records.push_back(set.records[static_cast<std::size_t>(rows[i])]);
    }
    return out;
}

/// Disjoint per-language blocks of `block` rows each, drawn with a seeded
/// per-language stream so partitions do not depend on the other languages.
std::vector<std::vector<Eigen::Index>> partition_language(const std::vector<Eigen::Index>& rows,
                                                          int blocks, int block,
                                                          std::uint64_t seed,
                                                          std::string_view stream_tag) {
    std::vector<Eigen::Index> pool = rows;
    CounterRng rng(seed, detail::fnv1a64(stream_tag));
    rng.shuffle(pool);
    std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(blocks));
    for (int b = 0; b < blocks; ++b) {
        auto& dst = out[static_cast<std::size_t>(b)];
        dst.assign(pool.begin() + static_cast<std::ptrdiff_t>(b) * block,
                   pool.begin() + static_cast<std::ptrdiff_t>(b + 1) * block);
        std::sort(dst.begin(), dst.end()); // keep within-language row order
    }
    return out;
}

} // namespace

RobustnessCurve robustness_experiment(const EmbeddingSet& set, const std::vector<int>& sizes,
                                      int replicates, std::uint64_t seed,
                                      const SubsampleExperimentOptions& options) {
    require(!sizes.empty(), Status::BadArgument, "no sample sizes requested");
    require(replicates >= 2, Status::BadArgument, "robustness needs at least 2 replicates");
    int max_size = 0;
    for (int s : sizes) {
        require(s >= 2, Status::BadArgument, "sample sizes must be >= 2");
        max_size = std::max(max_size, s);
    }

    const auto by_lang = set.rows_by_language();
    RobustnessCurve curve;
    std::map<std::string, std::vector<Eigen::Index>> included;
    const std::size_t need = static_cast<std::size_t>(max_size) *
                             static_cast<std::size_t>(replicates);
    for (const auto& [iso, rows] : by_lang) {
        if (rows.size() >= need)
            included.emplace(iso, rows);
        else
            curve.excluded.push_back(iso);
    }
    require(included.size() >= 2, Status::InsufficientData,
            "fewer than 2 languages have enough samples");

    for (const auto& [iso, rows] : included) {
        (void)rows;
        curve.isos.push_back(iso);
    }
    curve.sizes = sizes;
    const std::size_t n_lang = curve.isos.size();
    const std::size_t n_sizes = sizes.size();

    // One independent task per (size, replicate); each fills only its own slot.
    std::vector<DistanceMatrix> matrices(n_sizes * static_cast<std::size_t>(replicates));
    std::vector<std::vector<std::vector<Eigen::Index>>> blocks_per_size(n_sizes);
    for (std::size_t si = 0; si < n_sizes; ++si) {
        blocks_per_size[si].resize(n_lang);
        for (std::size_t li = 0; li < n_lang; ++li) {
            const std::string tag = "robustness|" + curve.isos[li] + "|" +
                                    std::to_string(sizes[si]);
            const auto parts = partition_language(included.at(curve.isos[li]), replicates,
                                                  sizes[si], seed, tag);
            blocks_per_size[si][li].reserve(static_cast<std::size_t>(replicates) *
                                            static_cast<std::size_t>(sizes[si]));
            for (const auto& part : parts)
                blocks_per_size[si][li].insert(blocks_per_size[si][li].end(), part.begin(),
                                               part.end());
        }
    }

    parallel_for(matrices.size(), options.threads, [&](std::size_t task) {
        const std::size_t si = task / static_cast<std::size_t>(replicates);
        const int rep = static_cast<int>(task % static_cast<std::size_t>(replicates));
        const int size = sizes[si];
        std::vector<Eigen::Index> rows;
        for (std::size_t li = 0; li < n_lang; ++li) {
            const auto& flat = blocks_per_size[si][li];
            const std::size_t begin = static_cast<std::size_t>(rep) *
                                      static_cast<std::size_t>(size);
            std::vector<Eigen::Index> chunk(flat.begin() + static_cast<std::ptrdiff_t>(begin),
                                            flat.begin() +
                                                static_cast<std::ptrdiff_t>(begin + size));
            std::sort(chunk.begin(), chunk.end());
            rows.insert(rows.end(), chunk.begin(), chunk.end());
        }
        matrices[task] = subsample_distances(take_rows(set, rows), options.lda);
    });

    curve.per_language.resize(static_cast<Eigen::Index>(n_lang),
                              static_cast<Eigen::Index>(n_sizes));
    curve.mean.assign(n_sizes, 0.0);
    curve.stddev.assign(n_sizes, 0.0);
    for (std::size_t si = 0; si < n_sizes; ++si) {
        for (std::size_t li = 0; li < n_lang; ++li) {
            // Distance vector of this language to every other, per replicate.
            std::vector<std::vector<double>> vectors(static_cast<std::size_t>(replicates));
            for (int rep = 0; rep < replicates; ++rep) {
                const DistanceMatrix& m = matrices[si * static_cast<std::size_t>(replicates) +
                                                   static_cast<std::size_t>(rep)];
                auto& v = vectors[static_cast<std::size_t>(rep)];
                v.reserve(n_lang - 1);
                for (std::size_t lj = 0; lj < n_lang; ++lj)
                    if (lj != li)
                        v.push_back(m.at(li, lj));
            }
            double sum = 0.0;
            std::size_t pairs = 0;
            for (int r1 = 0; r1 < replicates; ++r1)
                for (int r2 = r1 + 1; r2 < replicates; ++r2) {
                    sum += pearson(vectors[static_cast<std::size_t>(r1)],
                                   vectors[static_cast<std::size_t>(r2)]);
                    ++pairs;
                }
            curve.per_language(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(si)) =
                sum / static_cast<double>(pairs);
        }
        double mean = 0.0;
        for (std::size_t li = 0; li < n_lang; ++li)
            mean += curve.per_language(static_cast<Eigen::Index>(li),
                                       static_cast<Eigen::Index>(si));
        mean /= static_cast<double>(n_lang);
        double var = 0.0;
        for (std::size_t li = 0; li < n_lang; ++li) {
            const double d = curve.per_language(static_cast<Eigen::Index>(li),
                                                static_cast<Eigen::Index>(si)) -
                             mean;
            var += d * d;
        }
        curve.mean[si] = mean;
        curve.stddev[si] = n_lang > 1 ? std::sqrt(var / static_cast<double>(n_lang - 1)) : 0.0;
    }
    return curve;
}

ConsensusExperimentResult consensus_experiment(const EmbeddingSet& set, int n_per_language,
                                               int n_trees, std::uint64_t seed,
                                               const SubsampleExperimentOptions& options) {
    require(n_per_language >= 2, Status::BadArgument, "n_per_language must be >= 2");
    require(n_trees >= 1, Status::BadArgument, "n_trees must be >= 1");

    const auto by_lang = set.rows_by_language();
    ConsensusExperimentResult result;
    std::map<std::string, std::vector<Eigen::Index>> included;
    const std::size_t need = static_cast<std::size_t>(n_per_language) *
                             static_cast<std::size_t>(n_trees);
    for (const auto& [iso, rows] : by_lang) {
        if (rows.size() >= need)
            included.emplace(iso, rows);
        else
            result.excluded.push_back(iso);
    }
    require(included.size() >= 2, Status::InsufficientData,
            "fewer than 2 languages have enough samples");

    std::vector<std::string> isos;
    std::vector<Eigen::Index> all_rows;
    for (const auto& [iso, rows] : included) {
        isos.push_back(iso);
        all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    }
    std::sort(all_rows.begin(), all_rows.end());

    std::vector<std::vector<std::vector<Eigen::Index>>> blocks(isos.size());
    for (std::size_t li = 0; li < isos.size(); ++li)
        blocks[li] = partition_language(included.at(isos[li]), n_trees, n_per_language, seed,
                                        "consensus|" + isos[li]);

    std::vector<Dendrogram> trees(static_cast<std::size_t>(n_trees));
    parallel_for(trees.size(), options.threads, [&](std::size_t t) {
        std::vector<Eigen::Index> rows;
        for (std::size_t li = 0; li < isos.size(); ++li)
            rows.insert(rows.end(), blocks[li][t].begin(), blocks[li][t].end());
        std::sort(rows.begin(), rows.end());
        trees[t] = upgma(subsample_distances(take_rows(set, rows), options.lda));
    });

    const Dendrogram reference = upgma(subsample_distances(take_rows(set, all_rows), options.lda));
    result.tree = consensus(trees, reference);
    return result;
}

} // namespace glem
