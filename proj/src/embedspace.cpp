#include "glem/embedspace.hpp"

#include "glem/error.hpp"
#include "glem/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace glem {

namespace {

constexpr Eigen::Index kRowBlock = 4096;

VectorD column_mean(const EmbeddingSet& set) {
    VectorD mean = VectorD::Zero(set.dim());
    for (Eigen::Index start = 0; start < set.rows(); start += kRowBlock) {
        const Eigen::Index len = std::min(kRowBlock, set.rows() - start);
        mean += set.matrix.middleRows(start, len).cast<double>().colwise().sum();
    }
    return mean / static_cast<double>(set.rows());
}

/// Fixes the sign of every basis column so its largest-magnitude coordinate
/// (lowest index on ties) is positive, making output reproducible everywhere.
void fix_column_signs(MatrixD& basis) {
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < basis.rows(); ++r) {
            const double mag = std::abs(basis(r, c));
            if (mag > best) {
                best = mag;
                arg = r;
            }
        }
        if (basis(arg, c) < 0.0)
            basis.col(c) = -basis.col(c);
    }
}

} // namespace

Projection fit_pca(const EmbeddingSet& set, Eigen::Index n_components) {
    const Eigen::Index n = set.rows();
    const Eigen::Index d = set.dim();
    require(n >= 2, Status::InsufficientData, "PCA needs at least 2 rows");
    require(n_components >= 1 && n_components <= std::min(n - 1, d), Status::BadArgument,
            "n_components must be in [1, min(rows - 1, dim)]");

    const VectorD mean = column_mean(set);
    MatrixD cov = MatrixD::Zero(d, d);
    for (Eigen::Index start = 0; start < n; start += kRowBlock) {
        const Eigen::Index len = std::min(kRowBlock, n - start);
        MatrixD centered = set.matrix.middleRows(start, len).cast<double>();
        centered.rowwise() -= mean.transpose();
        cov.noalias() += centered.transpose() * centered;
    }
    cov /= static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<MatrixD> solver(cov);
    require(solver.info() == Eigen::Success, Status::NumericFailure,
            "covariance eigendecomposition failed");
    const VectorD evals = solver.eigenvalues(); // ascending
    const double lmax = std::max(0.0, evals(d - 1));
    const double rank_tol = lmax * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        if (evals(i) > rank_tol)
            ++rank;
    require(n_components <= rank, Status::InsufficientRank,
            "requested " + std::to_string(n_components) + " components but covariance rank is " +
                std::to_string(rank));

    Projection proj;
    proj.kind = ProjectionKind::Pca;
    proj.input_dim = d;
    proj.output_dim = n_components;
    proj.mean = mean;
    proj.basis.resize(d, n_components);
    proj.eigenvalues.resize(n_components);
    for (Eigen::Index c = 0; c < n_components; ++c) {
        proj.basis.col(c) = solver.eigenvectors().col(d - 1 - c);
        proj.eigenvalues(c) = evals(d - 1 - c);
    }
    fix_column_signs(proj.basis);
    proj.eigenvalue_trace = evals.sum();
    return proj;
}

Projection fit_lda(const EmbeddingSet& set, const LdaOptions& options) {
    const Eigen::Index d = set.dim();
    const auto by_lang = set.rows_by_language();
    const Eigen::Index k = static_cast<Eigen::Index>(by_lang.size());
    require(k >= 2, Status::InsufficientData, "LDA needs at least 2 languages");
    for (const auto& [lang, rows] : by_lang)
        require(rows.size() >= 2, Status::InsufficientData,
                "language '" + lang + "' has fewer than 2 samples");

    const VectorD mean = column_mean(set);
    MatrixD sw = MatrixD::Zero(d, d);
    MatrixD sb = MatrixD::Zero(d, d);
    for (const auto& [lang, rows] : by_lang) {
        (void)lang;
        MatrixD block(static_cast<Eigen::Index>(rows.size()), d);
        for (std::size_t r = 0; r < rows.size(); ++r)
            block.row(static_cast<Eigen::Index>(r)) = set.matrix.row(rows[r]).cast<double>();
        const VectorD class_mean = block.colwise().mean();
        block.rowwise() -= class_mean.transpose();
        sw.noalias() += block.transpose() * block;
        const VectorD diff = class_mean - mean;
        sb.noalias() += static_cast<double>(rows.size()) * diff * diff.transpose();
    }

    double ridge = options.ridge;
    if (ridge < 0.0)
        ridge = 1e-6 * sw.trace() / static_cast<double>(d);
    MatrixD sw_reg = sw;
    sw_reg.diagonal().array() += ridge;

    Eigen::LLT<MatrixD> llt(sw_reg);
    require(llt.info() == Eigen::Success, Status::SingularScatter,
            "within-class scatter is singular; supply a positive ridge");

    // Transform to a standard symmetric problem: M = L^-1 Sb L^-T.
    MatrixD m = llt.matrixL().solve(sb);
    m = llt.matrixL().solve(m.transpose()).eval();
    m = 0.5 * (m + m.transpose()).eval(); // re-symmetrize roundoff

    Eigen::SelfAdjointEigenSolver<MatrixD> solver(m);
    require(solver.info() == Eigen::Success, Status::NumericFailure,
            "generalized eigendecomposition failed");

    Eigen::Index out = k - 1;
    if (options.n_components > 0)
        out = std::min(out, options.n_components);
    out = std::min(out, d);

    Projection proj;
    proj.kind = ProjectionKind::Lda;
    proj.input_dim = d;
    proj.output_dim = out;
    proj.mean = mean;
    proj.basis.resize(d, out);
    proj.eigenvalues.resize(out);
    for (Eigen::Index c = 0; c < out; ++c) {
        // Back-transform the eigenvector and normalize to unit length.
        VectorD v = llt.matrixL().transpose().solve(solver.eigenvectors().col(d - 1 - c));
        const double norm = v.norm();
        require(norm > 0.0, Status::NumericFailure, "zero-norm discriminant");
        proj.basis.col(c) = v / norm;
        proj.eigenvalues(c) = solver.eigenvalues()(d - 1 - c);
    }
    fix_column_signs(proj.basis);
    proj.eigenvalue_trace = solver.eigenvalues().sum();
    return proj;
}

EmbeddingSet project(const EmbeddingSet& set, const Projection& proj) {
    require(set.dim() == proj.input_dim, Status::DimensionMismatch,
            "set dimension " + std::to_string(set.dim()) + " does not match projection input " +
                std::to_string(proj.input_dim));
    EmbeddingSet out;
    out.records = set.records;
    out.matrix.resize(set.rows(), proj.output_dim);
    for (Eigen::Index start = 0; start < set.rows(); start += kRowBlock) {
        const Eigen::Index len = std::min(kRowBlock, set.rows() - start);
        MatrixD centered = set.matrix.middleRows(start, len).cast<double>();
        centered.rowwise() -= proj.mean.transpose();
        out.matrix.middleRows(start, len) = (centered * proj.basis).cast<float>();
    }
    return out;
}

namespace {

struct LanguageIndex {
    std::vector<std::string> isos;               // sorted
    std::vector<std::vector<Eigen::Index>> rows; // aligned to isos
    std::vector<int> row_language;               // per utterance row
};

LanguageIndex index_languages(const EmbeddingSet& set) {
    LanguageIndex idx;
    for (auto& [iso, rows] : set.rows_by_language()) {
        idx.isos.push_back(iso);
        idx.rows.push_back(rows);
    }
    idx.row_language.assign(static_cast<std::size_t>(set.rows()), -1);
    for (std::size_t l = 0; l < idx.rows.size(); ++l)
        for (Eigen::Index r : idx.rows[l])
            idx.row_language[static_cast<std::size_t>(r)] = static_cast<int>(l);
    return idx;
}

} // namespace

SilhouetteResult silhouette_filter(const EmbeddingSet& set, double drop_fraction,
                                   SilhouetteMetric metric, int threads) {
    require(drop_fraction >= 0.0 && drop_fraction < 1.0, Status::BadArgument,
            "drop_fraction must be in [0, 1)");
    const LanguageIndex idx = index_languages(set);
    require(idx.isos.size() >= 2, Status::InsufficientData,
            "silhouette needs at least 2 languages");
    for (std::size_t l = 0; l < idx.rows.size(); ++l)
        require(idx.rows[l].size() >= 2, Status::InsufficientData,
                "language '" + idx.isos[l] + "' has fewer than 2 samples");

    const std::size_t n = static_cast<std::size_t>(set.rows());
    const std::size_t k = idx.isos.size();
    std::vector<double> scores(n, 0.0);

    if (metric == SilhouetteMetric::Cosine) {
        // Mean cosine distance to a cluster is 1 - u_hat . mean(v_hat), so one
        // pass of normalized sums per language replaces pairwise scans.
        MatrixD unit(set.rows(), set.dim());
        for (Eigen::Index i = 0; i < set.rows(); ++i) {
            VectorD row = set.matrix.row(i).cast<double>();
            const double norm = row.norm();
            require(norm > 0.0, Status::ZeroVector,
                    "zero embedding for utterance '" +
                        set.records[static_cast<std::size_t>(i)].utterance_id + "'");
            unit.row(i) = row / norm;
        }
        MatrixD sums = MatrixD::Zero(static_cast<Eigen::Index>(k), set.dim());
        for (std::size_t l = 0; l < k; ++l)
            for (Eigen::Index r : idx.rows[l])
                sums.row(static_cast<Eigen::Index>(l)) += unit.row(r);

        parallel_for(n, threads, [&](std::size_t i) {
            const Eigen::Index row = static_cast<Eigen::Index>(i);
            const int own = idx.row_language[i];
            const VectorD dots = sums * unit.row(row).transpose();
            const double n_own = static_cast<double>(idx.rows[static_cast<std::size_t>(own)].size());
            const double a = 1.0 - (dots(own) - 1.0) / (n_own - 1.0);
            double b = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < k; ++l) {
                if (static_cast<int>(l) == own)
                    continue;
                const double nl = static_cast<double>(idx.rows[l].size());
                b = std::min(b, 1.0 - dots(static_cast<Eigen::Index>(l)) / nl);
            }
            const double denom = std::max(a, b);
            scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
        });
    } else {
        parallel_for(n, threads, [&](std::size_t i) {
            const VectorD x = set.matrix.row(static_cast<Eigen::Index>(i)).cast<double>();
            std::vector<double> mean_dist(k, 0.0);
            for (std::size_t l = 0; l < k; ++l) {
                double sum = 0.0;
                for (Eigen::Index r : idx.rows[l])
                    sum += (set.matrix.row(r).cast<double>() - x.transpose()).norm();
                mean_dist[l] = sum;
            }
            const int own = idx.row_language[i];
            const double n_own = static_cast<double>(idx.rows[static_cast<std::size_t>(own)].size());
            const double a = mean_dist[static_cast<std::size_t>(own)] / (n_own - 1.0);
            double b = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < k; ++l) {
                if (static_cast<int>(l) == own)
                    continue;
                b = std::min(b, mean_dist[l] / static_cast<double>(idx.rows[l].size()));
            }
            const double denom = std::max(a, b);
            scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
        });
    }

    std::vector<std::uint8_t> kept(n, 1);
    for (std::size_t l = 0; l < k; ++l) {
        const auto& rows = idx.rows[l];
        const std::size_t remove =
            static_cast<std::size_t>(std::floor(drop_fraction * static_cast<double>(rows.size())));
        require(rows.size() - remove >= 1, Status::OverFiltered,
                "language '" + idx.isos[l] + "' would lose every sample");
        if (remove == 0)
            continue;
        std::vector<Eigen::Index> order = rows;
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            const double sa = scores[static_cast<std::size_t>(a)];
            const double sb = scores[static_cast<std::size_t>(b)];
            if (sa != sb)
                return sa < sb;
            return set.records[static_cast<std::size_t>(a)].utterance_id <
                   set.records[static_cast<std::size_t>(b)].utterance_id;
        });
        for (std::size_t r = 0; r < remove; ++r)
            kept[static_cast<std::size_t>(order[r])] = 0;
    }

    SilhouetteResult result;
    result.scores = std::move(scores);
    result.kept = kept;
    std::size_t n_kept = 0;
    for (std::uint8_t f : kept)
        n_kept += f;
    result.filtered.matrix.resize(static_cast<Eigen::Index>(n_kept), set.dim());
    result.filtered.records.reserve(n_kept);
    Eigen::Index w = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!kept[i])
            continue;
        result.filtered.matrix.row(w++) = set.matrix.row(static_cast<Eigen::Index>(i));
        result.filtered.records.push_back(set.records[i]);
    }
    return result;
}

std::vector<LanguageEmbedding> language_centroids(const EmbeddingSet& set) {
    require(set.rows() > 0, Status::InsufficientData, "empty embedding set");
    std::vector<LanguageEmbedding> out;
    for (const auto& [iso, rows] : set.rows_by_language()) {
        LanguageEmbedding e;
        e.iso = iso;
        e.sample_count = rows.size();
        VectorD sum = VectorD::Zero(set.dim());
        for (Eigen::Index r : rows)
            sum += set.matrix.row(r).cast<double>();
        e.vector = sum / static_cast<double>(rows.size());
        out.push_back(std::move(e));
    }
    return out; // map iteration: sorted by ISO
}

DistanceMatrix cosine_distance_matrix(const std::vector<LanguageEmbedding>& embeddings,
                                      Eigen::Index dims_used, bool normalize_before_truncation) {
    require(embeddings.size() >= 2, Status::InsufficientData,
            "cosine distances need at least 2 languages");
    const Eigen::Index full = embeddings.front().vector.size();
    for (const auto& e : embeddings)
        require(e.vector.size() == full, Status::DimensionMismatch,
                "inconsistent embedding dimensions");
    if (dims_used == 0)
        dims_used = full;
    require(dims_used >= 2 && dims_used <= full, Status::BadArgument,
            "dims_used must be in [2, vector length]");

    std::vector<const LanguageEmbedding*> sorted;
    sorted.reserve(embeddings.size());
    for (const auto& e : embeddings)
        sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(),
              [](const LanguageEmbedding* a, const LanguageEmbedding* b) { return a->iso < b->iso; });

    std::vector<std::string> labels;
    labels.reserve(sorted.size());
    MatrixD vectors(static_cast<Eigen::Index>(sorted.size()), dims_used);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        labels.push_back(sorted[i]->iso);
        if (normalize_before_truncation) {
            const double norm = sorted[i]->vector.norm();
            require(norm > 0.0, Status::ZeroVector, "zero vector for '" + sorted[i]->iso + "'");
            vectors.row(static_cast<Eigen::Index>(i)) =
                (sorted[i]->vector / norm).head(dims_used).transpose();
        } else {
            const VectorD head = sorted[i]->vector.head(dims_used);
            const double norm = head.norm();
            require(norm > 0.0, Status::ZeroVector,
                    "zero truncated vector for '" + sorted[i]->iso + "'");
            vectors.row(static_cast<Eigen::Index>(i)) = (head / norm).transpose();
        }
    }

    DistanceMatrix m(labels, DistanceKind::Embedding);
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            const double dot = vectors.row(static_cast<Eigen::Index>(i))
                                   .dot(vectors.row(static_cast<Eigen::Index>(j)));
            m.set(i, j, std::clamp(1.0 - dot, 0.0, 2.0));
        }
    return m;
}

NeighborProfile neighbor_profile(const DistanceMatrix& m, const std::vector<int>& ks) {
    const std::size_t n = m.size();
    require(!ks.empty(), Status::BadArgument, "no neighbor counts requested");
    int k_max = 0;
    for (int k : ks) {
        require(k >= 1, Status::BadArgument, "neighbor counts must be >= 1");
        k_max = std::max(k_max, k);
    }
    require(static_cast<std::size_t>(k_max) <= n - 1, Status::BadArgument,
            "largest neighbor count exceeds n - 1");

    NeighborProfile profile;
    profile.ks = ks;
    MatrixD means(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ks.size()));
    std::vector<double> nearest(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> order;
        order.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                order.push_back(j);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double da = m.at(i, a);
            const double db = m.at(i, b);
            if (da != db)
                return da < db;
            return m.labels[a] < m.labels[b];
        });
        std::vector<double> prefix(order.size() + 1, 0.0);
        for (std::size_t r = 0; r < order.size(); ++r)
            prefix[r + 1] = prefix[r] + m.at(i, order[r]);
        for (std::size_t c = 0; c < ks.size(); ++c)
            means(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                prefix[static_cast<std::size_t>(ks[c])] / static_cast<double>(ks[c]);
        nearest[i] = prefix[1];
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (nearest[a] != nearest[b])
            return nearest[a] < nearest[b];
        return m.labels[a] < m.labels[b];
    });
    profile.isos.reserve(n);
    profile.means.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ks.size()));
    for (std::size_t r = 0; r < n; ++r) {
        profile.isos.push_back(m.labels[order[r]]);
        profile.means.row(static_cast<Eigen::Index>(r)) =
            means.row(static_cast<Eigen::Index>(order[r]));
    }
    return profile;
}

std::vector<KsResult> gender_component_test(const EmbeddingSet& set, const Projection& proj,
                                            Eigen::Index n_components) {
    require(n_components >= 1 && n_components <= proj.output_dim, Status::BadArgument,
            "component count out of range");
    const EmbeddingSet projected = project(set, proj);

    std::vector<Eigen::Index> male, female;
    for (Eigen::Index i = 0; i < projected.rows(); ++i) {
        const Gender g = projected.records[static_cast<std::size_t>(i)].gender;
        if (g == Gender::Male)
            male.push_back(i);
        else if (g == Gender::Female)
            female.push_back(i);
    }
    require(!male.empty() && !female.empty(), Status::MissingGroup,
            "both gender groups must be non-empty");

    std::vector<KsResult> results;
    results.reserve(static_cast<std::size_t>(n_components));
    for (Eigen::Index c = 0; c < n_components; ++c) {
        std::vector<double> a, b;
        a.reserve(male.size());
        b.reserve(female.size());
        for (Eigen::Index r : male)
            a.push_back(static_cast<double>(projected.matrix(r, c)));
        for (Eigen::Index r : female)
            b.push_back(static_cast<double>(projected.matrix(r, c)));
        results.push_back(ks_two_sample(std::move(a), std::move(b)));
    }
    return results;
}

} // namespace glem
