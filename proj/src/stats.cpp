#include "glem/stats.hpp"

#include "glem/embedspace.hpp"
#include "glem/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace glem {

double pearson(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), Status::BadArgument, "pearson inputs differ in length");
    const std::size_t n = x.size();
    require(n >= 3, Status::InsufficientData, "pearson needs at least 3 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    require(sxx > 0.0 && syy > 0.0, Status::ConstantInput, "constant input to pearson");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

/// Asymptotic Kolmogorov survival function Q(x) = 2 sum (-1)^(k-1) exp(-2 k^2 x^2).
double kolmogorov_q(double x, int terms = 100) {
    if (x <= 0.0)
        return 1.0;
    double q = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        q += (k % 2 == 1 ? term : -term);
        if (term < 1e-18)
            break;
    }
    return std::clamp(2.0 * q, 0.0, 1.0);
}

} // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    require(!a.empty() && !b.empty(), Status::InsufficientData, "empty sample in KS test");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < n1 && j < n2) {
        const double t = std::min(a[i], b[j]);
        while (i < n1 && a[i] <= t)
            ++i;
        while (j < n2 && b[j] <= t)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(n1) -
                                 static_cast<double>(j) / static_cast<double>(n2)));
    }
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(n1) -
                             static_cast<double>(j) / static_cast<double>(n2)));

    KsResult r;
    r.d = d;
    r.n1 = n1;
    r.n2 = n2;
    const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                      static_cast<double>(n1 + n2);
    r.p_value = kolmogorov_q(std::sqrt(ne) * d);
    return r;
}

PairTable build_pair_table(const DistanceMatrix& emb, const DistanceMatrix* lex,
                           const DistanceMatrix& geo, const MetaTable* meta) {
    std::set<std::string> geo_labels(geo.labels.begin(), geo.labels.end());
    std::vector<std::string> common;
    for (const auto& iso : emb.labels)
        if (geo_labels.count(iso))
            common.push_back(iso);
    std::sort(common.begin(), common.end());
    require(common.size() >= 3, Status::LabelMismatch,
            "embedding and geographic matrices share fewer than 3 languages");

    PairTable table;
    table.rows.reserve(common.size() * (common.size() - 1) / 2);
    for (std::size_t i = 0; i < common.size(); ++i) {
        const std::size_t ei = emb.label_index(common[i]);
        const std::size_t gi = geo.label_index(common[i]);
        const std::size_t li = lex ? lex->label_index(common[i]) : static_cast<std::size_t>(-1);
        const LanguageMeta* mi = meta ? meta->find(common[i]) : nullptr;
        for (std::size_t j = i + 1; j < common.size(); ++j) {
            PairRow row;
            row.l1 = common[i];
            row.l2 = common[j];
            row.embedding_d = emb.at(ei, emb.label_index(common[j]));
            row.geographic_d = geo.at(gi, geo.label_index(common[j]));
            if (lex) {
                const std::size_t lj = lex->label_index(common[j]);
                if (li != static_cast<std::size_t>(-1) && lj != static_cast<std::size_t>(-1))
                    row.lexical_d = lex->at(li, lj);
            }
            if (mi && meta) {
                const LanguageMeta* mj = meta->find(common[j]);
                row.same_family = mj && !mi->family.empty() && mi->family == mj->family;
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

RegressionFit fit_interaction_model(const PairTable& table) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        if (table.rows[i].lexical_d)
            rows.push_back(i);
    require(rows.size() >= 10, Status::InsufficientData,
            "interaction model needs at least 10 complete pairs");

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd design(n, 4);
    Eigen::VectorXd response(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const PairRow& row = table.rows[rows[static_cast<std::size_t>(r)]];
        const double g = std::sqrt(row.geographic_d);
        const double l = std::exp(*row.lexical_d);
        design(r, 0) = 1.0;
        design(r, 1) = g;
        design(r, 2) = l;
        design(r, 3) = g * l;
        response(r) = std::exp(row.embedding_d);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    require(qr.rank() == 4, Status::CollinearDesign, "rank-deficient regression design");
    const Eigen::VectorXd beta = qr.solve(response);
    const Eigen::VectorXd resid = response - design * beta;

    const double rss = resid.squaredNorm();
    const double mean_y = response.mean();
    const double tss = (response.array() - mean_y).square().sum();
    require(tss > 0.0, Status::ConstantInput, "constant response in regression");

    RegressionFit fit;
    fit.n_rows = rows.size();
    fit.row_index = std::move(rows);
    for (int k = 0; k < 4; ++k)
        fit.coefficients[static_cast<std::size_t>(k)] = beta(k);
    fit.r_squared = 1.0 - rss / tss;
    const double dn = static_cast<double>(n);
    fit.adjusted_r_squared = 1.0 - (1.0 - fit.r_squared) * (dn - 1.0) / (dn - 3.0 - 1.0);

    // Covariance of beta from the R factor: (X^T X)^-1 = P R^-1 R^-T P^T.
    const double sigma2 = rss / (dn - 4.0);
    Eigen::MatrixXd rfac = qr.matrixR().topLeftCorner(4, 4).triangularView<Eigen::Upper>();
    Eigen::MatrixXd rinv = rfac.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(4, 4));
    Eigen::MatrixXd xtx_inv = rinv * rinv.transpose();
    const Eigen::MatrixXd perm = qr.colsPermutation();
    xtx_inv = perm * xtx_inv * perm.transpose();
    for (int k = 0; k < 4; ++k) {
        const double se = std::sqrt(std::max(0.0, sigma2 * xtx_inv(k, k)));
        fit.standard_errors[static_cast<std::size_t>(k)] = se;
        fit.t_values[static_cast<std::size_t>(k)] = se > 0.0 ? beta(k) / se : 0.0;
    }

    fit.residuals.assign(resid.data(), resid.data() + resid.size());
    return fit;
}

OutlierReport residual_outliers(const RegressionFit& fit, const PairTable& table, std::size_t k) {
    require(k <= fit.n_rows / 2, Status::BadArgument,
            "outlier count exceeds half the fitted rows");
    std::vector<std::size_t> order(fit.n_rows);
    for (std::size_t i = 0; i < fit.n_rows; ++i)
        order[i] = i;
    auto label_of = [&](std::size_t i) -> std::pair<const std::string&, const std::string&> {
        const PairRow& row = table.rows[fit.row_index[i]];
        return {row.l1, row.l2};
    };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (fit.residuals[a] != fit.residuals[b])
            return fit.residuals[a] > fit.residuals[b];
        return label_of(a) < label_of(b);
    });

    OutlierReport report;
    report.positive.reserve(k);
    report.negative.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        report.positive.emplace_back(table.rows[fit.row_index[order[i]]], fit.residuals[order[i]]);
    // Negative side: residual ascending, ties again by label.
    std::vector<std::size_t> neg = order;
    std::sort(neg.begin(), neg.end(), [&](std::size_t a, std::size_t b) {
        if (fit.residuals[a] != fit.residuals[b])
            return fit.residuals[a] < fit.residuals[b];
        return label_of(a) < label_of(b);
    });
    for (std::size_t i = 0; i < k; ++i)
        report.negative.emplace_back(table.rows[fit.row_index[neg[i]]], fit.residuals[neg[i]]);
    return report;
}

namespace {

void extract_pairs(const PairTable& table, std::vector<double>& emb_geo_x,
                   std::vector<double>& emb_geo_y, std::vector<double>& emb_lex_x,
                   std::vector<double>& emb_lex_y) {
    for (const PairRow& row : table.rows) {
        emb_geo_x.push_back(row.embedding_d);
        emb_geo_y.push_back(row.geographic_d);
        if (row.lexical_d) {
            emb_lex_x.push_back(row.embedding_d);
            emb_lex_y.push_back(*row.lexical_d);
        }
    }
}

double model_correlation_of(const PairTable& table) {
    const RegressionFit fit = fit_interaction_model(table);
    return std::sqrt(std::max(0.0, fit.adjusted_r_squared));
}

} // namespace

CumulativeCurve cumulative_dimension_curve(const EmbeddingSet& set, const Projection& proj,
                                           const DistanceMatrix& lex, const DistanceMatrix& geo,
                                           const std::vector<int>& n_range) {
    require(!n_range.empty(), Status::BadArgument, "empty dimension range");
    for (std::size_t i = 0; i < n_range.size(); ++i) {
        require(n_range[i] >= 2 && n_range[i] <= proj.output_dim, Status::BadArgument,
                "dimension count out of range: " + std::to_string(n_range[i]));
        require(i == 0 || n_range[i] > n_range[i - 1], Status::BadArgument,
                "dimension range must be strictly increasing");
    }

    const EmbeddingSet projected = project(set, proj);
    const std::vector<LanguageEmbedding> centroids = language_centroids(projected);

    CumulativeCurve curve;
    curve.n = n_range;
    for (int n : n_range) {
        const DistanceMatrix emb = cosine_distance_matrix(centroids, n);
        const PairTable table = build_pair_table(emb, &lex, geo, nullptr);
        std::vector<double> eg_x, eg_y, el_x, el_y;
        extract_pairs(table, eg_x, eg_y, el_x, el_y);
        curve.r_geographic.push_back(pearson(eg_x, eg_y));
        curve.r_lexical.push_back(pearson(el_x, el_y));
        curve.model_correlation.push_back(model_correlation_of(table));
    }

    const std::vector<LanguageEmbedding> raw_centroids = language_centroids(set);
    const DistanceMatrix raw_emb = cosine_distance_matrix(raw_centroids, 0);
    curve.model_correlation_raw = model_correlation_of(build_pair_table(raw_emb, &lex, geo, nullptr));
    return curve;
}

std::vector<double> loess_smooth(std::span<const double> xs, std::span<const double> ys,
                                 double span) {
    require(xs.size() == ys.size(), Status::BadArgument, "loess inputs differ in length");
    require(span > 0.0 && span <= 1.0, Status::BadArgument, "loess span must be in (0, 1]");
    const std::size_t n = xs.size();
    require(n >= 5, Status::InsufficientData, "loess needs at least 5 points");

    const std::size_t q = std::max<std::size_t>(
        2, std::min(n, static_cast<std::size_t>(std::ceil(span * static_cast<double>(n)))));

    std::vector<double> out(n, 0.0);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = xs[i];
        for (std::size_t j = 0; j < n; ++j)
            order[j] = j;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double da = std::abs(xs[a] - x0);
            const double db = std::abs(xs[b] - x0);
            if (da != db)
                return da < db;
            return a < b;
        });
        const double h = std::abs(xs[order[q - 1]] - x0);

        double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
        double plain_sum = 0.0;
        for (std::size_t k = 0; k < q; ++k) {
            const std::size_t j = order[k];
            plain_sum += ys[j];
            double w = 1.0;
            if (h > 0.0) {
                const double u = std::abs(xs[j] - x0) / h;
                const double t = 1.0 - u * u * u;
                w = t * t * t;
            }
            const double dx = xs[j] - x0;
            sw += w;
            swx += w * dx;
            swy += w * ys[j];
            swxx += w * dx * dx;
            swxy += w * dx * ys[j];
        }
        if (h <= 0.0 || sw <= 0.0) {
            out[i] = plain_sum / static_cast<double>(q); // degenerate window
            continue;
        }
        const double det = sw * swxx - swx * swx;
        if (std::abs(det) <= 1e-12 * std::max(1.0, sw * swxx)) {
            out[i] = swy / sw; // no x spread left after weighting
            continue;
        }
        // Local line a + b*dx evaluated at dx = 0.
        out[i] = (swy * swxx - swx * swxy) / det;
    }
    return out;
}

} // namespace glem
