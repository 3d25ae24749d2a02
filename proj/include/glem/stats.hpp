#pragma once

#include "glem/types.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace glem {

/// Pearson product-moment correlation. Throws ConstantInput on zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

struct KsResult {
    double d = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Two-sample Kolmogorov-Smirnov test. D is the exact ECDF sup-distance; the
/// p-value uses the asymptotic Kolmogorov series (100 terms) at effective
/// sample size n1*n2/(n1+n2).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct PairRow {
    std::string l1, l2; // l1 < l2 lexicographically
    double embedding_d = 0.0;
    std::optional<double> lexical_d;
    double geographic_d = 0.0;
    bool same_family = false;
};

struct PairTable {
    std::vector<PairRow> rows;
};

/// One row per unordered pair of languages common to the embedding and
/// geographic matrices. lexical_d is absent where lex lacks a language.
/// same_family comes from meta (false when meta is null or lacks a language).
PairTable build_pair_table(const DistanceMatrix& emb, const DistanceMatrix* lex,
                           const DistanceMatrix& geo, const MetaTable* meta);

/// OLS of exp(embedding_d) on [1, sqrt(geo_d), exp(lex_d), sqrt(geo_d)*exp(lex_d)].
/// Rows lacking a lexical distance are skipped; row_index maps residuals back
/// to the pair table.
struct RegressionFit {
    std::array<double, 4> coefficients{};  // intercept, geo, lex, interaction
    std::array<double, 4> standard_errors{};
    std::array<double, 4> t_values{};
    double r_squared = 0.0;
    double adjusted_r_squared = 0.0;
    std::vector<double> residuals;     // transformed scale, fitted rows only
    std::vector<std::size_t> row_index;
    std::size_t n_rows = 0;
};

RegressionFit fit_interaction_model(const PairTable& table);

struct OutlierReport {
    std::vector<std::pair<PairRow, double>> positive; // residual descending
    std::vector<std::pair<PairRow, double>> negative; // residual ascending
};

OutlierReport residual_outliers(const RegressionFit& fit, const PairTable& table,
                                std::size_t k);

struct CumulativeCurve {
    std::vector<int> n;
    std::vector<double> r_geographic;
    std::vector<double> r_lexical;
    std::vector<double> model_correlation; // sqrt of adjusted R^2, clamped at 0
    /// Same model correlation computed once from the unprojected embeddings.
    double model_correlation_raw = 0.0;
};

/// Fig-3 style analysis: for each n, distances from the first n projected
/// dimensions are correlated against geography and lexicon, and the
/// interaction model is refit. `set` is the unprojected utterance set.
CumulativeCurve cumulative_dimension_curve(const EmbeddingSet& set,
                                           const Projection& proj,
                                           const DistanceMatrix& lex,
                                           const DistanceMatrix& geo,
                                           const std::vector<int>& n_range);

/// LOESS: degree-1 local fits with tricube weights over the span-fraction
/// nearest neighbors of each x. Windows with no x spread fall back to the
/// window mean.
std::vector<double> loess_smooth(std::span<const double> xs,
                                 std::span<const double> ys, double span);

} // namespace glem
