#include "glem/types.hpp"

#include "glem/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace glem {

const char* status_name(Status s) noexcept {
    switch (s) {
    case Status::Ok: return "ok";
    case Status::BadConfig: return "bad_config";
    case Status::BadArgument: return "bad_argument";
    case Status::IoError: return "io_error";
    case Status::MalformedHeader: return "malformed_header";
    case Status::PayloadTruncated: return "payload_truncated";
    case Status::NonFiniteValue: return "non_finite_value";
    case Status::DuplicateUtteranceId: return "duplicate_utterance_id";
    case Status::DimensionMismatch: return "dimension_mismatch";
    case Status::InvalidRecord: return "invalid_record";
    case Status::EmptyResult: return "empty_result";
    case Status::NoPredictions: return "no_predictions";
    case Status::UnknownMeaningId: return "unknown_meaning_id";
    case Status::EmptyTranscription: return "empty_transcription";
    case Status::EmptyPair: return "empty_pair";
    case Status::MissingLanguage: return "missing_language";
    case Status::LabelMismatch: return "label_mismatch";
    case Status::MissingMetadata: return "missing_metadata";
    case Status::MissingGroup: return "missing_group";
    case Status::OverFiltered: return "over_filtered";
    case Status::InsufficientData: return "insufficient_data";
    case Status::DegenerateDenominator: return "degenerate_denominator";
    case Status::InsufficientRank: return "insufficient_rank";
    case Status::SingularScatter: return "singular_scatter";
    case Status::ZeroVector: return "zero_vector";
    case Status::ConstantInput: return "constant_input";
    case Status::CollinearDesign: return "collinear_design";
    case Status::NnlsStalled: return "nnls_stalled";
    case Status::NumericFailure: return "numeric_failure";
    }
    return "unknown";
}

const char* gender_name(Gender g) noexcept {
    switch (g) {
    case Gender::Male: return "male";
    case Gender::Female: return "female";
    case Gender::Unspecified: return "";
    }
    return "";
}

Gender gender_from_string(const std::string& s) {
    if (s.empty() || s == "unspecified")
        return Gender::Unspecified;
    if (s == "male")
        return Gender::Male;
    if (s == "female")
        return Gender::Female;
    fail(Status::InvalidRecord, "unrecognized gender value '" + s + "'");
}

const char* distance_kind_name(DistanceKind k) noexcept {
    switch (k) {
    case DistanceKind::Embedding: return "embedding";
    case DistanceKind::Lexical: return "lexical";
    case DistanceKind::Geographic: return "geographic";
    }
    return "embedding";
}

DistanceKind distance_kind_from_string(const std::string& s) {
    if (s == "embedding")
        return DistanceKind::Embedding;
    if (s == "lexical")
        return DistanceKind::Lexical;
    if (s == "geographic")
        return DistanceKind::Geographic;
    fail(Status::MalformedHeader, "unrecognized distance kind '" + s + "'");
}

namespace {

bool valid_language_code(const std::string& code) {
    if (code.empty())
        return false;
    for (char c : code) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        if (!ok)
            return false;
    }
    return true;
}

} // namespace

std::vector<std::string> EmbeddingSet::languages() const {
    std::set<std::string> seen;
    for (const auto& r : records)
        seen.insert(r.language);
    return {seen.begin(), seen.end()};
}

std::map<std::string, std::vector<Eigen::Index>> EmbeddingSet::rows_by_language() const {
    std::map<std::string, std::vector<Eigen::Index>> by_lang;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(records.size()); ++i)
        by_lang[records[i].language].push_back(i);
    return by_lang;
}

void EmbeddingSet::validate() const {
    require(static_cast<std::size_t>(matrix.rows()) == records.size(), Status::DimensionMismatch,
            "record count does not match row count");
    std::set<std::string> ids;
    for (const auto& r : records) {
        require(!r.utterance_id.empty(), Status::InvalidRecord, "empty utterance id");
        require(ids.insert(r.utterance_id).second, Status::DuplicateUtteranceId,
                "duplicate utterance id '" + r.utterance_id + "'");
        require(valid_language_code(r.language), Status::InvalidRecord,
                "invalid language code '" + r.language + "'");
        if (!r.predicted_language.empty())
            require(valid_language_code(r.predicted_language), Status::InvalidRecord,
                    "invalid predicted language code '" + r.predicted_language + "'");
    }
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < matrix.cols(); ++j)
            require(std::isfinite(matrix(i, j)), Status::NonFiniteValue,
                    "non-finite value at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
}

const LanguageMeta* MetaTable::find(const std::string& iso) const {
    for (const auto& row : rows)
        if (row.iso == iso)
            return &row;
    return nullptr;
}

const LanguageMeta& MetaTable::at(const std::string& iso) const {
    const LanguageMeta* m = find(iso);
    if (!m)
        fail(Status::MissingMetadata, "no metadata for language '" + iso + "'");
    return *m;
}

void Projection::validate() const {
    require(basis.rows() == input_dim && basis.cols() == output_dim, Status::DimensionMismatch,
            "projection basis shape mismatch");
    require(mean.size() == input_dim, Status::DimensionMismatch, "projection mean size mismatch");
    require(eigenvalues.size() == output_dim, Status::DimensionMismatch,
            "projection eigenvalue count mismatch");
    for (Eigen::Index c = 0; c < output_dim; ++c) {
        const double norm = basis.col(c).norm();
        require(std::abs(norm - 1.0) < 1e-6, Status::NumericFailure,
                "projection basis column " + std::to_string(c) + " is not unit norm");
        if (c > 0)
            require(eigenvalues[c] <= eigenvalues[c - 1] + 1e-12, Status::NumericFailure,
                    "projection eigenvalues are not non-increasing");
    }
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels_, DistanceKind kind_)
    : labels(std::move(labels_)), kind(kind_) {
    const std::size_t n = labels.size();
    values.assign(n * (n - 1) / 2, 0.0);
}

std::size_t DistanceMatrix::condensed_index(std::size_t n, std::size_t i, std::size_t j) {
    if (i > j)
        std::swap(i, j);
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

std::size_t DistanceMatrix::label_index(const std::string& iso) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == iso)
            return i;
    return static_cast<std::size_t>(-1);
}

void DistanceMatrix::validate() const {
    const std::size_t n = labels.size();
    require(values.size() == n * (n - 1) / 2, Status::DimensionMismatch,
            "condensed distance length mismatch");
    for (double v : values) {
        require(std::isfinite(v), Status::NonFiniteValue, "non-finite distance value");
        require(v >= 0.0, Status::NumericFailure, "negative distance value");
    }
}

} // namespace glem
