#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace glem {

using MatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixD = Eigen::MatrixXd;
using VectorD = Eigen::VectorXd;

enum class Gender : std::uint8_t { Unspecified = 0, Male = 1, Female = 2 };

const char* gender_name(Gender g) noexcept;
Gender gender_from_string(const std::string& s); // "", "male", "female"

struct UtteranceRecord {
    std::string utterance_id;
    std::string language;           // lowercase ISO 639-3 code
    std::string speaker_id;         // empty = absent
    Gender gender = Gender::Unspecified;
    std::string predicted_language; // empty = absent
};

/// Per-utterance embedding matrix with metadata aligned to rows:
/// records[i] describes matrix row i. Immutable after construction by
/// convention; all operations return fresh sets.
struct EmbeddingSet {
    MatrixF matrix;
    std::vector<UtteranceRecord> records;

    Eigen::Index rows() const { return matrix.rows(); }
    Eigen::Index dim() const { return matrix.cols(); }

    /// Distinct language codes, sorted ascending.
    std::vector<std::string> languages() const;

    /// Row indices per language, each list in row order.
    std::map<std::string, std::vector<Eigen::Index>> rows_by_language() const;

    /// Throws on any invariant violation (row/record mismatch, duplicate
    /// utterance ids, invalid language codes, non-finite values).
    void validate() const;
};

struct LanguageMeta {
    std::string iso;
    std::string name;
    std::string family;
    std::string subfamily; // empty = absent
    double latitude = 0.0;
    double longitude = 0.0;
    bool in_lid_training = false;
};

struct MetaTable {
    std::vector<LanguageMeta> rows;

    const LanguageMeta* find(const std::string& iso) const;
    const LanguageMeta& at(const std::string& iso) const; // throws MissingMetadata
};

/// Word lists keyed by language, then meaning id. Each entry is the list of
/// synonym transcriptions for that meaning, a transcription being a sequence
/// of single-codepoint segments (modifier codepoints already stripped).
struct WordList {
    using Segments = std::u32string;
    using MeaningMap = std::map<int, std::vector<Segments>>;

    std::map<std::string, MeaningMap> languages;
    std::vector<int> inventory; // declared meaning ids, sorted

    bool has_language(const std::string& iso) const {
        return languages.find(iso) != languages.end();
    }
};

enum class ProjectionKind : std::uint8_t { Pca, Lda };

/// A fitted linear projection: rows map through (x - mean) * basis.
/// Basis columns are unit-norm and ordered by non-increasing eigenvalue;
/// column signs are fixed so the largest-magnitude coordinate is positive.
struct Projection {
    ProjectionKind kind = ProjectionKind::Pca;
    Eigen::Index input_dim = 0;
    Eigen::Index output_dim = 0;
    VectorD mean;        // input_dim
    MatrixD basis;       // input_dim x output_dim
    VectorD eigenvalues; // output_dim, non-increasing
    /// PCA: trace of the sample covariance, so eigenvalues[i] / trace is the
    /// explained-variance fraction. LDA: sum of all Fisher criterion values.
    double eigenvalue_trace = 0.0;

    void validate() const;
};

struct LanguageEmbedding {
    std::string iso;
    VectorD vector;
    std::size_t sample_count = 0;
};

enum class DistanceKind : std::uint8_t { Embedding, Lexical, Geographic };

const char* distance_kind_name(DistanceKind k) noexcept;
DistanceKind distance_kind_from_string(const std::string& s);

/// Labeled symmetric zero-diagonal distance store, condensed upper triangle.
struct DistanceMatrix {
    std::vector<std::string> labels; // ordered; ascending ISO for built matrices
    std::vector<double> values;      // n(n-1)/2 entries
    DistanceKind kind = DistanceKind::Embedding;

    DistanceMatrix() = default;
    DistanceMatrix(std::vector<std::string> labels_, DistanceKind kind_);

    std::size_t size() const { return labels.size(); }

    static std::size_t condensed_index(std::size_t n, std::size_t i, std::size_t j);

    double at(std::size_t i, std::size_t j) const {
        return i == j ? 0.0 : values[condensed_index(labels.size(), i, j)];
    }
    void set(std::size_t i, std::size_t j, double v) {
        values[condensed_index(labels.size(), i, j)] = v;
    }

    /// Index of a label, or npos.
    std::size_t label_index(const std::string& iso) const;

    void validate() const; // finiteness, non-negativity, size coherence
};

} // namespace glem
