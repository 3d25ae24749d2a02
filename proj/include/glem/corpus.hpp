#pragma once

#include "glem/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace glem {

enum class EmbeddingFormat : std::uint8_t { Auto, Binary, Csv };

/// Loads an embedding set from the GLEM1 binary container or the CSV form.
/// Auto sniffs the magic bytes. Row order is preserved from the file.
EmbeddingSet load_embeddings(const std::string& path,
                             EmbeddingFormat format = EmbeddingFormat::Auto);

/// Writes an embedding set. The binary payload is float32 little-endian
/// row-major, so write/load round-trips are bit exact. An optional seed is
/// recorded in the container header of derived artifacts.
void write_embeddings(const EmbeddingSet& set, const std::string& path,
                      EmbeddingFormat format = EmbeddingFormat::Binary,
                      std::optional<std::uint64_t> seed = std::nullopt);

/// Drops languages with fewer than min_per_language rows and subsamples
/// languages above max_per_language down to exactly max_per_language,
/// uniformly without replacement with the seeded generator. Within-language
/// row order is preserved.
EmbeddingSet filter_by_count(const EmbeddingSet& set, std::size_t min_per_language,
                             std::size_t max_per_language, std::uint64_t seed);

/// Fraction of records whose predicted language equals the label. Records
/// without a prediction are not considered. With restrict_to_training set,
/// only languages flagged in_lid_training in meta are considered (meta
/// required in that case).
double lid_accuracy(const EmbeddingSet& set, const MetaTable* meta,
                    bool restrict_to_training);

/// TSV with header: iso, name, family, subfamily, lat, lon, in_lid_training.
MetaTable load_language_metadata(const std::string& path);

/// Default meaning-id inventory accepted by load_wordlists: 1..100
/// (the numbering the 40-concept core vocabulary ids live in).
std::vector<int> default_meaning_inventory();

/// TSV with header: iso, meaning_id, transcription; one row per synonym.
/// Modifier codepoints {~, $, *, "} and spaces are stripped; every remaining
/// codepoint is one segment.
WordList load_wordlists(const std::string& path,
                        std::vector<int> inventory = default_meaning_inventory());

} // namespace glem
