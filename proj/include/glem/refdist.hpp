#pragma once

#include "glem/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace glem {

/// Minimum number of insertions, deletions and substitutions turning a into b.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// Normalized Levenshtein distance: edits / max(|a|, |b|). Throws EmptyPair
/// when both sequences are empty.
double ldn_pair(std::u32string_view a, std::u32string_view b);

enum class SynonymRule : std::uint8_t { Min, First, Mean };
enum class LexicalVariant : std::uint8_t { Ldn, Ldnd };

struct LexicalConfig {
    SynonymRule synonym_rule = SynonymRule::Min;
    LexicalVariant variant = LexicalVariant::Ldnd;
};

/// LDN between two languages for one shared meaning pair, with the synonym
/// rule applied across the synonym lists.
double ldn_meaning(const std::vector<WordList::Segments>& a,
                   const std::vector<WordList::Segments>& b, SynonymRule rule);

/// Lexical distance between two languages. LDND divides the mean same-meaning
/// LDN by the mean LDN over ordered pairs of distinct shared meanings (both
/// directions), which makes the result symmetric by construction.
double ldnd(const WordList& lists, const std::string& l1, const std::string& l2,
            const LexicalConfig& cfg = {});

struct LexicalMatrixResult {
    DistanceMatrix matrix;            // kind = lexical, labels sorted ascending
    std::vector<std::string> missing; // requested languages absent from the lists
};

LexicalMatrixResult lexical_distance_matrix(const WordList& lists,
                                            const std::vector<std::string>& languages,
                                            const LexicalConfig& cfg = {});

struct GeoPoint {
    double latitude = 0.0;  // degrees
    double longitude = 0.0; // degrees
};

inline constexpr double kEarthRadiusKm = 6371.0088;

/// Great-circle distance on the sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& p, const GeoPoint& q);

/// All-pairs haversine distances; labels sorted ascending by ISO. When
/// `subset` is non-empty only those languages are used (all must be in meta).
DistanceMatrix geographic_distance_matrix(const MetaTable& meta,
                                          const std::vector<std::string>& subset = {});

} // namespace glem
