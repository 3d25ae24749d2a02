#include "glem/refdist.hpp"

#include "glem/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace glem {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    if (a.size() > b.size())
        std::swap(a, b);
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<std::size_t> prev(n + 1), cur(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        prev[i] = i;
    for (std::size_t j = 1; j <= m; ++j) {
        cur[0] = j;
        for (std::size_t i = 1; i <= n; ++i) {
            const std::size_t sub = prev[i - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[i] = std::min({prev[i] + 1, cur[i - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

double ldn_pair(std::u32string_view a, std::u32string_view b) {
    const std::size_t longest = std::max(a.size(), b.size());
    require(longest >= 1, Status::EmptyPair, "both segment sequences are empty");
    return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double ldn_meaning(const std::vector<WordList::Segments>& a,
                   const std::vector<WordList::Segments>& b, SynonymRule rule) {
    require(!a.empty() && !b.empty(), Status::EmptyPair, "empty synonym list");
    switch (rule) {
    case SynonymRule::First:
        return ldn_pair(a.front(), b.front());
    case SynonymRule::Min: {
        double best = 1.0;
        for (const auto& wa : a)
            for (const auto& wb : b)
                best = std::min(best, ldn_pair(wa, wb));
        return best;
    }
    case SynonymRule::Mean: {
        double sum = 0.0;
        for (const auto& wa : a)
            for (const auto& wb : b)
                sum += ldn_pair(wa, wb);
        return sum / static_cast<double>(a.size() * b.size());
    }
    }
    return 0.0;
}

namespace {

const WordList::MeaningMap& require_language(const WordList& lists, const std::string& iso) {
    const auto it = lists.languages.find(iso);
    require(it != lists.languages.end(), Status::MissingLanguage,
            "no word list for language '" + iso + "'");
    return it->second;
}

std::vector<int> shared_meanings(const WordList::MeaningMap& a, const WordList::MeaningMap& b) {
    std::vector<int> shared;
    for (const auto& [meaning, words] : a) {
        (void)words;
        if (b.find(meaning) != b.end())
            shared.push_back(meaning);
    }
    return shared; // ascending: MeaningMap is ordered
}

} // namespace

double ldnd(const WordList& lists, const std::string& l1, const std::string& l2,
            const LexicalConfig& cfg) {
    const auto& a = require_language(lists, l1);
    const auto& b = require_language(lists, l2);
    const std::vector<int> shared = shared_meanings(a, b);
    require(shared.size() >= 2, Status::InsufficientData,
            "'" + l1 + "' and '" + l2 + "' share fewer than 2 meanings");

    // Meanings are iterated in ascending id order with plain accumulation so
    // results are stable across runs and platforms.
    double numerator = 0.0;
    for (int m : shared)
        numerator += ldn_meaning(a.at(m), b.at(m), cfg.synonym_rule);
    numerator /= static_cast<double>(shared.size());

    if (cfg.variant == LexicalVariant::Ldn)
        return numerator;

    double denominator = 0.0;
    for (int m : shared)
        for (int n : shared) {
            if (m == n)
                continue;
            denominator += ldn_meaning(a.at(m), b.at(n), cfg.synonym_rule);
        }
    denominator /= static_cast<double>(shared.size() * (shared.size() - 1));
    require(denominator > 0.0, Status::DegenerateDenominator,
            "all cross-meaning comparisons of '" + l1 + "' and '" + l2 + "' are identical");
    return numerator / denominator;
}

LexicalMatrixResult lexical_distance_matrix(const WordList& lists,
                                            const std::vector<std::string>& languages,
                                            const LexicalConfig& cfg) {
    std::set<std::string> requested(languages.begin(), languages.end());
    if (requested.empty())
        for (const auto& [iso, words] : lists.languages) {
            (void)words;
            requested.insert(iso);
        }
    std::vector<std::string> present;
    LexicalMatrixResult result;
    for (const auto& iso : requested) {
        if (lists.has_language(iso))
            present.push_back(iso);
        else
            result.missing.push_back(iso);
    }
    require(present.size() >= 2, Status::InsufficientData,
            "fewer than 2 requested languages have word lists");

    result.matrix = DistanceMatrix(present, DistanceKind::Lexical);
    for (std::size_t i = 0; i < present.size(); ++i)
        for (std::size_t j = i + 1; j < present.size(); ++j)
            result.matrix.set(i, j, ldnd(lists, present[i], present[j], cfg));
    return result;
}

double haversine_km(const GeoPoint& p, const GeoPoint& q) {
    const double rad = std::numbers::pi / 180.0;
    const double phi1 = p.latitude * rad;
    const double phi2 = q.latitude * rad;
    const double dphi = (q.latitude - p.latitude) * rad;
    const double dlambda = (q.longitude - p.longitude) * rad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

DistanceMatrix geographic_distance_matrix(const MetaTable& meta,
                                          const std::vector<std::string>& subset) {
    std::vector<std::string> isos;
    if (subset.empty()) {
        for (const auto& row : meta.rows)
            isos.push_back(row.iso);
    } else {
        isos = subset;
        for (const auto& iso : isos)
            meta.at(iso); // throws MissingMetadata
    }
    std::sort(isos.begin(), isos.end());
    isos.erase(std::unique(isos.begin(), isos.end()), isos.end());
    require(isos.size() >= 2, Status::InsufficientData,
            "geographic distances need at least 2 languages");

    DistanceMatrix m(isos, DistanceKind::Geographic);
    for (std::size_t i = 0; i < isos.size(); ++i) {
        const LanguageMeta& a = meta.at(isos[i]);
        for (std::size_t j = i + 1; j < isos.size(); ++j) {
            const LanguageMeta& b = meta.at(isos[j]);
            m.set(i, j, haversine_km({a.latitude, a.longitude}, {b.latitude, b.longitude}));
        }
    }
    return m;
}

} // namespace glem
