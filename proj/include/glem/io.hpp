#pragma once

#include "glem/phylo.hpp"
#include "glem/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace glem {

/// GLEM1 container: magic "GLEM1\n", 8-byte little-endian header length,
/// UTF-8 JSON header, float payload. The embeddings header/payload layout is
/// part of the external interface; projections and condensed distance
/// matrices reuse the same framing with their own header kinds.

inline constexpr char kContainerMagic[6] = {'G', 'L', 'E', 'M', '1', '\n'};

void write_projection(const Projection& proj, const std::string& path);
Projection load_projection(const std::string& path);

void write_distance_binary(const DistanceMatrix& m, const std::string& path,
                           std::optional<std::uint64_t> seed = std::nullopt);
/// Square labeled CSV, values printed with round-trip precision.
void write_distance_csv(const DistanceMatrix& m, const std::string& path);

/// Loads either the binary or the CSV distance form (sniffed by magic).
DistanceMatrix load_distance_matrix(const std::string& path);

/// Newick with branch lengths (height differences). When support values are
/// given they are written per internal node in square brackets.
std::string to_newick(const Dendrogram& d, const std::vector<double>* support = nullptr);
void write_newick(const Dendrogram& d, const std::string& path,
                  const std::vector<double>* support = nullptr);

/// Nexus TAXA + SPLITS blocks (cycle and weighted splits), the form split
/// network viewers consume.
std::string to_nexus_splits(const SplitSystem& s);
void write_nexus_splits(const SplitSystem& s, const std::string& path);

void write_dendrogram_json(const Dendrogram& d, const std::string& path,
                           const std::vector<double>* support = nullptr);
void write_split_system_json(const SplitSystem& s, const std::string& path);

/// FNV-1a 64-bit content hash, used for manifest digests.
std::uint64_t fnv1a64_file(const std::string& path);

// Small shared file helpers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace glem
