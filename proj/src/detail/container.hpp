#pragma once

#include "glem/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace glem::detail {

static_assert(std::endian::native == std::endian::little,
              "GLEM1 container I/O assumes a little-endian host");

using OrderedJson = nlohmann::ordered_json;

struct Container {
    OrderedJson header;
    std::vector<std::uint8_t> payload;
};

/// Reads magic + header length + JSON header + raw payload.
Container read_container(const std::string& path);

void write_container(const std::string& path, const OrderedJson& header,
                     const void* payload, std::size_t payload_bytes);

bool file_has_container_magic(const std::string& path);

} // namespace glem::detail
