#include "detail/container.hpp"

#include "glem/io.hpp"

#include <cstring>
#include <fstream>

namespace glem::detail {

Container read_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Status::IoError, "cannot open '" + path + "'");

    char magic[6];
    in.read(magic, 6);
    require(in.gcount() == 6 && std::memcmp(magic, kContainerMagic, 6) == 0,
            Status::MalformedHeader, "'" + path + "' is not a GLEM1 container");

    std::uint8_t len_bytes[8];
    in.read(reinterpret_cast<char*>(len_bytes), 8);
    require(in.gcount() == 8, Status::MalformedHeader, "truncated header length in '" + path + "'");
    std::uint64_t header_len = 0;
    std::memcpy(&header_len, len_bytes, 8);
    require(header_len > 0 && header_len < (1ULL << 32), Status::MalformedHeader,
            "implausible header length in '" + path + "'");

    std::string header_text(header_len, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_len));
    require(static_cast<std::uint64_t>(in.gcount()) == header_len, Status::MalformedHeader,
            "truncated JSON header in '" + path + "'");

    Container c;
    try {
        c.header = OrderedJson::parse(header_text);
    } catch (const std::exception& e) {
        fail(Status::MalformedHeader, "invalid JSON header in '" + path + "': " + e.what());
    }

    c.payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return c;
}

void write_container(const std::string& path, const OrderedJson& header,
                     const void* payload, std::size_t payload_bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), Status::IoError, "cannot write '" + path + "'");
    const std::string header_text = header.dump();
    const std::uint64_t header_len = header_text.size();
    out.write(kContainerMagic, 6);
    out.write(reinterpret_cast<const char*>(&header_len), 8);
    out.write(header_text.data(), static_cast<std::streamsize>(header_len));
    if (payload_bytes > 0)
        out.write(static_cast<const char*>(payload), static_cast<std::streamsize>(payload_bytes));
    out.flush();
    require(out.good(), Status::IoError, "write failed for '" + path + "'");
}

bool file_has_container_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good())
        return false;
    char magic[6];
    in.read(magic, 6);
    return in.gcount() == 6 && std::memcmp(magic, kContainerMagic, 6) == 0;
}

} // namespace glem::detail
