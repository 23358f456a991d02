// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#include "delight/arrayio.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>

namespace delight {

namespace {

// Element bytes are written little-endian. All supported targets are
// little-endian; byte-swap on read would go here if that ever changes.
static_assert(sizeof(real) == 8, "real must be 64-bit");

} // namespace

void write_array(const std::string& path, const Shape& shape, const std::vector<real>& data) {
    check(numel(shape) == data.size(), "write_array: shape/data mismatch for " + path);
    nlohmann::json hdr;
    hdr["shape"] = shape;
    hdr["dtype"] = "float64";
    hdr["endianness"] = "little";
    std::string hs = hdr.dump();

    std::ofstream f(path, std::ios::binary);
    check(f.good(), "write_array: cannot open " + path);
    std::uint32_t hlen = static_cast<std::uint32_t>(hs.size());
    f.write(reinterpret_cast<const char*>(&hlen), 4);
    f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(real)));
    check(f.good(), "write_array: write failed for " + path);
}

ArrayFile read_array(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    check(f.good(), "read_array: cannot open " + path);
    std::uint32_t hlen = 0;
    f.read(reinterpret_cast<char*>(&hlen), 4);
    check(f.good() && hlen > 0 && hlen < (1u << 20), "read_array: bad header in " + path);
    std::string hs(hlen, '\0');
    f.read(hs.data(), hlen);
    check(f.good(), "read_array: truncated header in " + path);

    nlohmann::json hdr = nlohmann::json::parse(hs, nullptr, false);
    check(!hdr.is_discarded(), "read_array: invalid header JSON in " + path);
    check(hdr.value("dtype", "") == "float64", "read_array: unsupported dtype in " + path);
    check(hdr.value("endianness", "") == "little", "read_array: unsupported endianness in " + path);

    ArrayFile out;
    out.shape = hdr.at("shape").get<Shape>();
    out.data.resize(numel(out.shape));
    f.read(reinterpret_cast<char*>(out.data.data()),
           static_cast<std::streamsize>(out.data.size() * sizeof(real)));
    check(f.good(), "read_array: truncated data in " + path);
    return out;
}

} // namespace delight
