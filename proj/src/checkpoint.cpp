// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#include "delight/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>

namespace delight {

namespace {

constexpr char kMagic[8] = {'D', 'L', 'T', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

} // namespace

const std::vector<real>& Checkpoint::get(const std::string& name) const {
    auto it = arrays.find(name);
    check(it != arrays.end(), "checkpoint: missing array " + name);
    return it->second.second;
}

const Shape& Checkpoint::shape_of(const std::string& name) const {
    auto it = arrays.find(name);
    check(it != arrays.end(), "checkpoint: missing array " + name);
    return it->second.first;
}

void Checkpoint::put_params(const NamedParams& ps) {
    for (const auto& [name, t] : ps) put(name, t.shape(), t.data());
}

void Checkpoint::load_into(const NamedParams& ps) const {
    for (const auto& [name, t] : ps) {
        auto it = arrays.find(name);
        check(it != arrays.end(), "checkpoint: missing parameter " + name);
        check(it->second.first == t.shape(),
              "checkpoint: shape mismatch for " + name + " (" + shape_str(it->second.first) +
                  " vs " + shape_str(t.shape()) + ")");
        const_cast<Tensor&>(t).data() = it->second.second;
    }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    nlohmann::json idx;
    idx["format_version"] = kVersion;
    idx["config_echo"] = ckpt.config_echo;
    idx["meta"] = ckpt.meta;
    nlohmann::json entries = nlohmann::json::array();
    std::uint64_t offset = 0;
    for (const auto& [name, arr] : ckpt.arrays) { // std::map: sorted, deterministic
        nlohmann::json e;
        e["name"] = name;
        e["shape"] = arr.first;
        e["offset"] = offset;
        e["count"] = arr.second.size();
        entries.push_back(e);
        offset += arr.second.size();
    }
    idx["arrays"] = entries;
    std::string hs = idx.dump();

    std::ofstream f(path, std::ios::binary);
    check(f.good(), "save_checkpoint: cannot open " + path);
    f.write(kMagic, 8);
    f.write(reinterpret_cast<const char*>(&kVersion), 4);
    std::uint64_t hlen = hs.size();
    f.write(reinterpret_cast<const char*>(&hlen), 8);
    f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (const auto& [name, arr] : ckpt.arrays)
        f.write(reinterpret_cast<const char*>(arr.second.data()),
                static_cast<std::streamsize>(arr.second.size() * sizeof(real)));
    check(f.good(), "save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    check(f.good(), "load_checkpoint: cannot open " + path);
    char magic[8];
    f.read(magic, 8);
    check(f.good() && std::memcmp(magic, kMagic, 8) == 0,
          "load_checkpoint: bad magic in " + path);
    std::uint32_t version = 0;
    f.read(reinterpret_cast<char*>(&version), 4);
    check(version == kVersion, "load_checkpoint: unsupported version in " + path);
    std::uint64_t hlen = 0;
    f.read(reinterpret_cast<char*>(&hlen), 8);
    check(f.good() && hlen > 0 && hlen < (1ull << 30), "load_checkpoint: bad index in " + path);
    std::string hs(hlen, '\0');
    f.read(hs.data(), static_cast<std::streamsize>(hlen));
    check(f.good(), "load_checkpoint: truncated index in " + path);

    nlohmann::json idx = nlohmann::json::parse(hs, nullptr, false);
    check(!idx.is_discarded(), "load_checkpoint: invalid index JSON in " + path);

    Checkpoint ckpt;
    ckpt.config_echo = idx.value("config_echo", "");
    if (idx.contains("meta"))
        ckpt.meta = idx["meta"].get<std::map<std::string, std::string>>();
    for (const auto& e : idx.at("arrays")) {
        std::string name = e.at("name").get<std::string>();
        Shape shape = e.at("shape").get<Shape>();
        std::size_t count = e.at("count").get<std::size_t>();
        check(numel(shape) == count, "load_checkpoint: bad entry for " + name);
        std::vector<real> data(count);
        f.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(count * sizeof(real)));
        check(f.good(), "load_checkpoint: truncated data for " + name);
        ckpt.arrays[name] = {std::move(shape), std::move(data)};
    }
    return ckpt;
}

std::uint64_t params_hash(const NamedParams& ps) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const void* p, std::size_t n) {
        const unsigned char* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [name, t] : ps) {
        mix(name.data(), name.size());
        mix(t.data().data(), t.data().size() * sizeof(real));
    }
    return h;
}

} // namespace delight
