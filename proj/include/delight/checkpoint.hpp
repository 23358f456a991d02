// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "delight/common.hpp"
#include "delight/nn.hpp"

namespace delight {

// Versioned checkpoint archive: magic, format version, a JSON index (array
// names, shapes, offsets, config echo, metadata) and raw float64 data.
// Save/load round-trips bit-exactly.

struct Checkpoint {
    std::string config_echo;
    std::map<std::string, std::string> meta;          // small scalar metadata
    std::map<std::string, std::pair<Shape, std::vector<real>>> arrays;

    void put(const std::string& name, const Shape& shape, const std::vector<real>& data) {
        arrays[name] = {shape, data};
    }
    bool has(const std::string& name) const { return arrays.count(name) != 0; }
    const std::vector<real>& get(const std::string& name) const;
    const Shape& shape_of(const std::string& name) const;

    // Copies all named parameters in (they must already exist with matching
    // shapes when loading back via load_into).
    void put_params(const NamedParams& ps);
    void load_into(const NamedParams& ps) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Order-insensitive content hash of a parameter set; used by freeze checks.
std::uint64_t params_hash(const NamedParams& ps);

} // namespace delight
