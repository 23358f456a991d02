// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "delight/common.hpp"

namespace delight {

// Flat binary array file: a 4-byte little-endian header length, a JSON header
// {"shape": [...], "dtype": "float64", "endianness": "little"}, then raw
// element data. Desk format for lighting coefficients, warp fields and masks.

struct ArrayFile {
    Shape shape;
    std::vector<real> data;
};

void write_array(const std::string& path, const Shape& shape, const std::vector<real>& data);
ArrayFile read_array(const std::string& path);

} // namespace delight
