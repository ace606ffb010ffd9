// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "trim/matrix.hpp"

namespace trim {

// On-disk layout, little-endian throughout:
//   [0, 8)   magic "TRIMTNSR"
//   [8, 12)  version, u32 (= 1)
//   12       dtype code, u8 (0 = float32)
//   13       ndim, u8 (1 or 2)
//   [14, 16) reserved, zero
//   ndim x u64 extents, then the row-major payload.
inline constexpr std::array<char, 8> kTensorMagic{'T', 'R', 'I', 'M', 'T', 'N', 'S', 'R'};
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 0;
inline constexpr std::size_t kTensorFixedHeaderBytes = 16;

struct TensorFileHeader {
    std::uint32_t version = kTensorVersion;
    std::uint8_t dtype_code = kDtypeFloat32;
    std::vector<std::uint64_t> dims;
};

/// Serializes `m` as a 2-D tensor. Throws kNonFinite if any value is NaN/Inf.
std::vector<std::byte> encode_tensor(const Matrix& m);

/// Parses a complete tensor file image. 1-D tensors load as a 1 x N matrix.
Matrix decode_tensor(std::span<const std::byte> bytes);

/// Header only; validates magic, version, dtype, ndim and extents.
TensorFileHeader decode_tensor_header(std::span<const std::byte> bytes);

void write_tensor(const std::filesystem::path& path, const Matrix& m);
Matrix read_tensor(const std::filesystem::path& path);

}  // namespace trim
