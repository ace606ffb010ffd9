// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include "trim/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "trim/error.hpp"

namespace trim {

namespace {

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
    }
}

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
    }
}

std::uint32_t get_u32(std::span<const std::byte> in) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | std::to_integer<std::uint32_t>(in[i]);
    }
    return v;
}

std::uint64_t get_u64(std::span<const std::byte> in) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | std::to_integer<std::uint64_t>(in[i]);
    }
    return v;
}

std::size_t header_bytes(std::size_t ndim) { return kTensorFixedHeaderBytes + 8 * ndim; }

}  // namespace

std::vector<std::byte> encode_tensor(const Matrix& m) {
    if (!m.all_finite()) {
        throw Error(ErrorCode::kNonFinite, "refusing to write a tensor containing NaN or Inf");
    }
    std::vector<std::byte> out;
    out.reserve(header_bytes(2) + 4 * m.size());
    for (char c : kTensorMagic) {
        out.push_back(static_cast<std::byte>(c));
    }
    put_u32(out, kTensorVersion);
    out.push_back(static_cast<std::byte>(kDtypeFloat32));
    out.push_back(std::byte{2});
    out.push_back(std::byte{0});
    out.push_back(std::byte{0});
    put_u64(out, m.rows());
    put_u64(out, m.cols());
    for (float v : m.data()) {
        put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

TensorFileHeader decode_tensor_header(std::span<const std::byte> bytes) {
    if (bytes.size() < kTensorMagic.size()) {
        throw Error(ErrorCode::kTruncated, "file too short for a tensor header");
    }
    if (!std::equal(kTensorMagic.begin(), kTensorMagic.end(), bytes.begin(),
                    [](char a, std::byte b) { return static_cast<std::byte>(a) == b; })) {
        throw Error(ErrorCode::kBadMagic, "bad magic, expected \"TRIMTNSR\"");
    }
    if (bytes.size() < kTensorFixedHeaderBytes) {
        throw Error(ErrorCode::kTruncated, "file too short for a tensor header");
    }

    TensorFileHeader header;
    header.version = get_u32(bytes.subspan(8, 4));
    header.dtype_code = std::to_integer<std::uint8_t>(bytes[12]);
    const auto ndim = std::to_integer<std::uint8_t>(bytes[13]);

    if (header.version != kTensorVersion) {
        throw Error(ErrorCode::kUnsupported, "unsupported tensor version " + std::to_string(header.version));
    }
    if (header.dtype_code != kDtypeFloat32) {
        throw Error(ErrorCode::kUnsupported, "unsupported dtype code " + std::to_string(header.dtype_code));
    }
    if (ndim != 1 && ndim != 2) {
        throw Error(ErrorCode::kMalformedHeader, "ndim must be 1 or 2, got " + std::to_string(ndim));
    }
    if (bytes[14] != std::byte{0} || bytes[15] != std::byte{0}) {
        throw Error(ErrorCode::kMalformedHeader, "reserved header bytes are not zero");
    }
    if (bytes.size() < header_bytes(ndim)) {
        throw Error(ErrorCode::kTruncated, "file too short for the declared extents");
    }
    for (std::size_t i = 0; i < ndim; ++i) {
        const std::uint64_t d = get_u64(bytes.subspan(kTensorFixedHeaderBytes + 8 * i, 8));
        if (d == 0) {
            throw Error(ErrorCode::kMalformedHeader, "tensor extent " + std::to_string(i) + " is zero");
        }
        header.dims.push_back(d);
    }
    return header;
}

Matrix decode_tensor(std::span<const std::byte> bytes) {
    const TensorFileHeader header = decode_tensor_header(bytes);
    const std::uint64_t rows = header.dims.size() == 2 ? header.dims[0] : 1;
    const std::uint64_t cols = header.dims.back();

    constexpr std::uint64_t kMax = std::numeric_limits<std::size_t>::max();
    if (cols > kMax / rows || rows * cols > kMax / 4) {
        throw Error(ErrorCode::kDimsOverflow, "tensor extents overflow the addressable size");
    }
    const std::uint64_t count = rows * cols;
    const std::uint64_t payload = bytes.size() - header_bytes(header.dims.size());
    if (payload < 4 * count) {
        throw Error(ErrorCode::kTruncated, "truncated payload: " + std::to_string(payload) + " bytes for " +
                                               std::to_string(count) + " float32 values");
    }
    if (payload > 4 * count) {
        throw Error(ErrorCode::kTrailingData, "payload has " + std::to_string(payload - 4 * count) +
                                                  " bytes past the declared extents");
    }

    std::vector<float> data(count);
    auto cursor = bytes.subspan(header_bytes(header.dims.size()));
    for (std::size_t i = 0; i < count; ++i) {
        const float v = std::bit_cast<float>(get_u32(cursor.subspan(4 * i, 4)));
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::kNonFinite, "non-finite value at flat index " + std::to_string(i));
        }
        data[i] = v;
    }
    return Matrix(rows, cols, std::move(data));
}

void write_tensor(const std::filesystem::path& path, const Matrix& m) {
    const auto bytes = encode_tensor(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::kIo, "write failed: " + path.string());
    }
}

Matrix read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::kIo, "cannot open " + path.string());
    }
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw Error(ErrorCode::kIo, "read failed: " + path.string());
    }
    try {
        return decode_tensor(std::as_bytes(std::span<const char>(raw)));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

}  // namespace trim
