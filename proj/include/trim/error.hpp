// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trim {

enum class ErrorCode {
    kInvalidArgument = 1,
    kIo,
    kBadMagic,
    kUnsupported,
    kMalformedHeader,
    kTruncated,
    kTrailingData,
    kDimsOverflow,
    kNonFinite,
    kDimensionMismatch,
    kZeroNorm,
    kShape,
    kOutOfRange,
    kParse,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the core library surfaces as this exception; the C API
// maps code() onto trim_status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message) : std::runtime_error(message), m_code(code) {}

    ErrorCode code() const noexcept { return m_code; }

private:
    ErrorCode m_code;
};

}  // namespace trim
