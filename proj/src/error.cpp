// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include "trim/error.hpp"

namespace trim {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kMalformedHeader: return "malformed header";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kTrailingData: return "trailing data";
    case ErrorCode::kDimsOverflow: return "dims overflow";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kZeroNorm: return "zero norm";
    case ErrorCode::kShape: return "shape mismatch";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kParse: return "parse error";
    }
    return "unknown error";
}

}  // namespace trim
