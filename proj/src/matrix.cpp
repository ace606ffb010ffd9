// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include "trim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trim/error.hpp"

namespace trim {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : m_rows(rows), m_cols(cols), m_data(std::move(data)) {
    if (rows == 0 || cols == 0) {
        throw Error(ErrorCode::kShape, "matrix must have at least one row and one column");
    }
    if (cols > m_data.max_size() / rows || m_data.size() != rows * cols) {
        throw Error(ErrorCode::kShape, "matrix data holds " + std::to_string(m_data.size()) + " values, expected " +
                                           std::to_string(rows) + " x " + std::to_string(cols));
    }
}

Matrix Matrix::row_vector(std::vector<float> values) {
    const std::size_t n = values.size();
    return Matrix(1, n, std::move(values));
}

std::span<const float> Matrix::row(std::size_t r) const {
    if (r >= m_rows) {
        throw Error(ErrorCode::kOutOfRange, "row " + std::to_string(r) + " out of range");
    }
    return std::span<const float>(m_data).subspan(r * m_cols, m_cols);
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(m_data.begin(), m_data.end(), [](float v) { return std::isfinite(v); });
}

}  // namespace trim
