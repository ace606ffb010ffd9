// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace trim {

/// Dense row-major float32 matrix. Row = token, column = feature.
///
/// Shape is fixed at construction (rows >= 1, cols >= 1); the values are not
/// checked for finiteness here, the tensor loader and writer do that.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, std::vector<float> data);

    /// Single-row matrix holding `values`.
    static Matrix row_vector(std::vector<float> values);

    std::size_t rows() const noexcept { return m_rows; }
    std::size_t cols() const noexcept { return m_cols; }
    std::size_t size() const noexcept { return m_data.size(); }

    std::span<const float> data() const noexcept { return m_data; }
    std::span<const float> row(std::size_t r) const;
    float operator()(std::size_t r, std::size_t c) const { return m_data[r * m_cols + c]; }

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t m_rows;
    std::size_t m_cols;
    std::vector<float> m_data;
};

}  // namespace trim
