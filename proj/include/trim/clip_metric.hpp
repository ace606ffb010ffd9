// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "trim/matrix.hpp"

namespace trim {

/// Sentence-level text embedding in the joint image/text space.
class PooledTextEmbedding {
public:
    /// Throws if `values` is empty, non-finite, or has zero norm.
    explicit PooledTextEmbedding(std::vector<float> values);

    /// Accepts a 1 x D matrix (the shape a 1-D tensor file loads as).
    static PooledTextEmbedding from_matrix(const Matrix& m);

    std::size_t dim() const noexcept { return m_values.size(); }
    std::span<const float> values() const noexcept { return m_values; }

private:
    std::vector<float> m_values;
};

/// Per-token significance. `raw` holds cosine similarities in [-1, 1],
/// `softmax` their normalized exponentials.
struct SignificanceScores {
    std::vector<double> raw;
    std::vector<double> softmax;

    std::size_t n_tokens() const noexcept { return raw.size(); }
};

/// Row-major square grid of softmax scores, patch raster order.
struct SimilarityGrid {
    std::size_t side = 0;
    std::vector<double> values;

    double at(std::size_t r, std::size_t c) const { return values[r * side + c]; }
};

/// (v . u) / (|v| |u|), accumulated in double and clamped to [-1, 1].
double cosine_similarity(std::span<const float> v, std::span<const float> u);

/// Max-shifted softmax. The normalizer is summed in ascending order of the
/// exponentials, so permuting the input permutes the output bit-for-bit.
std::vector<double> softmax(std::span<const double> x);

/// Scores every row of `image_tokens` against `text`. Zero-norm rows are an
/// error that names the offending row.
SignificanceScores score_tokens(const Matrix& image_tokens, const PooledTextEmbedding& text);

/// Exact integer square root of `n_tokens`, if there is one.
std::optional<std::size_t> square_side(std::size_t n_tokens) noexcept;

SimilarityGrid similarity_grid(const SignificanceScores& scores, std::size_t grid_side);

}  // namespace trim
