// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include "trim/clip_metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trim/error.hpp"

namespace trim {

PooledTextEmbedding::PooledTextEmbedding(std::vector<float> values) : m_values(std::move(values)) {
    if (m_values.empty()) {
        throw Error(ErrorCode::kShape, "text embedding is empty");
    }
    double norm2 = 0.0;
    for (float v : m_values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::kNonFinite, "text embedding contains NaN or Inf");
        }
        norm2 += static_cast<double>(v) * v;
    }
    if (norm2 == 0.0) {
        throw Error(ErrorCode::kZeroNorm, "text embedding has zero norm");
    }
}

PooledTextEmbedding PooledTextEmbedding::from_matrix(const Matrix& m) {
    if (m.rows() != 1) {
        throw Error(ErrorCode::kShape,
                    "text embedding must be a single row, got " + std::to_string(m.rows()) + " rows");
    }
    return PooledTextEmbedding(std::vector<float>(m.data().begin(), m.data().end()));
}

double cosine_similarity(std::span<const float> v, std::span<const float> u) {
    if (v.size() != u.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "cosine similarity of vectors with dimensions " +
                                                       std::to_string(v.size()) + " and " + std::to_string(u.size()));
    }
    double dot = 0.0;
    double vv = 0.0;
    double uu = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = v[i];
        const double b = u[i];
        dot += a * b;
        vv += a * a;
        uu += b * b;
    }
    if (vv == 0.0 || uu == 0.0) {
        throw Error(ErrorCode::kZeroNorm, "cosine similarity of a zero-norm vector");
    }
    return std::clamp(dot / (std::sqrt(vv) * std::sqrt(uu)), -1.0, 1.0);
}

std::vector<double> softmax(std::span<const double> x) {
    if (x.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "softmax of an empty vector");
    }
    const double max = *std::max_element(x.begin(), x.end());
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [max](double v) { return std::exp(v - max); });

    std::vector<double> ordered(out);
    std::sort(ordered.begin(), ordered.end());
    double sum = 0.0;
    for (double e : ordered) {
        sum += e;
    }
    for (double& e : out) {
        e /= sum;
    }
    return out;
}

SignificanceScores score_tokens(const Matrix& image_tokens, const PooledTextEmbedding& text) {
    if (image_tokens.cols() != text.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "image tokens have dimension " + std::to_string(image_tokens.cols()) +
                                                       " but the text embedding has " + std::to_string(text.dim()));
    }
    SignificanceScores scores;
    scores.raw.reserve(image_tokens.rows());
    for (std::size_t r = 0; r < image_tokens.rows(); ++r) {
        const auto row = image_tokens.row(r);
        if (std::all_of(row.begin(), row.end(), [](float v) { return v == 0.0f; })) {
            throw Error(ErrorCode::kZeroNorm, "image token row " + std::to_string(r) + " has zero norm");
        }
        scores.raw.push_back(cosine_similarity(row, text.values()));
    }
    scores.softmax = softmax(scores.raw);
    return scores;
}

std::optional<std::size_t> square_side(std::size_t n_tokens) noexcept {
    if (n_tokens == 0) {
        return std::nullopt;
    }
    auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(n_tokens)));
    // sqrt may be off by one near 2^64; compare by division to avoid overflow.
    while (side > n_tokens / side) {
        --side;
    }
    while (side + 1 <= n_tokens / (side + 1)) {
        ++side;
    }
    if (side * side != n_tokens) {
        return std::nullopt;
    }
    return side;
}

SimilarityGrid similarity_grid(const SignificanceScores& scores, std::size_t grid_side) {
    const std::size_t n = scores.n_tokens();
    if (grid_side == 0 || grid_side > n / grid_side || grid_side * grid_side != n) {
        throw Error(ErrorCode::kShape, std::to_string(n) + " scores do not fill a " + std::to_string(grid_side) + "x" +
                                           std::to_string(grid_side) + " grid");
    }
    return SimilarityGrid{grid_side, scores.softmax};
}

}  // namespace trim
