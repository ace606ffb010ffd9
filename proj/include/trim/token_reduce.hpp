// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "trim/clip_metric.hpp"
#include "trim/matrix.hpp"
#include "trim/token_select.hpp"

namespace trim {

/// Kept rows in source order, followed by the mean of the dropped rows when
/// anything was dropped.
struct ReducedSequence {
    Matrix tokens;
    std::vector<std::size_t> kept_indices;
    bool has_aggregate = false;
    std::size_t source_n = 0;
};

struct PipelineResult {
    SignificanceScores scores;
    SelectionResult selection;
    ReducedSequence reduced;
};

/// Mean over rows not in `selection`, accumulated in double. Empty when every
/// row is kept.
std::optional<std::vector<float>> aggregate_unselected(const Matrix& source, const SelectionResult& selection);

ReducedSequence reduce(const Matrix& source, const SelectionResult& selection);

PipelineResult run_pipeline(const Matrix& image_tokens, const PooledTextEmbedding& text, const StrategySpec& strategy);

}  // namespace trim
