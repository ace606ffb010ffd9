// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include "trim/token_reduce.hpp"

#include <string>

#include "trim/error.hpp"

namespace trim {

namespace {

void check_selection(const Matrix& source, const SelectionResult& selection) {
    if (selection.n_total != source.rows()) {
        throw Error(ErrorCode::kDimensionMismatch, "selection covers " + std::to_string(selection.n_total) +
                                                       " tokens but the source has " +
                                                       std::to_string(source.rows()) + " rows");
    }
    if (selection.indices.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "selection keeps no tokens");
    }
    for (std::size_t i = 0; i < selection.indices.size(); ++i) {
        if (selection.indices[i] >= source.rows() || (i > 0 && selection.indices[i] <= selection.indices[i - 1])) {
            throw Error(ErrorCode::kInvalidArgument, "selection indices must be strictly increasing and < " +
                                                         std::to_string(source.rows()));
        }
    }
}

}  // namespace

std::optional<std::vector<float>> aggregate_unselected(const Matrix& source, const SelectionResult& selection) {
    check_selection(source, selection);
    const std::size_t n_dropped = source.rows() - selection.indices.size();
    if (n_dropped == 0) {
        return std::nullopt;
    }

    std::vector<double> sum(source.cols(), 0.0);
    auto kept = selection.indices.begin();
    for (std::size_t r = 0; r < source.rows(); ++r) {
        if (kept != selection.indices.end() && *kept == r) {
            ++kept;
            continue;
        }
        const auto row = source.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            sum[c] += row[c];
        }
    }

    std::vector<float> mean(source.cols());
    for (std::size_t c = 0; c < mean.size(); ++c) {
        mean[c] = static_cast<float>(sum[c] / static_cast<double>(n_dropped));
    }
    return mean;
}

ReducedSequence reduce(const Matrix& source, const SelectionResult& selection) {
    auto aggregate = aggregate_unselected(source, selection);

    const std::size_t out_rows = selection.indices.size() + (aggregate ? 1 : 0);
    std::vector<float> data;
    data.reserve(out_rows * source.cols());
    for (std::size_t idx : selection.indices) {
        const auto row = source.row(idx);
        data.insert(data.end(), row.begin(), row.end());
    }
    if (aggregate) {
        data.insert(data.end(), aggregate->begin(), aggregate->end());
    }

    return ReducedSequence{Matrix(out_rows, source.cols(), std::move(data)), selection.indices, aggregate.has_value(),
                           source.rows()};
}

PipelineResult run_pipeline(const Matrix& image_tokens, const PooledTextEmbedding& text, const StrategySpec& strategy) {
    SignificanceScores scores = score_tokens(image_tokens, text);
    SelectionResult selection = select(scores, strategy);
    ReducedSequence reduced = reduce(image_tokens, selection);
    return PipelineResult{std::move(scores), std::move(selection), std::move(reduced)};
}

}  // namespace trim
