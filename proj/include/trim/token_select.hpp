// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trim/clip_metric.hpp"

namespace trim {

enum class Strategy { kIqr, kTopK, kRandom, kPool };

std::string_view to_string(Strategy s) noexcept;

struct QuartileSummary {
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double upper_bound = 0.0;
};

struct SelectionResult {
    std::vector<std::size_t> indices;  // strictly increasing, each < n_total
    Strategy strategy = Strategy::kIqr;
    std::optional<double> threshold;   // the IQR upper bound, IQR only
    std::size_t n_total = 0;
};

/// A parsed `--strategy` value: iqr | topk:R | random:R:SEED | pool:R.
struct StrategySpec {
    Strategy kind = Strategy::kIqr;
    double ratio = 1.0;
    std::uint64_t seed = 0;

    static StrategySpec parse(std::string_view text);
    std::string to_string() const;
};

/// Linear interpolation between order statistics at rank p * (n - 1) of an
/// ascending-sorted sample (Hyndman-Fan type 7).
double quantile_sorted(std::span<const double> sorted, double p);

QuartileSummary quartiles(std::span<const double> x);

/// Fixed budget shared by TopK, Random and Pool: max(1, round(ratio * n)),
/// rounding half away from zero. Throws kOutOfRange unless 0 < ratio <= 1.
std::size_t token_budget(std::size_t n_total, double ratio);

/// Keeps indices whose score is strictly above Q3 + 1.5 IQR; falls back to
/// the single lowest-index argmax when nothing clears the bound.
SelectionResult select_iqr(std::span<const double> scores);
SelectionResult select_iqr(const SignificanceScores& scores);

/// The k highest softmax scores, ties to the lower index.
SelectionResult select_topk(const SignificanceScores& scores, double ratio);

SelectionResult select_random(std::size_t n_total, double ratio, std::uint64_t seed);

/// Evenly spaced positions round(j (n-1) / (k-1)), j = 0..k-1.
SelectionResult select_pool(std::size_t n_total, double ratio);

SelectionResult select(const SignificanceScores& scores, const StrategySpec& spec);

/// Sum of softmax significance over the kept indices.
double retained_mass(const SignificanceScores& scores, const SelectionResult& selection);

/// SplitMix64 (Steele, Lea, Flood 2014). Portable and fully specified, so a
/// seed reproduces the same random baseline on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : m_state(seed) {}

    std::uint64_t next() noexcept;

    /// Uniform integer in [0, bound) by rejection; bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::uint64_t m_state;
};

}  // namespace trim
