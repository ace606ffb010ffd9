// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include "trim/token_select.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "trim/error.hpp"

namespace trim {

namespace {

void check_ratio(double ratio) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw Error(ErrorCode::kOutOfRange, "ratio must lie in (0, 1], got " + std::to_string(ratio));
    }
}

void check_scores(std::span<const double> scores) {
    if (scores.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "no scores to select from");
    }
    if (!std::all_of(scores.begin(), scores.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorCode::kNonFinite, "scores contain NaN or Inf");
    }
}

double parse_double(std::string_view text, std::string_view what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::kParse, "bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::kParse, "bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
    case Strategy::kIqr: return "iqr";
    case Strategy::kTopK: return "topk";
    case Strategy::kRandom: return "random";
    case Strategy::kPool: return "pool";
    }
    return "unknown";
}

StrategySpec StrategySpec::parse(std::string_view text) {
    const auto parts = split(text, ':');
    StrategySpec spec;
    const auto name = parts.front();
    if (name == "iqr" && parts.size() == 1) {
        spec.kind = Strategy::kIqr;
        return spec;
    }
    if (name == "topk" && parts.size() == 2) {
        spec.kind = Strategy::kTopK;
    } else if (name == "pool" && parts.size() == 2) {
        spec.kind = Strategy::kPool;
    } else if (name == "random" && parts.size() == 3) {
        spec.kind = Strategy::kRandom;
        spec.seed = parse_u64(parts[2], "seed");
    } else {
        throw Error(ErrorCode::kParse, "unknown strategy '" + std::string(text) +
                                           "' (expected iqr, topk:R, random:R:SEED or pool:R)");
    }
    spec.ratio = parse_double(parts[1], "ratio");
    check_ratio(spec.ratio);
    return spec;
}

std::string StrategySpec::to_string() const {
    std::string out(trim::to_string(kind));
    if (kind == Strategy::kIqr) {
        return out;
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), ratio);
    out += ':';
    out.append(buf, res.ptr);
    if (kind == Strategy::kRandom) {
        out += ':' + std::to_string(seed);
    }
    return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "quantile of an empty sample");
    }
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

QuartileSummary quartiles(std::span<const double> x) {
    check_scores(x);
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    QuartileSummary q;
    q.q1 = quantile_sorted(sorted, 0.25);
    q.q3 = quantile_sorted(sorted, 0.75);
    q.iqr = q.q3 - q.q1;
    q.upper_bound = q.q3 + 1.5 * q.iqr;
    return q;
}

std::size_t token_budget(std::size_t n_total, double ratio) {
    check_ratio(ratio);
    if (n_total == 0) {
        throw Error(ErrorCode::kInvalidArgument, "token count must be at least 1");
    }
    const auto k = static_cast<std::size_t>(std::round(ratio * static_cast<double>(n_total)));
    return std::clamp<std::size_t>(k, 1, n_total);
}

SelectionResult select_iqr(std::span<const double> scores) {
    const QuartileSummary q = quartiles(scores);
    SelectionResult result;
    result.strategy = Strategy::kIqr;
    result.threshold = q.upper_bound;
    result.n_total = scores.size();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > q.upper_bound) {
            result.indices.push_back(i);
        }
    }
    if (result.indices.empty()) {
        const auto best = std::max_element(scores.begin(), scores.end());
        result.indices.push_back(static_cast<std::size_t>(best - scores.begin()));
    }
    return result;
}

SelectionResult select_iqr(const SignificanceScores& scores) { return select_iqr(scores.softmax); }

SelectionResult select_topk(const SignificanceScores& scores, double ratio) {
    const std::span<const double> s = scores.softmax;
    check_scores(s);
    const std::size_t k = token_budget(s.size(), ratio);

    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) { return s[a] > s[b] || (s[a] == s[b] && a < b); });
    order.resize(k);
    std::sort(order.begin(), order.end());

    return SelectionResult{std::move(order), Strategy::kTopK, std::nullopt, s.size()};
}

SelectionResult select_random(std::size_t n_total, double ratio, std::uint64_t seed) {
    const std::size_t k = token_budget(n_total, ratio);

    // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
    std::vector<std::size_t> pool(n_total);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n_total - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());

    return SelectionResult{std::move(pool), Strategy::kRandom, std::nullopt, n_total};
}

SelectionResult select_pool(std::size_t n_total, double ratio) {
    const std::size_t k = token_budget(n_total, ratio);
    std::vector<std::size_t> indices;
    indices.reserve(k);
    if (k == 1) {
        indices.push_back(0);
    } else {
        const double step = static_cast<double>(n_total - 1) / static_cast<double>(k - 1);
        for (std::size_t j = 0; j < k; ++j) {
            indices.push_back(static_cast<std::size_t>(std::round(static_cast<double>(j) * step)));
        }
        indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    }
    return SelectionResult{std::move(indices), Strategy::kPool, std::nullopt, n_total};
}

SelectionResult select(const SignificanceScores& scores, const StrategySpec& spec) {
    switch (spec.kind) {
    case Strategy::kIqr: return select_iqr(scores);
    case Strategy::kTopK: return select_topk(scores, spec.ratio);
    case Strategy::kRandom: return select_random(scores.n_tokens(), spec.ratio, spec.seed);
    case Strategy::kPool: return select_pool(scores.n_tokens(), spec.ratio);
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown strategy");
}

double retained_mass(const SignificanceScores& scores, const SelectionResult& selection) {
    if (selection.n_total != scores.n_tokens()) {
        throw Error(ErrorCode::kDimensionMismatch, "selection covers " + std::to_string(selection.n_total) +
                                                       " tokens but there are " + std::to_string(scores.n_tokens()) +
                                                       " scores");
    }
    double mass = 0.0;
    for (std::size_t i : selection.indices) {
        mass += scores.softmax.at(i);
    }
    return mass;
}

std::uint64_t SplitMix64::next() noexcept {
    std::uint64_t z = (m_state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
    // Reject the low 2^64 mod bound values so every residue is equally likely.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

}  // namespace trim
