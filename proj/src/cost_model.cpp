// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include "trim/cost_model.hpp"

#include <cmath>
#include <string>

#include "trim/error.hpp"

namespace trim {

namespace {

constexpr double kMsPerSecond = 1e3;

double ratio(double reduced, double baseline) { return baseline == 0.0 ? 1.0 : reduced / baseline; }

}  // namespace

std::string_view to_string(Precision p) noexcept { return p == Precision::kInt8 ? "int8" : "fp16"; }

Precision parse_precision(std::string_view text) {
    if (text == "fp16") {
        return Precision::kFp16;
    }
    if (text == "int8") {
        return Precision::kInt8;
    }
    throw Error(ErrorCode::kParse, "unknown precision '" + std::string(text) + "' (expected fp16 or int8)");
}

void ModelSpec::validate() const {
    if (n_params == 0 || n_layers == 0 || d_model == 0 || n_kv_heads == 0 || d_head == 0) {
        throw Error(ErrorCode::kInvalidArgument, "model spec '" + name + "': every count must be >= 1");
    }
    if (bytes_per_param != 1 && bytes_per_param != 2) {
        throw Error(ErrorCode::kInvalidArgument, "model spec '" + name + "': bytes_per_param must be 1 or 2");
    }
    if (!std::isfinite(vision_overhead_flops) || vision_overhead_flops < 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "model spec '" + name + "': vision_overhead_flops must be >= 0");
    }
}

ModelSpec ModelSpec::with_precision(Precision p) const {
    ModelSpec out = *this;
    out.bytes_per_param = p == Precision::kInt8 ? 1 : 2;
    return out;
}

void HardwareSpec::validate() const {
    if (!(peak_flops > 0.0) || !(mem_bandwidth > 0.0) || !std::isfinite(peak_flops) ||
        !std::isfinite(mem_bandwidth)) {
        throw Error(ErrorCode::kInvalidArgument, "hardware spec '" + name + "': rates must be positive");
    }
}

ModelSpec llava15_7b_preset() {
    return ModelSpec{"llava-1.5-7b", 7'000'000'000, 32, 4096, 32, 128, 2, 0.0};
}

ModelSpec llava15_13b_preset() {
    return ModelSpec{"llava-1.5-13b", 13'000'000'000, 40, 5120, 40, 128, 2, 0.0};
}

HardwareSpec v100_preset() { return HardwareSpec{"v100", 112e12, 900e9}; }

ModelSpec model_preset(std::string_view name) {
    if (name == "llava-1.5-7b") {
        return llava15_7b_preset();
    }
    if (name == "llava-1.5-13b") {
        return llava15_13b_preset();
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown model preset '" + std::string(name) + "'");
}

HardwareSpec hardware_preset(std::string_view name) {
    if (name == "v100") {
        return v100_preset();
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown hardware preset '" + std::string(name) + "'");
}

std::uint64_t kv_cache_bytes(const ModelSpec& model, std::uint64_t n_tokens) {
    return 2 * model.n_layers * model.kv_width() * model.bytes_per_param * n_tokens;
}

double prefill_flops(const ModelSpec& model, std::uint64_t n_tokens) {
    const double t = static_cast<double>(n_tokens);
    const double weights = 2.0 * static_cast<double>(model.n_params) * t;
    const double attention = 4.0 * static_cast<double>(model.n_layers) * static_cast<double>(model.d_model) * t * t;
    return model.vision_overhead_flops + weights + attention;
}

double first_token_ms(const ModelSpec& model, const HardwareSpec& hw, std::uint64_t n_tokens) {
    return prefill_flops(model, n_tokens) / hw.peak_flops * kMsPerSecond;
}

double next_token_ms(const ModelSpec& model, const HardwareSpec& hw, std::uint64_t n_cached) {
    const double bytes = static_cast<double>(model.weights_bytes()) + static_cast<double>(kv_cache_bytes(model, n_cached));
    return bytes / hw.mem_bandwidth * kMsPerSecond;
}

CostPoint evaluate_cost(const ModelSpec& model, const HardwareSpec& hw, std::uint64_t n_tokens) {
    model.validate();
    hw.validate();
    return CostPoint{n_tokens, kv_cache_bytes(model, n_tokens), model.weights_bytes(),
                     first_token_ms(model, hw, n_tokens), next_token_ms(model, hw, n_tokens)};
}

CostReport compare_costs(const ModelSpec& model, const HardwareSpec& hw, std::uint64_t baseline_tokens,
                         std::uint64_t reduced_tokens) {
    if (baseline_tokens == 0 || reduced_tokens == 0) {
        throw Error(ErrorCode::kInvalidArgument, "token counts must be >= 1");
    }
    CostReport report;
    report.model_name = model.name;
    report.hardware_name = hw.name;
    report.precision = model.bytes_per_param == 1 ? Precision::kInt8 : Precision::kFp16;
    report.baseline = evaluate_cost(model, hw, baseline_tokens);
    report.reduced = evaluate_cost(model, hw, reduced_tokens);

    const CostPoint& b = report.baseline;
    const CostPoint& r = report.reduced;
    report.ratios.tokens = ratio(static_cast<double>(r.n_tokens), static_cast<double>(b.n_tokens));
    report.ratios.kv_cache = ratio(static_cast<double>(r.kv_cache_bytes), static_cast<double>(b.kv_cache_bytes));
    report.ratios.memory = ratio(static_cast<double>(r.memory_bytes()), static_cast<double>(b.memory_bytes()));
    report.ratios.first_token = ratio(r.first_token_ms, b.first_token_ms);
    report.ratios.next_token = ratio(r.next_token_ms, b.next_token_ms);
    return report;
}

}  // namespace trim
