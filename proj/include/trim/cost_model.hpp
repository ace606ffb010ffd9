// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace trim {

// ---------------------------------------------------------------------------
// Analytical batch-1 inference cost model.
//
//   KV cache     2 * layers * kv_width * bytes_per_param * tokens
//   first token  (vision_overhead + 2 * params * T + 4 * layers * d_model * T^2)
//                / peak_flops                        (compute-bound prefill)
//   next token   (weights_bytes + kv_cache_bytes(T)) / mem_bandwidth
//                                                    (memory-bound decode)
//
// KV cache and weights are the only memory the model accounts for; framework
// activations and allocator slack are not modeled.
// ---------------------------------------------------------------------------

enum class Precision { kFp16, kInt8 };

std::string_view to_string(Precision p) noexcept;
Precision parse_precision(std::string_view text);

struct ModelSpec {
    std::string name;
    std::uint64_t n_params = 0;
    std::uint64_t n_layers = 0;
    std::uint64_t d_model = 0;
    std::uint64_t n_kv_heads = 0;
    std::uint64_t d_head = 0;
    std::uint32_t bytes_per_param = 2;
    double vision_overhead_flops = 0.0;  // token-count-independent prefill work

    std::uint64_t kv_width() const noexcept { return n_kv_heads * d_head; }
    std::uint64_t weights_bytes() const noexcept { return n_params * bytes_per_param; }

    /// Throws kInvalidArgument when an invariant is violated.
    void validate() const;

    ModelSpec with_precision(Precision p) const;
};

struct HardwareSpec {
    std::string name;
    double peak_flops = 0.0;     // FLOP/s at the working precision
    double mem_bandwidth = 0.0;  // bytes/s

    void validate() const;
};

// Presets, not measurements. Parameter counts are the nominal class sizes.
ModelSpec llava15_7b_preset();
ModelSpec llava15_13b_preset();
HardwareSpec v100_preset();  // 112 TFLOPS FP16 tensor-core peak, 900 GB/s HBM2

/// Looks up "llava-1.5-7b", "llava-1.5-13b" or "v100"; throws kInvalidArgument otherwise.
ModelSpec model_preset(std::string_view name);
HardwareSpec hardware_preset(std::string_view name);

std::uint64_t kv_cache_bytes(const ModelSpec& model, std::uint64_t n_tokens);
double prefill_flops(const ModelSpec& model, std::uint64_t n_tokens);
double first_token_ms(const ModelSpec& model, const HardwareSpec& hw, std::uint64_t n_tokens);
double next_token_ms(const ModelSpec& model, const HardwareSpec& hw, std::uint64_t n_cached);

struct CostPoint {
    std::uint64_t n_tokens = 0;
    std::uint64_t kv_cache_bytes = 0;
    std::uint64_t weights_bytes = 0;
    double first_token_ms = 0.0;
    double next_token_ms = 0.0;

    std::uint64_t memory_bytes() const noexcept { return kv_cache_bytes + weights_bytes; }
};

/// Reduced over baseline; every ratio is dimensionless.
struct CostRatios {
    double tokens = 1.0;
    double kv_cache = 1.0;
    double memory = 1.0;
    double first_token = 1.0;
    double next_token = 1.0;
};

struct CostReport {
    std::string model_name;
    std::string hardware_name;
    Precision precision = Precision::kFp16;
    CostPoint baseline;
    CostPoint reduced;
    CostRatios ratios;
};

CostPoint evaluate_cost(const ModelSpec& model, const HardwareSpec& hw, std::uint64_t n_tokens);

/// Both counts are total prompt tokens (visual + text) and must be >= 1.
CostReport compare_costs(const ModelSpec& model, const HardwareSpec& hw, std::uint64_t baseline_tokens,
                         std::uint64_t reduced_tokens);

}  // namespace trim
