// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trim/clip_metric.hpp"
#include "trim/cost_model.hpp"
#include "trim/token_reduce.hpp"
#include "trim/token_select.hpp"

namespace trim {

// Text and JSON renderings are built from the same rounded values, so a
// number parsed out of either one is identical. Milliseconds carry 3
// decimals and ratios 6.

/// Shortest decimal string that round-trips to `value`.
std::string format_number(double value);
double round_to(double value, int decimals);

nlohmann::json to_json(const SelectionResult& selection);
std::string to_text(const SelectionResult& selection);

/// Sidecar written next to a reduced tensor.
nlohmann::json sidecar_json(const ReducedSequence& reduced, const SelectionResult& selection);

struct SidecarInfo {
    std::uint64_t source_n = 0;
    std::uint64_t n_rows = 0;
    bool has_aggregate = false;
    std::vector<std::size_t> kept_indices;
    std::string strategy;
};

SidecarInfo read_sidecar(const std::filesystem::path& path);

nlohmann::json to_json(const CostReport& report);
std::string to_text(const CostReport& report);

/// Whitespace-separated rows, one grid row per line.
std::string grid_text(const SimilarityGrid& grid);

/// Binary 8-bit portable graymap (P5). Values are min-max scaled to 0..255;
/// a constant grid maps to mid-gray 128.
std::vector<std::uint8_t> grid_pixels(const SimilarityGrid& grid);
std::string grid_pgm(const SimilarityGrid& grid);

ModelSpec model_spec_from_json(const nlohmann::json& j);
HardwareSpec hardware_spec_from_json(const nlohmann::json& j);
ModelSpec load_model_spec(const std::filesystem::path& path);
HardwareSpec load_hardware_spec(const std::filesystem::path& path);

}  // namespace trim
