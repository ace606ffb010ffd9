// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include "trim/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trim/error.hpp"

namespace trim {

namespace {

constexpr int kMsDecimals = 3;
constexpr int kRatioDecimals = 6;

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::kIo, "cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
    }
}

std::uint64_t count_field(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw Error(ErrorCode::kParse, std::string("field '") + key + "' must be a number");
    }
    const double d = v.get<double>();
    if (!(d >= 1.0) || d != std::floor(d) || d > 1.8e19) {
        throw Error(ErrorCode::kParse, std::string("field '") + key + "' must be a positive integer");
    }
    return v.is_number_unsigned() ? v.get<std::uint64_t>() : static_cast<std::uint64_t>(d);
}

nlohmann::json cost_point_json(const CostPoint& p) {
    return {
        {"n_tokens", p.n_tokens},
        {"kv_cache_bytes", p.kv_cache_bytes},
        {"weights_bytes", p.weights_bytes},
        {"memory_bytes", p.memory_bytes()},
        {"first_token_ms", round_to(p.first_token_ms, kMsDecimals)},
        {"next_token_ms", round_to(p.next_token_ms, kMsDecimals)},
    };
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double round_to(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

nlohmann::json to_json(const SelectionResult& selection) {
    nlohmann::json j;
    j["strategy"] = std::string(to_string(selection.strategy));
    j["threshold"] = selection.threshold ? nlohmann::json(*selection.threshold) : nlohmann::json(nullptr);
    j["n_total"] = selection.n_total;
    j["indices"] = selection.indices;
    return j;
}

std::string to_text(const SelectionResult& selection) {
    std::ostringstream out;
    out << "strategy  " << to_string(selection.strategy) << '\n';
    out << "threshold " << (selection.threshold ? format_number(*selection.threshold) : "none") << '\n';
    out << "n_total   " << selection.n_total << '\n';
    out << "kept      " << selection.indices.size() << '\n';
    out << "indices  ";
    for (std::size_t i : selection.indices) {
        out << ' ' << i;
    }
    out << '\n';
    return out.str();
}

nlohmann::json sidecar_json(const ReducedSequence& reduced, const SelectionResult& selection) {
    nlohmann::json j;
    j["strategy"] = std::string(to_string(selection.strategy));
    j["threshold"] = selection.threshold ? nlohmann::json(*selection.threshold) : nlohmann::json(nullptr);
    j["source_n"] = reduced.source_n;
    j["n_rows"] = reduced.tokens.rows();
    j["has_aggregate"] = reduced.has_aggregate;
    j["kept_indices"] = reduced.kept_indices;
    return j;
}

SidecarInfo read_sidecar(const std::filesystem::path& path) {
    const nlohmann::json j = read_json_file(path);
    try {
        SidecarInfo info;
        info.source_n = j.at("source_n").get<std::uint64_t>();
        info.has_aggregate = j.at("has_aggregate").get<bool>();
        info.kept_indices = j.at("kept_indices").get<std::vector<std::size_t>>();
        info.strategy = j.at("strategy").get<std::string>();
        info.n_rows = j.contains("n_rows") ? j.at("n_rows").get<std::uint64_t>()
                                           : info.kept_indices.size() + (info.has_aggregate ? 1 : 0);
        return info;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
    }
}

nlohmann::json to_json(const CostReport& report) {
    return {
        {"model", report.model_name},
        {"hardware", report.hardware_name},
        {"precision", std::string(to_string(report.precision))},
        {"memory_scope", "weights + kv cache"},
        {"baseline", cost_point_json(report.baseline)},
        {"reduced", cost_point_json(report.reduced)},
        {"ratios",
         {
             {"tokens", round_to(report.ratios.tokens, kRatioDecimals)},
             {"kv_cache", round_to(report.ratios.kv_cache, kRatioDecimals)},
             {"memory", round_to(report.ratios.memory, kRatioDecimals)},
             {"first_token", round_to(report.ratios.first_token, kRatioDecimals)},
             {"next_token", round_to(report.ratios.next_token, kRatioDecimals)},
         }},
    };
}

std::string to_text(const CostReport& report) {
    const CostPoint& b = report.baseline;
    const CostPoint& r = report.reduced;
    std::ostringstream out;
    char line[160];
    auto row = [&](const char* label, const std::string& base, const std::string& red, double ratio) {
        std::snprintf(line, sizeof(line), "%-22s %16s %16s %10s\n", label, base.c_str(), red.c_str(),
                      fixed(round_to(ratio, kRatioDecimals), kRatioDecimals).c_str());
        out << line;
    };
    out << "model     " << report.model_name << " (" << to_string(report.precision) << ")\n";
    out << "hardware  " << report.hardware_name << "\n";
    std::snprintf(line, sizeof(line), "%-22s %16s %16s %10s\n", "", "baseline", "reduced", "ratio");
    out << line;
    row("prompt tokens", std::to_string(b.n_tokens), std::to_string(r.n_tokens), report.ratios.tokens);
    row("kv cache (bytes)", std::to_string(b.kv_cache_bytes), std::to_string(r.kv_cache_bytes),
        report.ratios.kv_cache);
    row("weights (bytes)", std::to_string(b.weights_bytes), std::to_string(r.weights_bytes),
        static_cast<double>(r.weights_bytes) / static_cast<double>(b.weights_bytes));
    row("weights+kv (bytes)", std::to_string(b.memory_bytes()), std::to_string(r.memory_bytes()),
        report.ratios.memory);
    row("first token (ms)", fixed(round_to(b.first_token_ms, kMsDecimals), kMsDecimals),
        fixed(round_to(r.first_token_ms, kMsDecimals), kMsDecimals), report.ratios.first_token);
    row("next token (ms)", fixed(round_to(b.next_token_ms, kMsDecimals), kMsDecimals),
        fixed(round_to(r.next_token_ms, kMsDecimals), kMsDecimals), report.ratios.next_token);
    return out.str();
}

std::string grid_text(const SimilarityGrid& grid) {
    std::string out;
    for (std::size_t r = 0; r < grid.side; ++r) {
        for (std::size_t c = 0; c < grid.side; ++c) {
            if (c > 0) {
                out += ' ';
            }
            out += format_number(grid.at(r, c));
        }
        out += '\n';
    }
    return out;
}

std::vector<std::uint8_t> grid_pixels(const SimilarityGrid& grid) {
    const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
    std::vector<std::uint8_t> pixels(grid.values.size(), 128);
    if (lo == grid.values.end() || *hi == *lo) {
        return pixels;
    }
    const double range = *hi - *lo;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const double scaled = std::round(255.0 * (grid.values[i] - *lo) / range);
        pixels[i] = static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
    }
    return pixels;
}

std::string grid_pgm(const SimilarityGrid& grid) {
    std::string out = "P5\n" + std::to_string(grid.side) + " " + std::to_string(grid.side) + "\n255\n";
    const auto pixels = grid_pixels(grid);
    out.append(pixels.begin(), pixels.end());
    return out;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
    try {
        ModelSpec spec;
        spec.name = j.value("name", std::string("custom"));
        spec.n_params = count_field(j, "n_params");
        spec.n_layers = count_field(j, "n_layers");
        spec.d_model = count_field(j, "d_model");

        // KV width defaults to d_model when the head layout is not given.
        const bool has_heads = j.contains("n_kv_heads");
        const bool has_dhead = j.contains("d_head");
        if (has_heads && has_dhead) {
            spec.n_kv_heads = count_field(j, "n_kv_heads");
            spec.d_head = count_field(j, "d_head");
        } else if (has_heads || has_dhead) {
            const std::uint64_t given = count_field(j, has_heads ? "n_kv_heads" : "d_head");
            if (spec.d_model % given != 0) {
                throw Error(ErrorCode::kParse, "d_model is not divisible by " +
                                                   std::string(has_heads ? "n_kv_heads" : "d_head"));
            }
            spec.n_kv_heads = has_heads ? given : spec.d_model / given;
            spec.d_head = has_heads ? spec.d_model / given : given;
        } else {
            spec.n_kv_heads = 1;
            spec.d_head = spec.d_model;
        }

        if (j.contains("precision")) {
            spec.bytes_per_param = parse_precision(j.at("precision").get<std::string>()) == Precision::kInt8 ? 1 : 2;
        } else {
            spec.bytes_per_param = static_cast<std::uint32_t>(j.value("bytes_per_param", 2u));
        }
        spec.vision_overhead_flops = j.value("vision_overhead_flops", 0.0);
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParse, std::string("model spec: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::kParse, std::string("model spec: ") + e.what());
    }
}

HardwareSpec hardware_spec_from_json(const nlohmann::json& j) {
    try {
        HardwareSpec spec;
        spec.name = j.value("name", std::string("custom"));
        spec.peak_flops = j.at("peak_flops").get<double>();
        spec.mem_bandwidth = j.at("mem_bandwidth").get<double>();
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParse, std::string("hardware spec: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::kParse, std::string("hardware spec: ") + e.what());
    }
}

ModelSpec load_model_spec(const std::filesystem::path& path) { return model_spec_from_json(read_json_file(path)); }

HardwareSpec load_hardware_spec(const std::filesystem::path& path) {
    return hardware_spec_from_json(read_json_file(path));
}

}  // namespace trim
